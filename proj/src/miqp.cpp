#include "gnep/miqp.hpp"

#include <cmath>
#include <limits>

#include "gnep/subsolvers.hpp"

namespace gnep {

namespace {

struct Candidate {
  SolveStatus status = SolveStatus::infeasible;
  double value = std::numeric_limits<double>::infinity();
  std::uint64_t index = 0;
  std::string message;
};

// Unbounded/failed dominate; otherwise the lower value, then the lower index.
bool replaces(const Candidate& a, const Candidate& b) {
  auto rank = [](SolveStatus s) {
    switch (s) {
      case SolveStatus::failed: return 3;
      case SolveStatus::unbounded: return 2;
      case SolveStatus::optimal: return 1;
      case SolveStatus::infeasible: return 0;
    }
    return 0;
  };
  if (rank(a.status) != rank(b.status)) return rank(a.status) > rank(b.status);
  if (a.status != SolveStatus::optimal) return a.index < b.index;
  const double tie = 1e-9 * (1.0 + std::abs(b.value));
  if (a.value < b.value - tie) return true;
  if (a.value > b.value + tie) return false;
  return a.index < b.index;
}

}  // namespace

MiqpResult solve_miqp(const MixedIntegerQp& mp, const MiqpOptions& opt) {
  const QpProblem& base = mp.relaxation;
  base.validate();
  MiqpResult res;
  std::vector<int> ints;
  std::vector<double> lo, hi;
  for (int j = 0; j < base.num_vars(); ++j) {
    if (j < static_cast<int>(mp.integral.size()) && mp.integral[j]) {
      ints.push_back(j);
      lo.push_back(std::ceil(base.lower[j] - 1e-9));
      hi.push_back(std::floor(base.upper[j] + 1e-9));
    }
  }
  const std::uint64_t total = lattice_size(lo, hi);
  if (total > opt.cap) {
    res.message = "integer lattice exceeds the enumeration cap";
    return res;
  }
  res.assignments = total;
  if (total == 0) {
    res.status = SolveStatus::infeasible;
    res.message = "empty integer lattice";
    return res;
  }
  const int k = static_cast<int>(ints.size());
  // Mixed-radix decoding, first integer variable most significant.
  auto fix = [&](std::uint64_t idx, QpProblem& p) {
    for (int t = k - 1; t >= 0; --t) {
      const auto radix = static_cast<std::uint64_t>(hi[t] - lo[t] + 1.0);
      const double v = lo[t] + static_cast<double>(idx % radix);
      idx /= radix;
      p.lower[ints[t]] = v;
      p.upper[ints[t]] = v;
    }
  };
  QpOptions qo;
  qo.tol = opt.tol;
  Candidate best;
  best.index = std::numeric_limits<std::uint64_t>::max();
  const auto n_total = static_cast<long long>(total);

#pragma omp parallel if (opt.parallel && total > 1)
  {
    Candidate local;
    local.index = std::numeric_limits<std::uint64_t>::max();
    QpProblem p = base;
#pragma omp for schedule(dynamic, 1)
    for (long long idx = 0; idx < n_total; ++idx) {
      fix(static_cast<std::uint64_t>(idx), p);
      const QpResult r = solve_active_set(p, qo);
      Candidate c{r.status, r.status == SolveStatus::optimal ? r.objective : 0.0,
                  static_cast<std::uint64_t>(idx), r.message};
      if (replaces(c, local)) local = std::move(c);
    }
#pragma omp critical
    if (replaces(local, best)) best = std::move(local);
  }

  if (best.status != SolveStatus::optimal) {
    res.status = best.status;
    res.message = best.status == SolveStatus::infeasible ? "every integer assignment is infeasible"
                                                          : "continuous subproblem: " + best.message;
    return res;
  }
  QpProblem p = base;
  fix(best.index, p);
  const QpResult r = solve_active_set(p, qo);
  res.status = r.status;
  res.x = r.x;
  res.objective = r.objective;
  res.certificate = r.certificate;
  res.message = r.message;
  return res;
}

}  // namespace gnep
