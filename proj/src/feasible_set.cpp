#include "gnep/feasible_set.hpp"

#include <cmath>
#include <stdexcept>

namespace gnep {

FeasibleSet FeasibleSet::free(int owner, int n) {
  FeasibleSet s;
  s.owner = owner;
  s.n = n;
  s.lower.assign(n, -kInf);
  s.upper.assign(n, kInf);
  s.integral.assign(n, false);
  return s;
}

FeasibleSet FeasibleSet::box(int owner, std::vector<double> lower, std::vector<double> upper) {
  FeasibleSet s;
  s.owner = owner;
  s.n = static_cast<int>(lower.size());
  s.lower = std::move(lower);
  s.upper = std::move(upper);
  s.integral.assign(s.n, false);
  return s;
}

void FeasibleSet::validate() const {
  const auto n_ = static_cast<std::size_t>(n);
  if (lower.size() != n_ || upper.size() != n_ || integral.size() != n_)
    throw std::invalid_argument("feasible set: bound/integrality arrays must have length n");
  for (int j = 0; j < n; ++j) {
    if (std::isnan(lower[j]) || std::isnan(upper[j])) throw std::invalid_argument("feasible set: NaN bound");
    if (lower[j] > upper[j])
      throw std::invalid_argument("feasible set: lower bound exceeds upper bound on variable " + std::to_string(j));
    if (integral[j] && (!std::isfinite(lower[j]) || !std::isfinite(upper[j])))
      throw std::invalid_argument("feasible set: integral variable " + std::to_string(j) + " needs finite bounds");
  }
  for (const auto& row : linear) {
    if (row.coefs.size() != n_) throw std::invalid_argument("feasible set: linear row '" + row.name + "' has wrong width");
    for (double c : row.coefs)
      if (!std::isfinite(c)) throw std::invalid_argument("feasible set: non-finite coefficient");
    if (!std::isfinite(row.rhs)) throw std::invalid_argument("feasible set: non-finite right-hand side");
  }
  for (const auto& row : nonlinear) {
    int shared_extent = 0;
    std::map<int, int> extents;
    row.lhs.collect_extents(shared_extent, extents);
    for (const auto& [p, e] : extents) {
      if (owner < 0) throw std::invalid_argument("feasible set: shared-set constraint references a player variable");
      if (p != owner) throw std::invalid_argument("feasible set: constraint references another player's block");
      if (e > n) throw std::invalid_argument("feasible set: constraint references variable beyond n");
    }
    if (owner < 0 && shared_extent > n) throw std::invalid_argument("feasible set: shared index beyond n");
  }
}

bool FeasibleSet::depends_on_shared() const {
  if (owner < 0) return false;
  for (const auto& row : nonlinear)
    if (row.lhs.references_shared()) return true;
  return false;
}

bool FeasibleSet::all_integral() const {
  for (bool b : integral)
    if (!b) return false;
  return true;
}

bool FeasibleSet::any_integral() const {
  for (bool b : integral)
    if (b) return true;
  return false;
}

bool FeasibleSet::has_finite_bounds() const {
  for (int j = 0; j < n; ++j)
    if (!std::isfinite(lower[j]) || !std::isfinite(upper[j])) return false;
  return true;
}

double row_activity(std::span<const double> coefs, std::span<const double> v) {
  double s = 0.0;
  for (std::size_t j = 0; j < coefs.size(); ++j) s += coefs[j] * v[j];
  return s;
}

std::vector<Violation> FeasibleSet::violations(std::span<const double> v, std::span<const double> shared,
                                               const Tolerances& tol) const {
  std::vector<Violation> out;
  if (v.size() != static_cast<std::size_t>(n)) {
    out.push_back({"dimension mismatch", kInf});
    return out;
  }
  for (int j = 0; j < n; ++j) {
    if (!std::isfinite(v[j])) {
      out.push_back({"variable " + std::to_string(j) + " is not finite", kInf});
      continue;
    }
    if (v[j] < lower[j] - tol.linear) out.push_back({"lower bound of variable " + std::to_string(j), lower[j] - v[j]});
    if (v[j] > upper[j] + tol.linear) out.push_back({"upper bound of variable " + std::to_string(j), v[j] - upper[j]});
    if (integral[j] && std::abs(v[j] - std::round(v[j])) > tol.linear)
      out.push_back({"integrality of variable " + std::to_string(j), std::abs(v[j] - std::round(v[j]))});
  }
  for (std::size_t r = 0; r < linear.size(); ++r) {
    const auto& row = linear[r];
    const double act = row_activity(row.coefs, v) - row.rhs;
    const double res = row.sense == Sense::eq ? std::abs(act) : std::max(0.0, act);
    if (res > tol.linear)
      out.push_back({"linear row " + (row.name.empty() ? std::to_string(r) : row.name), res});
  }
  for (std::size_t r = 0; r < nonlinear.size(); ++r) {
    const auto& row = nonlinear[r];
    double val = 0.0;
    if (owner < 0)
      val = row.lhs.evaluate_local(v, -1, {});
    else
      val = row.lhs.evaluate_local(shared, owner, v);
    const double act = val - row.rhs;
    const double res = row.sense == Sense::eq ? std::abs(act) : std::max(0.0, act);
    if (res > tol.nonlinear)
      out.push_back({"nonlinear row " + (row.name.empty() ? std::to_string(r) : row.name), res});
  }
  return out;
}

}  // namespace gnep
