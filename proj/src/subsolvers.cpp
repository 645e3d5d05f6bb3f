#include "gnep/subsolvers.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gnep {

DenseLinearProgram DenseLinearProgram::with_vars(int n, Optimize sense) {
  DenseLinearProgram lp;
  lp.sense = sense;
  lp.objective = Eigen::VectorXd::Zero(n);
  lp.lower = Eigen::VectorXd::Constant(n, -kInf);
  lp.upper = Eigen::VectorXd::Constant(n, kInf);
  lp.rows.resize(0, n);
  lp.rhs.resize(0);
  return lp;
}

void DenseLinearProgram::add_row(const Eigen::VectorXd& coefs, Sense s, double b) {
  if (coefs.size() != num_vars()) throw std::invalid_argument("lp: row width mismatch");
  const int m = num_rows();
  rows.conservativeResize(m + 1, num_vars());
  rows.row(m) = coefs.transpose();
  rhs.conservativeResize(m + 1);
  rhs[m] = b;
  senses.push_back(s);
}

namespace {

QpProblem as_min_problem(const DenseLinearProgram& lp) {
  QpProblem p;
  p.linear = lp.sense == Optimize::maximize ? Eigen::VectorXd(-lp.objective) : lp.objective;
  p.lower = lp.lower;
  p.upper = lp.upper;
  p.rows = lp.rows;
  if (p.rows.rows() == 0) p.rows.resize(0, lp.num_vars());
  p.rhs = lp.rhs;
  p.senses = lp.senses;
  return p;
}

SubsolverResult from_qp_result(QpResult r, bool negate) {
  SubsolverResult out;
  out.status = r.status;
  out.x = std::move(r.x);
  out.row_duals = std::move(r.row_duals);
  out.ray = std::move(r.ray);
  out.value = negate ? -r.objective : r.objective;
  out.certificate = r.certificate;
  out.iterations = r.iterations;
  out.message = std::move(r.message);
  return out;
}

}  // namespace

void DenseLinearProgram::validate() const { as_min_problem(*this).validate(); }

DenseConvexQP::DenseConvexQP(Eigen::MatrixXd hessian, Eigen::VectorXd linear, Eigen::VectorXd lower,
                             Eigen::VectorXd upper, Eigen::MatrixXd rows, Eigen::VectorXd rhs,
                             std::vector<Sense> senses) {
  const auto n = linear.size();
  if (hessian.rows() != n || hessian.cols() != n) throw std::invalid_argument("qp: Hessian must be n x n");
  const double scale = std::max(1.0, hessian.cwiseAbs().maxCoeff());
  if ((hessian - hessian.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("qp: Hessian is not symmetric");
  if (n > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hessian, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-10 * scale)
      throw std::invalid_argument("qp: Hessian is not positive semidefinite (min eigenvalue " +
                                  std::to_string(eig.eigenvalues().minCoeff()) + ")");
  }
  problem_.hessian = std::move(hessian);
  problem_.linear = std::move(linear);
  problem_.lower = std::move(lower);
  problem_.upper = std::move(upper);
  problem_.rows = std::move(rows);
  if (problem_.rows.size() == 0) problem_.rows.resize(0, n);
  problem_.rhs = std::move(rhs);
  problem_.senses = std::move(senses);
  problem_.validate();
}

SubsolverResult solve_lp(const DenseLinearProgram& lp, double tol, const Eigen::VectorXd* start) {
  QpOptions opt;
  opt.tol = tol;
  opt.start = start;
  return from_qp_result(solve_active_set(as_min_problem(lp), opt), lp.sense == Optimize::maximize);
}

SubsolverResult solve_qp(const DenseConvexQP& qp, double tol, const Eigen::VectorXd* start) {
  QpOptions opt;
  opt.tol = tol;
  opt.start = start;
  return from_qp_result(solve_active_set(qp.problem(), opt), false);
}

std::string dump_tableau(const QpProblem& p) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "# gnep tableau\n";
  os << "vars " << p.num_vars() << " rows " << p.num_rows() << (p.is_linear() ? " lp" : " qp") << "\n";
  os << "c";
  for (int j = 0; j < p.num_vars(); ++j) os << ' ' << p.linear[j];
  os << "\nlo";
  for (int j = 0; j < p.num_vars(); ++j) os << ' ' << p.lower[j];
  os << "\nhi";
  for (int j = 0; j < p.num_vars(); ++j) os << ' ' << p.upper[j];
  os << "\n";
  if (!p.is_linear()) {
    for (int a = 0; a < p.num_vars(); ++a) {
      os << "H";
      for (int b = 0; b < p.num_vars(); ++b) os << ' ' << p.hessian(a, b);
      os << "\n";
    }
  }
  for (int r = 0; r < p.num_rows(); ++r) {
    os << "row";
    for (int j = 0; j < p.num_vars(); ++j) os << ' ' << p.rows(r, j);
    os << (p.senses[r] == Sense::eq ? " = " : " <= ") << p.rhs[r] << "\n";
  }
  return os.str();
}

QpProblem parse_tableau(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int n = -1, m = -1;
  bool quadratic = false;
  QpProblem p;
  int hrow = 0, row = 0;
  auto fail = [](const std::string& why) { throw std::invalid_argument("tableau: " + why); };
  auto read_vec = [&](std::istringstream& ls, Eigen::VectorXd& out) {
    out.resize(n);
    for (int j = 0; j < n; ++j) {
      std::string tok;
      if (!(ls >> tok)) fail("short vector");
      out[j] = std::stod(tok);  // accepts inf / -inf
    }
  };
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "vars") {
      std::string rows_kw, kind;
      ls >> n >> rows_kw >> m >> kind;
      if (!ls || rows_kw != "rows" || n < 0 || m < 0 || (kind != "lp" && kind != "qp")) fail("bad header");
      quadratic = kind == "qp";
      p.rows = Eigen::MatrixXd::Zero(m, n);
      p.rhs = Eigen::VectorXd::Zero(m);
      p.senses.assign(m, Sense::le);
      if (quadratic) p.hessian = Eigen::MatrixXd::Zero(n, n);
      continue;
    }
    if (n < 0) fail("data before header");
    if (key == "c") {
      read_vec(ls, p.linear);
    } else if (key == "lo") {
      read_vec(ls, p.lower);
    } else if (key == "hi") {
      read_vec(ls, p.upper);
    } else if (key == "H") {
      if (!quadratic || hrow >= n) fail("unexpected H row");
      Eigen::VectorXd h;
      read_vec(ls, h);
      p.hessian.row(hrow++) = h.transpose();
    } else if (key == "row") {
      if (row >= m) fail("too many rows");
      Eigen::VectorXd a;
      read_vec(ls, a);
      std::string sense, rhs;
      ls >> sense >> rhs;
      if (sense != "<=" && sense != "=") fail("bad row sense '" + sense + "'");
      p.rows.row(row) = a.transpose();
      p.senses[row] = sense == "=" ? Sense::eq : Sense::le;
      p.rhs[row] = std::stod(rhs);
      ++row;
    } else {
      fail("unknown line '" + key + "'");
    }
  }
  if (n < 0 || row != m || (quadratic && hrow != n)) fail("incomplete tableau");
  p.validate();
  return p;
}

std::uint64_t lattice_size(std::span<const double> lower, std::span<const double> upper) {
  std::uint64_t total = 1;
  for (std::size_t j = 0; j < lower.size(); ++j) {
    const double lo = std::ceil(lower[j]);
    const double hi = std::floor(upper[j]);
    if (!std::isfinite(lo) || !std::isfinite(hi)) return std::numeric_limits<std::uint64_t>::max();
    if (hi < lo) return 0;
    const double count = hi - lo + 1.0;
    if (count > 1e18 || static_cast<double>(total) * count > 1.8e19) return std::numeric_limits<std::uint64_t>::max();
    total *= static_cast<std::uint64_t>(count);
  }
  return total;
}

EnumerationResult enumerate_assignments(const FeasibleSet& set, std::span<const double> shared,
                                        const std::function<double(std::span<const double>)>& objective,
                                        const EnumerationOptions& options) {
  set.validate();
  EnumerationResult res;
  if (!set.all_integral()) {
    res.message = "enumeration requires every variable to be integral";
    return res;
  }
  const std::uint64_t size = lattice_size(set.lower, set.upper);
  if (size > options.cap) {
    res.message = "lattice of " + std::to_string(size) + " points exceeds the enumeration cap " +
                  std::to_string(options.cap) + "; bind a custom oracle for this player";
    return res;
  }
  const int n = set.n;
  std::vector<double> lo(n), hi(n), v(n);
  for (int j = 0; j < n; ++j) {
    lo[j] = std::ceil(set.lower[j] - 1e-9);
    hi[j] = std::floor(set.upper[j] + 1e-9);
  }
  bool found = false;
  double best = kInf;
  std::vector<double> best_v;
  const Tolerances tol;
  auto better = [&](double val) { return !found || val < best - 1e-12 * (1.0 + std::abs(best)); };

  // Depth-first in lexicographic order; prefix bounds are checked on entry.
  std::function<void(int)> visit = [&](int depth) {
    if (depth == n) {
      ++res.visited;
      if (!set.contains(v, shared, tol)) return;
      const double val = objective(v);
      if (better(val)) {
        found = true;
        best = val;
        best_v = v;
      }
      return;
    }
    for (double t = lo[depth]; t <= hi[depth]; t += 1.0) {
      v[depth] = t;
      if (options.prune_bound && found) {
        const double bound = options.prune_bound(std::span<const double>(v.data(), depth + 1), depth + 1);
        if (bound > best + 1e-12 * (1.0 + std::abs(best))) continue;
      }
      visit(depth + 1);
    }
  };
  if (size > 0) visit(0);
  if (!found) {
    res.status = SolveStatus::infeasible;
    res.message = "no lattice point satisfies the constraints";
    return res;
  }
  res.status = SolveStatus::optimal;
  res.assignment = std::move(best_v);
  res.value = best;
  return res;
}

}  // namespace gnep
