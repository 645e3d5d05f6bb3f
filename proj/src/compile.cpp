#include "gnep/compile.hpp"

#include <cmath>

namespace gnep {

ProblemBuilder::ProblemBuilder(int num_vars, std::function<int(VarRef)> column)
    : n_(num_vars),
      column_(std::move(column)),
      hessian_(Eigen::MatrixXd::Zero(num_vars, num_vars)),
      linear_(Eigen::VectorXd::Zero(num_vars)),
      lower_(Eigen::VectorXd::Constant(num_vars, -kInf)),
      upper_(Eigen::VectorXd::Constant(num_vars, kInf)),
      integral_(num_vars, false) {}

int ProblemBuilder::col(VarRef v) const {
  const int c = column_(v);
  if (c < 0 || c >= n_)
    throw StructureError("variable " + std::string(v.is_shared() ? "x" : "y" + std::to_string(v.player)) + "[" +
                         std::to_string(v.index) + "] is not a column of this problem");
  return c;
}

void ProblemBuilder::set_bounds(int c, double lo, double hi, bool integral) {
  lower_[c] = lo;
  upper_[c] = hi;
  integral_[c] = integral;
}

std::vector<NonlinearConstraint> ProblemBuilder::add_block(const FeasibleSet& set, int first) {
  for (int j = 0; j < set.n; ++j) set_bounds(first + j, set.lower[j], set.upper[j], set.integral[j]);
  for (const auto& row : set.linear) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n_);
    for (int j = 0; j < set.n; ++j) a[first + j] = row.coefs[j];
    add_row(a, row.sense, row.rhs);
  }
  return set.nonlinear;
}

void ProblemBuilder::add_objective(const Polynomial& p, double scale) {
  for (const auto& [m, c] : p.terms()) {
    const double v = scale * c;
    switch (m.size()) {
      case 0: constant_ += v; break;
      case 1: linear_[col(m[0])] += v; break;
      case 2: {
        const int a = col(m[0]);
        const int b = col(m[1]);
        // 0.5 v' H v reproduces v * m0 * m1.
        if (a == b) {
          hessian_(a, a) += 2.0 * v;
        } else {
          hessian_(a, b) += v;
          hessian_(b, a) += v;
        }
        quadratic_ = true;
        break;
      }
      default: throw StructureError("objective term of degree " + std::to_string(m.size()) + " > 2");
    }
  }
}

void ProblemBuilder::add_row(const Polynomial& lhs, Sense s, double rhs) {
  Eigen::VectorXd a = Eigen::VectorXd::Zero(n_);
  double b = rhs;
  for (const auto& [m, c] : lhs.terms()) {
    if (m.empty()) b -= c;
    else if (m.size() == 1) a[col(m[0])] += c;
    else throw StructureError("constraint is not linear in the problem variables");
  }
  add_row(a, s, b);
}

void ProblemBuilder::add_row(const Eigen::VectorXd& a, Sense s, double rhs) {
  rows_.push_back(a);
  rhs_.push_back(rhs);
  senses_.push_back(s);
}

void ProblemBuilder::add_square_link(const Polynomial& lhs, double rhs) {
  int square = -1;
  double k = 0.0;
  double b = rhs;
  std::vector<std::pair<int, double>> lin;
  for (const auto& [m, c] : lhs.terms()) {
    if (m.empty()) {
      b -= c;
    } else if (m.size() == 1) {
      lin.emplace_back(col(m[0]), c);
    } else if (m.size() == 2 && m[0] == m[1] && square < 0) {
      square = col(m[0]);
      k = c;
    } else {
      throw StructureError("equality is not of the form linear + k*f^2 = const");
    }
  }
  if (square < 0) throw StructureError("equality has no square term");
  for (const auto& [j, a] : lin)
    if (j == square) throw StructureError("squared variable also appears linearly");
  // linear + k f^2 = b  ->  (-sign(k)) * linear' ... normalised to  sum t v = |k| f^2.
  SquareLink l;
  l.var = square;
  l.coef = std::abs(k);
  const double sgn = k > 0 ? -1.0 : 1.0;
  for (const auto& [j, a] : lin) l.terms.emplace_back(j, sgn * a);
  if (b != 0.0) throw StructureError("square link with a nonzero constant is not supported");
  links_.push_back(std::move(l));
}

QpProblem ProblemBuilder::qp() const {
  QpProblem p;
  if (quadratic_) p.hessian = hessian_;
  p.linear = linear_;
  p.lower = lower_;
  p.upper = upper_;
  const int m = static_cast<int>(rows_.size());
  p.rows.resize(m, n_);
  p.rhs.resize(m);
  for (int r = 0; r < m; ++r) {
    p.rows.row(r) = rows_[r].transpose();
    p.rhs[r] = rhs_[r];
  }
  p.senses = senses_;
  return p;
}

MixedIntegerQp ProblemBuilder::miqp() const {
  if (!links_.empty()) throw StructureError("problem has square links; use the spatial solver");
  return {qp(), integral_};
}

SquareLinkProblem ProblemBuilder::square_link() const {
  if (quadratic_) throw StructureError("square-link problems need a linear objective");
  return {qp(), integral_, links_};
}

}  // namespace gnep
