#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gnep/feasible_set.hpp"
#include "gnep/miqp.hpp"
#include "gnep/spatial_bb.hpp"

namespace gnep {

/// Thrown when a polynomial does not fit the target problem class.
struct StructureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Lowers polynomials over VarRefs into dense problem data. `column` maps a
/// variable to its column, or -1 when the variable is not part of the problem
/// (an error if it appears).
class ProblemBuilder {
 public:
  ProblemBuilder(int num_vars, std::function<int(VarRef)> column);

  void set_bounds(int col, double lower, double upper, bool integral = false);
  /// Copies bounds/integrality and linear rows of a block whose variables are
  /// `first_col .. first_col + n - 1`. Nonlinear rows are returned untouched.
  std::vector<NonlinearConstraint> add_block(const FeasibleSet& set, int first_col);

  /// objective += scale * p  (degree <= 2).
  void add_objective(const Polynomial& p, double scale = 1.0);
  /// Linear row lhs (sense) rhs; lhs must have degree <= 1.
  void add_row(const Polynomial& lhs, Sense sense, double rhs);
  void add_row(const Eigen::VectorXd& coefs, Sense sense, double rhs);
  /// Square link from an equality row of the form  linear(v) + k * f^2 = rhs
  /// with k != 0.
  void add_square_link(const Polynomial& lhs, double rhs);

  int num_vars() const { return n_; }
  double objective_constant() const { return constant_; }
  bool has_quadratic() const { return quadratic_; }
  const std::vector<SquareLink>& links() const { return links_; }

  QpProblem qp() const;
  MixedIntegerQp miqp() const;
  SquareLinkProblem square_link() const;

 private:
  int col(VarRef v) const;

  int n_;
  std::function<int(VarRef)> column_;
  Eigen::MatrixXd hessian_;
  Eigen::VectorXd linear_;
  double constant_ = 0.0;
  bool quadratic_ = false;
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
  std::vector<bool> integral_;
  std::vector<Eigen::VectorXd> rows_;
  std::vector<double> rhs_;
  std::vector<Sense> senses_;
  std::vector<SquareLink> links_;
};

}  // namespace gnep
