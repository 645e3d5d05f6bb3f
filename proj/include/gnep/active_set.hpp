#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gnep/feasible_set.hpp"

namespace gnep {

enum class SolveStatus { optimal, infeasible, unbounded, failed };

std::string to_string(SolveStatus s);

/// Optimality evidence attached to every solve. For `optimal`, all residuals
/// are within the requested tolerance.
struct Certificate {
  double primal_residual = 0.0;   // max bound / row violation
  double dual_residual = 0.0;     // stationarity + dual sign violation
  double complementarity = 0.0;   // max |multiplier * slack|
  double objective = 0.0;
  double dual_objective = 0.0;
};

/// min 0.5 v'Hv + c'v  s.t.  lower <= v <= upper,  rows_r v (<= | =) rhs_r.
/// An empty Hessian means a linear program.
struct QpProblem {
  Eigen::MatrixXd hessian;
  Eigen::VectorXd linear;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  Eigen::MatrixXd rows;
  Eigen::VectorXd rhs;
  std::vector<Sense> senses;

  int num_vars() const { return static_cast<int>(linear.size()); }
  int num_rows() const { return static_cast<int>(rhs.size()); }
  bool is_linear() const { return hessian.size() == 0; }
  void validate() const;
};

struct QpOptions {
  double tol = 1e-9;
  int max_iterations = 0;  // 0: automatic
  /// Optional starting point; it need not be feasible.
  const Eigen::VectorXd* start = nullptr;
};

struct QpResult {
  SolveStatus status = SolveStatus::failed;
  Eigen::VectorXd x;
  /// Row multipliers: >= 0 on inequality rows, free on equality rows.
  Eigen::VectorXd row_duals;
  /// Reduced costs z = Hx + c + rows' * row_duals; z >= 0 at a lower bound,
  /// z <= 0 at an upper bound, 0 for free variables.
  Eigen::VectorXd reduced_costs;
  /// Unbounded: a feasible descent ray. Infeasible: phase-one row weights
  /// (equality rows contribute their signed difference).
  Eigen::VectorXd ray;
  double objective = 0.0;
  Certificate certificate;
  int iterations = 0;
  std::string message;
};

/// Primal active-set method with a phase-one feasibility LP. Handles
/// positive-semidefinite Hessians (including zero) through eigen-split steps in
/// the working-set null space; reports `failed` on detected negative curvature
/// or iteration exhaustion, never a wrong `optimal`.
QpResult solve_active_set(const QpProblem& problem, const QpOptions& options = {});

/// Residuals of a candidate primal-dual pair, computed from the data alone.
Certificate evaluate_certificate(const QpProblem& problem, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& row_duals);

}  // namespace gnep
