#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gnep/active_set.hpp"

namespace gnep {

/// sum_t terms[t].second * v[terms[t].first] == coef * v[var]^2, coef > 0.
struct SquareLink {
  std::vector<std::pair<int, double>> terms;
  int var = 0;
  double coef = 1.0;

  double lhs(const Eigen::VectorXd& v) const;
  double residual(const Eigen::VectorXd& v) const { return lhs(v) - coef * v[var] * v[var]; }
};

/// min c'v  s.t. bounds, linear rows, integrality, square links. Every linked
/// variable needs finite bounds.
struct SquareLinkProblem {
  QpProblem lp;  // Hessian must be empty
  std::vector<bool> integral;
  std::vector<SquareLink> links;

  void validate() const;
};

struct SbbOptions {
  double abs_gap = 1e-7;
  double rel_gap = 1e-9;
  double link_tol = 1e-8;
  double lp_tol = 1e-9;
  int max_nodes = 200000;
  int cut_rounds = 40;
  /// Optional: turns a relaxation point into an exactly feasible one.
  std::function<std::optional<Eigen::VectorXd>(const Eigen::VectorXd&)> repair;
};

struct SbbResult {
  SolveStatus status = SolveStatus::failed;
  Eigen::VectorXd x;
  double objective = 0.0;
  double lower_bound = 0.0;
  int nodes = 0;
  int lp_solves = 0;
  /// True when the tree was exhausted: objective - lower_bound is within the gap.
  bool certified = false;
  std::string message;
};

/// Spatial branch-and-bound over an outer-approximation LP: tangent cuts on
/// the convex side of each link, secants over the node interval on the other,
/// branching on fractional integers and on linked variables.
SbbResult solve_square_link(const SquareLinkProblem& problem, const SbbOptions& options = {});

}  // namespace gnep
