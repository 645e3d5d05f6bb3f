#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gnep/game.hpp"
#include "gnep/oracles.hpp"

namespace gnep {

enum class RunStatus {
  equilibrium_found,
  md_exact,
  md_eps_optimal,
  no_equilibrium_certified,
  iteration_limit,
  oracle_failure,
};

std::string to_string(RunStatus s);  // EQUILIBRIUM_FOUND, ...
std::optional<RunStatus> run_status_from_string(const std::string& s);

enum class IterationAction { exact_exit, cut_added, eps_exit, certified_no_equilibrium, aborted };

std::string to_string(IterationAction a);
std::optional<IterationAction> iteration_action_from_string(const std::string& s);

// ---- pools --------------------------------------------------------------------

struct PoolInit {
  enum class Strategy { user_points, solve_at_x0 };
  Strategy strategy = Strategy::solve_at_x0;
  std::vector<std::vector<std::vector<double>>> points;  // user_points: per player
  std::vector<double> x0;                                  // solve_at_x0; empty = projection of 0 onto X
};

/// Seeds Y_i^L. Throws std::invalid_argument for bad data and
/// std::runtime_error when an oracle fails during seeding.
CutPool initialize_pools(const GameInstance& game, const std::vector<PlayerOracleBinding>& bindings,
                         const PoolInit& init);

// ---- run ------------------------------------------------------------------------

struct IterationRecord {
  int iteration = 0;
  double lower = 0.0;  // delta^L of this LBP
  std::vector<double> best_response_value;  // g_i^*(x)
  std::vector<std::vector<double>> best_response;  // z_i
  GamePoint candidate;
  std::vector<double> w;
  double candidate_value = 0.0;  // sum_i g_i(x, y_i) - g_i^*(x)
  double upper = 0.0;            // delta^U after this iteration (+inf while none)
  IterationAction action = IterationAction::cut_added;
};

struct RunOptions {
  double eps = 1e-6;
  double eps_cert = 1e-6;
  double eps_eq = 1e-6;
  int max_iter = 500;
  /// Stop as soon as delta^L > eps_cert (equilibrium existence only).
  bool existence_only = false;
  bool parallel = true;
  /// Replaces the built-in lower-bounding solve.
  LowerBoundFn lower_bound;
};

struct SolveReport {
  RunStatus status = RunStatus::oracle_failure;
  /// delta^L > eps_cert was observed; reported alongside MD_* statuses.
  bool no_equilibrium_certified = false;
  bool has_point = false;
  GamePoint point;
  std::vector<double> gaps;  // per player at `point`
  double delta_lower = -std::numeric_limits<double>::infinity();
  double delta_upper = std::numeric_limits<double>::infinity();
  std::vector<double> lower_sequence;
  std::vector<double> upper_sequence;
  std::vector<IterationRecord> trace;
  CutPool pools;
  int iterations = 0;
  long oracle_calls = 0;
  long lower_bound_calls = 0;
  double seconds = 0.0;
  double eps = 0.0, eps_cert = 0.0, eps_eq = 0.0;
  std::string message;

  /// delta of the returned point when one exists.
  double delta() const { return delta_upper; }
};

/// Constraint generation for the minimum-disequilibrium problem with mu = sum
/// and constant feasible sets.
SolveReport run(const GameInstance& game, const std::vector<PlayerOracleBinding>& bindings, CutPool pools,
                const RunOptions& options = {});

// ---- equilibrium check --------------------------------------------------------

struct EquilibriumCheck {
  bool is_equilibrium = false;
  bool feasible = false;
  double max_residual = 0.0;
  std::vector<ExtendedReal> gaps;
  std::vector<double> best_response_value;
  ExtendedReal delta;  // sum of gaps
  std::string message;
};

EquilibriumCheck certify_equilibrium(const GameInstance& game, const GamePoint& point,
                                     const std::vector<PlayerOracleBinding>& bindings, double eps_eq = 1e-6);

/// Step-5 feasibility tolerance: 1e-7 (1 + |g^*|).
inline double exact_exit_tolerance(double g_star) { return 1e-7 * (1.0 + std::abs(g_star)); }

}  // namespace gnep
