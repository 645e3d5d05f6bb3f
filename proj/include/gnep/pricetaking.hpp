#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gnep/cga.hpp"
#include "gnep/expression.hpp"
#include "gnep/game.hpp"
#include "gnep/oracles.hpp"

namespace gnep {

/// g_i(x, y_i) = base(y_i) + sum_k x_k slopes[k](y_i).
struct PriceTakingPlayer {
  Polynomial base;
  std::vector<Polynomial> slopes;
};

/// A game whose G is exactly the balance {sum_i slopes_ik(y_i) = 0 for all k}.
struct PriceTakingGame {
  GameInstance game;
  std::vector<PriceTakingPlayer> players;
  /// Row of game.global_linear holding the balance of commodity k.
  std::vector<int> balance_row;

  int n0() const { return game.n0; }
};

struct Detection {
  std::optional<PriceTakingGame> ptg;
  std::string reason;  // first mismatch when rejected

  bool accepted() const { return ptg.has_value(); }
};

/// Never throws on structural mismatch; the reason names the first one.
/// X must be free or equal to the game's price box.
Detection detect_price_taking(const GameInstance& game);

struct BoundednessCheck {
  bool bounded = false;
  std::vector<int> unbounded_players;
  std::string message;
};

/// Throws std::runtime_error when an oracle fails outright.
BoundednessCheck verify_boundedness_at(const PriceTakingGame& ptg, std::span<const double> x,
                                       const std::vector<PlayerOracleBinding>& bindings);

// ---- primal ---------------------------------------------------------------------

struct PrimalOptions {
  double abs_gap = 1e-7;
  int max_nodes = 2000000;
  bool parallel = true;
};

struct PrimalResult {
  SolveStatus status = SolveStatus::failed;
  double value = 0.0;  // delta^P
  std::vector<std::vector<double>> y;
  bool certified = false;
  double lower_bound = 0.0;
  std::string method;  // "miqp" or "spatial_bb"
  double max_residual = 0.0;
  int nodes = 0;
  std::string message;
};

/// Global minimum of sum_i base_i(y_i) over the balance and the Y_i.
/// Quadratic-convex models go through assignment enumeration; models with
/// square-link equalities go through spatial branch-and-bound.
PrimalResult solve_primal(const PriceTakingGame& ptg, const PrimalOptions& options = {});

// ---- dual -----------------------------------------------------------------------

struct DualValue {
  /// sum_i g_i^*(x); -inf when some player is unbounded.
  ExtendedReal value = ExtendedReal::minus_infinity();
  std::vector<OracleResult> responses;
  std::vector<int> unbounded_players;
  bool ok = false;  // every oracle returned optimal or unbounded
  std::string message;
};

DualValue evaluate_dual(const PriceTakingGame& ptg, std::span<const double> x,
                        const std::vector<PlayerOracleBinding>& bindings, bool parallel = true);

struct DualOptions {
  double tol = 1e-6;  // stop when delta^{D,U} - best <= tol
  int max_iter = 2000;
  std::vector<double> x0;  // empty: zero prices (projected into the box)
  std::optional<PriceBox> box;  // default: the game's price box
  bool parallel = true;
  /// A price within this distance of a box edge counts as active.
  double edge_tol = 1e-6;
};

struct DualIteration {
  int iteration = 0;
  std::vector<double> x;
  double lp_value = 0.0;  // relaxed dual optimum delta^{D,U}_k
  double upper = 0.0;     // running min of lp_value
  double value = 0.0;     // dual function at x
  double best = 0.0;      // running best dual value
};

struct DualResult {
  SolveStatus status = SolveStatus::failed;
  double value = 0.0;  // best evaluated dual delta^D
  std::vector<double> x;
  double upper = 0.0;  // final delta^{D,U}
  /// Gap closed within tol; when false the best point is reported anyway.
  bool attained = false;
  bool box_edge_active = false;
  std::vector<int> active_edges;
  int iterations = 0;
  std::vector<DualIteration> trace;
  CutPool pool;
  std::vector<std::vector<double>> responses;  // Lagrangian minimizers at x
  double seconds = 0.0;
  std::string message;
};

/// Cutting-plane ascent on the dual: relaxed dual LP over (x in box, w),
/// alternated with dual evaluations at the LP's x.
DualResult dual_cutting_plane(const PriceTakingGame& ptg, const std::vector<PlayerOracleBinding>& bindings,
                              const DualOptions& options = {});

// ---- assembly -------------------------------------------------------------------

struct PrimalDualResult {
  double primal_value = 0.0;
  double dual_value = 0.0;
  double delta = 0.0;  // primal - dual
  GamePoint point;     // (x*, y*)
  std::vector<std::vector<double>> lagrangian_minimizers;
  bool equilibrium = false;
  bool dual_attained = false;
  /// Negative gap beyond tolerance: some subsolve was not global.
  bool negative_gap = false;
  std::optional<EquilibriumCheck> check;
  std::string message;
};

PrimalDualResult assemble_min_disequilibrium(const PriceTakingGame& ptg, const PrimalResult& primal,
                                             const DualResult& dual, const std::vector<PlayerOracleBinding>& bindings,
                                             double eps_eq = 1e-6, double gap_tol = 1e-6);

}  // namespace gnep
