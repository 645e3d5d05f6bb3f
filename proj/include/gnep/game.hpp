#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gnep/expression.hpp"
#include "gnep/extended_real.hpp"
#include "gnep/feasible_set.hpp"

namespace gnep {

/// Aggregation of per-player optimality gaps into one disequilibrium value.
struct MuMeasure {
  enum class Kind { sum, weighted_sum, max };
  Kind kind = Kind::sum;
  std::vector<double> weights;  // weighted_sum only, all > 0

  static MuMeasure sum() { return {}; }
  static MuMeasure max() { return {Kind::max, {}}; }
  static MuMeasure weighted(std::vector<double> w) { return {Kind::weighted_sum, std::move(w)}; }

  void validate(std::size_t players) const;
  /// Applies the measure; +inf components propagate. -inf components are
  /// rejected since gaps are nonnegative by construction.
  ExtendedReal apply(std::span<const ExtendedReal> gaps) const;
  double apply(std::span<const double> gaps) const;
};

/// Objective of the form base(y_i) + sum_k x_k slopes[k](y_i).
struct PriceTakingForm {
  Expression base;
  std::vector<Expression> slopes;  // one per shared coordinate
};

struct Player {
  int id = 0;
  int n = 0;
  Expression objective;     // over (x, y_id)
  FeasibleSet feasible_set; // owner == id
  std::string oracle = "auto";
  std::optional<PriceTakingForm> price_taking_form;

  bool depends_on_shared_feasibility() const { return feasible_set.depends_on_shared(); }
};

struct PriceBox {
  std::vector<double> lower;
  std::vector<double> upper;
};

/// A game in shared-variable form: players parametric in x, a global
/// constraint set G over (x, y), a shared set X, and a disequilibrium measure.
struct GameInstance {
  std::string name;
  int n0 = 0;
  FeasibleSet shared_set;  // X, owner == -1
  std::vector<Player> players;
  /// G: linear rows over the concatenation (x, y_0, ..., y_{m-1}).
  std::vector<LinearConstraint> global_linear;
  /// G: nonlinear rows over shared_var / player_var.
  std::vector<NonlinearConstraint> global_nonlinear;
  MuMeasure mu;
  Tolerances tol;
  std::optional<PriceBox> price_box;

  int num_players() const { return static_cast<int>(players.size()); }
  int total_dimension() const;
  /// Offset of y_i in the concatenation (x, y).
  int block_offset(int player) const;

  void validate() const;
  bool has_constant_feasible_sets() const;
};

struct GamePoint {
  std::vector<double> x;
  std::vector<std::vector<double>> y;

  std::vector<double> flatten() const;
  static GamePoint unflatten(const GameInstance& game, std::span<const double> v);
  bool operator==(const GamePoint&) const = default;
};

void check_dimensions(const GameInstance& game, const GamePoint& point);

double evaluate_player_objective(const GameInstance& game, int player, const GamePoint& point);
/// g_i(x, z) for an arbitrary block z of player i.
double evaluate_player_objective(const GameInstance& game, int player, std::span<const double> x,
                                 std::span<const double> z);

struct FeasibilityReport {
  std::vector<Violation> violations;
  bool feasible() const { return violations.empty(); }
  double max_residual() const;
};

/// Joint membership test: x in X, y_i in Y_i (F_i), (x, y) in G.
FeasibilityReport check_point_feasible(const GameInstance& game, const GamePoint& point);
FeasibilityReport check_point_feasible(const GameInstance& game, const GamePoint& point, const Tolerances& tol);

/// mu(g(x,y) - g*(x)). Throws std::domain_error if a gap is negative beyond
/// 1e-7 (1 + |g*_i|), which means an optimal value was not global.
double disequilibrium_value(const GameInstance& game, const GamePoint& point,
                            std::span<const ExtendedReal> player_opt_values);

/// Nikaido-Isoda aggregate sum_i g_i(x,y_i) - sum_i g*_i(x). Requires mu = sum.
double ni_phi(const GameInstance& game, const GamePoint& point, std::span<const ExtendedReal> player_opt_values);

/// Per-player objective polynomials (cached expansions are not kept; callers
/// that loop should hold on to the result).
std::vector<Polynomial> expand_objectives(const GameInstance& game);

}  // namespace gnep
