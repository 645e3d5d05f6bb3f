#pragma once

#include <vector>

#include "gnep/game.hpp"

namespace gnep {

/// A player in the classical form: it owns block u_i and is parametric in
/// all other blocks. Expressions use player_var(j, .) for block u_j.
struct ClassicalPlayer {
  int n = 0;
  Expression objective;
  /// Bounds and integrality of the own block (owner == this player's index;
  /// its nonlinear rows may reference only the own block).
  FeasibleSet own;
  /// Rows of H_i that involve other blocks.
  std::vector<NonlinearConstraint> coupling;
};

struct ClassicalGame {
  std::vector<ClassicalPlayer> players;
  Tolerances tol;

  int num_players() const { return static_cast<int>(players.size()); }
  /// u in H_i for player i (own set and coupling rows).
  bool feasible_for(int i, std::span<const std::vector<double>> u) const;
};

/// Adds a feasibility player 0 over G (and X) with a constant-zero objective;
/// players 1..m keep their problems with x read from block 0.
ClassicalGame to_classical_gnep(const GameInstance& game);

/// Builds the shared-variable game with copy constraints x_i = y_i. X is the
/// box/integrality hull of each block, which leaves the equilibrium set
/// unchanged since x_i = y_i in G.
GameInstance from_classical_gnep(const ClassicalGame& classical);

/// Identification maps between the two point spaces.
std::vector<std::vector<double>> to_classical_point(const GamePoint& p);
GamePoint from_classical_point(const GameInstance& game, const std::vector<std::vector<double>>& u);

}  // namespace gnep
