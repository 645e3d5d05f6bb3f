#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gnep/active_set.hpp"
#include "gnep/extended_real.hpp"
#include "gnep/game.hpp"

namespace gnep {

/// Why an oracle value is a global optimum.
enum class CertificateKind {
  none,
  enumeration_complete,
  convexity_kkt,
  vertex_enumeration,
  branch_and_bound,
  external,
};

std::string to_string(CertificateKind k);

struct OracleResult {
  SolveStatus status = SolveStatus::failed;
  ExtendedReal value = ExtendedReal::plus_infinity();
  std::vector<double> minimizer;  // non-empty iff optimal
  CertificateKind certificate = CertificateKind::none;
  std::string detail;
  /// Worst primal residual of the minimizer (0 for enumeration).
  double residual = 0.0;

  bool optimal() const { return status == SolveStatus::optimal; }
};

enum class OracleKind { enumeration, box_lp, fixed_charge, mixed_binary_sep_qp, tree_transmission, custom };

std::string to_string(OracleKind k);
std::optional<OracleKind> oracle_kind_from_string(const std::string& s);

/// Player solve g_i^*(x) at a given shared point.
using PlayerSolveFn = std::function<OracleResult(std::span<const double> x)>;

/// An oracle bound to one player of one game, with its structure validated.
struct PlayerOracleBinding {
  int player = 0;
  OracleKind kind = OracleKind::enumeration;
  std::string name;
  PlayerSolveFn solve;
};

/// Factory registered under a name; `"oracle": "<name>"` in instance files
/// resolves here when the name is not built in.
using CustomOracleFactory = std::function<PlayerSolveFn(const GameInstance& game, int player)>;

void register_custom_oracle(const std::string& name, CustomOracleFactory factory);
bool has_custom_oracle(const std::string& name);

/// Picks a built-in oracle from the player's structure.
OracleKind auto_oracle_kind(const GameInstance& game, int player);

/// Validates the oracle's structural preconditions and returns the binding.
/// `name` is either a built-in kind, "auto", or a registered custom name.
/// Throws StructureError when the player does not fit.
PlayerOracleBinding bind_oracle(const GameInstance& game, int player, const std::string& name);
std::vector<PlayerOracleBinding> bind_all(const GameInstance& game);

/// Certified global minimum of g_i(x, .) over Y_i.
OracleResult solve_player(const GameInstance& game, int player, std::span<const double> x,
                          const PlayerOracleBinding& binding);

// Built-in oracles, callable directly.
OracleResult enumeration_oracle(const GameInstance& game, int player, std::span<const double> x);
OracleResult box_lp_oracle(const GameInstance& game, int player, std::span<const double> x);
OracleResult fixed_charge_oracle(const GameInstance& game, int player, std::span<const double> x);
OracleResult mixed_binary_sep_qp_oracle(const GameInstance& game, int player, std::span<const double> x);
OracleResult tree_transmission_oracle(const GameInstance& game, int player, std::span<const double> x);

/// Per-player cut pools Y_i^L.
struct CutPool {
  std::vector<std::vector<std::vector<double>>> points;

  int num_players() const { return static_cast<int>(points.size()); }
  /// Adds z to pool i; returns false for an exact duplicate.
  bool add(int player, std::vector<double> z);
  bool contains(int player, const std::vector<double>& z) const;
  std::size_t total() const;
};

/// Lower-bounding problem over (x, y, w), returning the flat minimizer
/// (x, y_0, ..., y_{m-1}, w).
using LowerBoundFn = std::function<OracleResult(const CutPool& pools)>;

/// Built-in lower-bounding solve: joint enumeration when every variable is
/// integral, otherwise enumeration of the integers with a convex QP in the
/// continuous variables (objectives of degree <= 2, cuts affine in x, linear
/// G, X and Y_i).
OracleResult solve_lower_bound(const GameInstance& game, const CutPool& pools);

struct ParallelOptions {
  bool parallel = true;
};

/// Solves every player at x; independent solves run concurrently.
std::vector<OracleResult> solve_players(const GameInstance& game, std::span<const double> x,
                                        const std::vector<PlayerOracleBinding>& bindings,
                                        const ParallelOptions& options = {});

}  // namespace gnep
