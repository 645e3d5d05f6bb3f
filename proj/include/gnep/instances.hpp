#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gnep/classical.hpp"
#include "gnep/game.hpp"

namespace gnep {

// ---- bundled games ----------------------------------------------------------

/// Two discretely-constrained Cournot players in copy form: g_1 = -y_1 - x_2,
/// g_2 = -y_2 - x_1, Y_i = [0, 1.1] ∩ Z, G = {x_1 = y_1, x_2 = y_2}.
/// X = ([0, 1.1] ∩ Z)^2, which G makes equivalent to a free X.
GameInstance cournot_game();

struct UcProducer {
  double a, c, b, cap_lo, cap_hi;
};

struct UcData {
  std::vector<UcProducer> producers;
  double alpha = 200.0;
  double beta = 0.2;
};

UcData uc_data();
/// Single-period unit commitment: x = (x^p, x^q), y_i = (y^b_i, y^c_i).
GameInstance unit_commitment_game(const UcData& data = uc_data());

struct GasArc {
  int from, to;  // 1-based node labels
  double weymouth;
};
struct GasSupply {
  int node;
  double capacity, cost;
};
struct GasDemand {
  int node;
  double capacity, utility, fixed_cost;
};

struct GasData {
  int nodes = 20;
  std::vector<GasArc> arcs;
  std::vector<GasSupply> supplies;
  std::vector<GasDemand> demands;
  double pressure_lo = 900.0;
  double pressure_hi = 4900.0;
  double price_lo = 0.0;
  double price_hi = 12.1;
};

GasData gas_data();

/// Gas network price equilibrium. Players: 0 = transmission with
/// y = (p_1..p_N, f_1..f_A); then one supply player per supply node with
/// y = (y^s); then one demand player per demand node with y = (y^d, y^b).
GameInstance gas_network_game(const GasData& data = gas_data());

/// Index of the first supply / demand player in gas_network_game.
inline int gas_first_supply_player() { return 1; }
inline int gas_first_demand_player(const GasData& d) { return 1 + static_cast<int>(d.supplies.size()); }

// ---- expectations ------------------------------------------------------------

enum class Provenance { published, derived };

std::string to_string(Provenance p);

struct Expectation {
  std::string name;
  std::vector<double> values;
  double tolerance = 0.0;
  Provenance provenance = Provenance::published;
  std::string citation;
};

struct ExpectedValues {
  std::string instance;
  std::vector<Expectation> entries;

  const Expectation& at(const std::string& name) const;
  bool has(const std::string& name) const;
};

ExpectedValues expected_cournot();
ExpectedValues expected_uc();
ExpectedValues expected_gas();

/// Gas solution point assembled from the published solution tables
/// (expectation only; never used as solver input).
GamePoint gas_published_point(const GasData& data = gas_data());

// ---- random finite games ----------------------------------------------------

struct RandomFiniteGameSpec {
  int players = 2;          // 1..3
  int max_strategies = 6;   // |Y_i| <= max_strategies
  int max_grid = 20;        // |X lattice| <= max_grid
  int coef_range = 4;       // integer coefficients in [-coef_range, coef_range]
  bool singleton_strategies = false;
  std::uint64_t seed = 1;
};

/// Fully enumerable game with integral x and y and a nonempty joint feasible
/// set; deterministic in the seed.
GameInstance generate_random_finite_game(const RandomFiniteGameSpec& spec);

struct BruteForceResult {
  bool feasible = false;
  double delta = 0.0;
  std::vector<GamePoint> argmin;        // minimizers of (md)
  std::vector<GamePoint> equilibria;    // points with every gap <= tol
  std::uint64_t points = 0;
};

/// Exact (md) by enumerating every joint lattice point; g_i^*(x) by inner
/// enumeration over {y_i : (x, y_i) in F_i}. Works for x-dependent F_i.
BruteForceResult brute_force_md(const GameInstance& game, std::uint64_t cap = 1000000, double tol = 1e-9);

/// Equilibria of an all-integral classical game by enumeration.
std::vector<std::vector<std::vector<double>>> brute_force_classical_equilibria(const ClassicalGame& game,
                                                                               std::uint64_t cap = 1000000,
                                                                               double tol = 1e-9);

// ---- random convex price-taking games --------------------------------------

struct RandomPriceTakingSpec {
  int commodities = 2;  // 1..3
  int extra_players = 2;
  double price_hi = 20.0;
  std::uint64_t seed = 1;
};

/// Linear objectives, box sets, balance constraints; every commodity has a
/// producer and a consumer so equilibrium prices lie inside the price box.
/// X equals the price box.
GameInstance generate_random_price_taking_game(const RandomPriceTakingSpec& spec);

/// Producer/consumer toy: capacities `cap`, production cost `cost`, utility
/// `utility`, one commodity, price box [0, price_hi].
GameInstance producer_consumer_toy(double cap = 1.0, double cost = 1.0, double utility = 2.0,
                                   double consumer_min = 0.0, double price_hi = 10.0);

}  // namespace gnep
