#include <cmath>
#include <random>

#include "doctest.h"
#include "gnep/instances.hpp"
#include "gnep/pricetaking.hpp"

using namespace gnep;

namespace {

PriceTakingGame accept(const GameInstance& g) {
  auto d = detect_price_taking(g);
  REQUIRE_MESSAGE(d.accepted(), d.reason);
  return *d.ptg;
}

// One player, objective y on [0, 1], a price nobody responds to.
GameInstance unpriced_game() {
  GameInstance g;
  g.name = "unpriced";
  g.n0 = 1;
  g.shared_set = FeasibleSet::box(-1, {0.0}, {5.0});
  g.price_box = PriceBox{{0.0}, {5.0}};
  Player p;
  p.id = 0;
  p.n = 1;
  p.objective = Expression::player_var(0, 0);
  p.feasible_set = FeasibleSet::box(0, {0.0}, {1.0});
  g.players.push_back(p);
  return g;
}

}  // namespace

TEST_CASE("detection") {
  const auto gas = detect_price_taking(gas_network_game());
  CHECK(gas.accepted());
  const auto cournot = detect_price_taking(cournot_game());
  CHECK_FALSE(cournot.accepted());
  CHECK_FALSE(cournot.reason.empty());
  const auto uc = detect_price_taking(unit_commitment_game());
  CHECK_FALSE(uc.accepted());
  MESSAGE("unit commitment rejected: " << uc.reason);

  const auto toy = accept(producer_consumer_toy());
  REQUIRE(toy.players.size() == 2);
  const std::vector<std::vector<double>> y{{0.7}, {0.3}};
  CHECK(toy.players[0].slopes[0].evaluate({}, y) == doctest::Approx(-0.7));
  CHECK(toy.players[1].slopes[0].evaluate({}, y) == doctest::Approx(0.3));
}

TEST_CASE("objective cancellation on the gas game") {
  const auto ptg = accept(gas_network_game());
  const auto& g = ptg.game;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int t = 0; t < 50; ++t) {
    GamePoint pt;
    for (int k = 0; k < g.n0; ++k) pt.x.push_back(u(rng));
    for (const auto& p : g.players) {
      std::vector<double> y(p.n);
      for (auto& v : y) v = u(rng);
      pt.y.push_back(y);
    }
    // sum_i g_i - sum_i base_i = sum_k x_k * (balance row k activity)
    double lhs = 0.0;
    for (int i = 0; i < g.num_players(); ++i)
      lhs += evaluate_player_objective(g, i, pt) - ptg.players[i].base.evaluate(pt.x, pt.y);
    const auto flat = pt.flatten();
    double rhs = 0.0;
    for (int k = 0; k < g.n0; ++k) {
      const auto& row = g.global_linear[ptg.balance_row[k]];
      rhs += pt.x[k] * (row_activity(row.coefs, flat) - row.rhs);
    }
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("boundedness") {
  const auto gas = accept(gas_network_game());
  const auto b = bind_all(gas.game);
  CHECK(verify_boundedness_at(gas, std::vector<double>(20, 0.0), b).bounded);
  CHECK(verify_boundedness_at(gas, expected_gas().at("prices").values, b).bounded);

  auto open = producer_consumer_toy();
  open.players[0].feasible_set.upper[0] = kInf;
  const auto ptg = accept(open);
  const auto ob = bind_all(open);
  const auto r = verify_boundedness_at(ptg, std::vector<double>{5.0}, ob);
  CHECK_FALSE(r.bounded);
  CHECK(r.unbounded_players == std::vector<int>{0});
}

TEST_CASE("producer/consumer toy") {
  const auto toy = accept(producer_consumer_toy());
  const auto p = solve_primal(toy);
  REQUIRE(p.status == SolveStatus::optimal);
  CHECK(p.value == doctest::Approx(-1.0));
  CHECK(p.y[0][0] == doctest::Approx(1.0));
  CHECK(p.y[1][0] == doctest::Approx(1.0));

  // no production but a mandatory purchase
  auto g = producer_consumer_toy(1.0, 1.0, 2.0, 0.5);
  g.players[0].feasible_set.upper[0] = 0.0;
  CHECK(solve_primal(accept(g)).status == SolveStatus::infeasible);
}

TEST_CASE("unique price recovered by the cutting plane") {
  // producer capacity 2 at cost 1, consumer capacity 1 at utility 2:
  // dual = x - 2 below 1 and -x above, so the price is 1 and delta^D = -1
  const auto toy = accept(producer_consumer_toy(1.0, 1.0, 2.0));
  auto g = toy.game;
  g.players[0].feasible_set.upper[0] = 2.0;
  const auto ptg = accept(g);
  const auto b = bind_all(g);
  DualOptions o;
  o.tol = 1e-9;
  const auto d = dual_cutting_plane(ptg, b, o);
  REQUIRE(d.status == SolveStatus::optimal);
  CHECK(d.attained);
  CHECK(d.x[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(d.value == doctest::Approx(-1.0));
  const auto p = solve_primal(ptg);
  const auto a = assemble_min_disequilibrium(ptg, p, d, b);
  CHECK(a.delta == doctest::Approx(0.0));
  CHECK(a.equilibrium);
}

TEST_CASE("constant dual function stops after one iteration") {
  const auto g = unpriced_game();
  const auto ptg = accept(g);
  const auto d = dual_cutting_plane(ptg, bind_all(g));
  CHECK(d.status == SolveStatus::optimal);
  CHECK(d.iterations == 1);
  CHECK(d.value == 0.0);
}

TEST_CASE("gas primal and dual") {
  const auto gas = accept(gas_network_game());
  const auto b = bind_all(gas.game);
  const auto e = expected_gas();
  const double target = e.at("primal_value").values[0];

  const auto at_published = evaluate_dual(gas, e.at("prices").values, b);
  CHECK(std::abs(at_published.value.value() - target) <= 0.01);
  CHECK(evaluate_dual(gas, std::vector<double>(20, 0.0), b).value.value() == doctest::Approx(-320.135));

  const auto p = solve_primal(gas);
  REQUIRE(p.status == SolveStatus::optimal);
  CHECK(p.certified);
  CHECK(p.method == "spatial_bb");
  CHECK(std::abs(p.value - target) <= 0.01);
  GamePoint pt{e.at("prices").values, p.y};
  const auto fr = check_point_feasible(gas.game, pt);
  CHECK(fr.feasible());
  CHECK(fr.max_residual() <= 1e-6);

  // weak duality on random price vectors
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 12.1);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> x(20);
    for (auto& v : x) v = u(rng);
    CHECK(evaluate_dual(gas, x, b).value.value() <= p.value + 1e-9 * (1.0 + std::abs(p.value)));
  }
}

TEST_CASE("published gas point") {
  const auto d = gas_data();
  const auto g = gas_network_game(d);
  const auto pt = gas_published_point(d);
  const auto fr = check_point_feasible(g, pt);
  // Tables are rounded to 3 decimals for flows and 0.1 for pressures.
  double worst_balance = 0.0, worst_weymouth = 0.0;
  for (const auto& v : fr.violations) {
    if (v.what.find("balance") != std::string::npos) worst_balance = std::max(worst_balance, v.residual);
    if (v.what.find("weymouth") != std::string::npos) worst_weymouth = std::max(worst_weymouth, v.residual);
  }
  MESSAGE("published point: worst balance residual " << worst_balance);
  CHECK(worst_balance <= 1e-2);
  MESSAGE("published point: worst Weymouth residual " << worst_weymouth);
  CHECK(worst_weymouth <= 1.0);
}

TEST_CASE("random convex price-taking games: zero duality gap and certified prices") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    RandomPriceTakingSpec spec;
    spec.seed = seed;
    spec.commodities = 1 + static_cast<int>(seed % 3);
    const auto g = generate_random_price_taking_game(spec);
    const auto ptg = accept(g);
    const auto b = bind_all(g);
    const auto p = solve_primal(ptg);
    REQUIRE(p.status == SolveStatus::optimal);
    DualOptions o;
    o.tol = 1e-9;
    const auto d = dual_cutting_plane(ptg, b, o);
    CAPTURE(seed);
    CAPTURE(d.message);
    REQUIRE(d.status == SolveStatus::optimal);
    CHECK(p.value - d.value <= 1e-6);
    CHECK(p.value - d.value >= -1e-6);
    const auto a = assemble_min_disequilibrium(ptg, p, d, b);
    CHECK(a.equilibrium);
  }
}
