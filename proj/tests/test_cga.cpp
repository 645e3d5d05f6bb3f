#include <cmath>

#include "doctest.h"
#include "gnep/cga.hpp"
#include "gnep/instances.hpp"

using namespace gnep;

namespace {

PoolInit user(std::vector<std::vector<std::vector<double>>> pts) {
  PoolInit p;
  p.strategy = PoolInit::Strategy::user_points;
  p.points = std::move(pts);
  return p;
}

void check_monotone(const SolveReport& r) {
  for (std::size_t k = 1; k < r.lower_sequence.size(); ++k) CHECK(r.lower_sequence[k] >= r.lower_sequence[k - 1]);
  for (std::size_t k = 1; k < r.upper_sequence.size(); ++k) CHECK(r.upper_sequence[k] <= r.upper_sequence[k - 1]);
  for (const auto& rec : r.trace) CHECK(rec.lower <= rec.upper + 1e-9);
}

}  // namespace

TEST_CASE("cournot terminates in one iteration at the equilibrium") {
  const auto g = cournot_game();
  const auto b = bind_all(g);
  const auto pools = initialize_pools(g, b, user({{{0.0}}, {{0.0}}}));
  CHECK(pools.points == std::vector<std::vector<std::vector<double>>>{{{0.0}}, {{0.0}}});
  const auto r = run(g, b, pools);
  CHECK(r.status == RunStatus::equilibrium_found);
  CHECK(r.iterations == 1);
  REQUIRE(r.trace.size() == 1);
  CHECK(r.trace[0].lower == -2.0);
  CHECK(r.trace[0].upper == 0.0);
  CHECK(r.delta() == 0.0);
  CHECK(r.point.x == std::vector<double>{1, 1});
  CHECK(r.point.y == std::vector<std::vector<double>>{{1}, {1}});
  CHECK_FALSE(r.no_equilibrium_certified);
}

TEST_CASE("cournot equilibrium check") {
  const auto g = cournot_game();
  const auto b = bind_all(g);
  const auto good = certify_equilibrium(g, GamePoint{{1, 1}, {{1}, {1}}}, b);
  CHECK(good.is_equilibrium);
  CHECK(good.gaps[0] == ExtendedReal::finite(0.0));
  const auto bad = certify_equilibrium(g, GamePoint{{0, 0}, {{0}, {0}}}, b);
  CHECK_FALSE(bad.is_equilibrium);
  CHECK(bad.feasible);
  CHECK(bad.gaps[0].value() == doctest::Approx(1.0));
  CHECK(bad.gaps[1].value() == doctest::Approx(1.0));
}

TEST_CASE("unit commitment minimum disequilibrium") {
  const auto g = unit_commitment_game();
  const auto b = bind_all(g);
  PoolInit init;
  init.x0 = {180.0, 100.0};
  const auto pools = initialize_pools(g, b, init);
  for (const auto& p : pools.points) CHECK(p.size() == 1);
  const auto r = run(g, b, pools);
  const auto e = expected_uc();
  CHECK(r.status == RunStatus::md_exact);
  CHECK(r.no_equilibrium_certified);
  CHECK(r.delta() == doctest::Approx(e.at("delta").values[0]).epsilon(0.01 / 931.41));
  CHECK(r.delta_lower == doctest::Approx(r.delta()).epsilon(1e-6));
  CHECK(r.iterations <= 10);
  for (int k = 0; k < 2; ++k) CHECK(std::abs(r.point.x[k] - e.at("x").values[k]) <= 1e-6);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) CHECK(std::abs(r.point.y[i][j] - e.at("y").values[2 * i + j]) <= 1e-4);
  check_monotone(r);
  MESSAGE("uc iterations: " << r.iterations);
  const auto cert = certify_equilibrium(g, r.point, b);
  CHECK_FALSE(cert.is_equilibrium);
  CHECK(cert.delta.value() == doctest::Approx(931.40625));
}

TEST_CASE("existence-only run stops at the certificate") {
  const auto g = unit_commitment_game();
  const auto b = bind_all(g);
  PoolInit init;
  init.x0 = {180.0, 100.0};
  RunOptions o;
  o.existence_only = true;
  const auto r = run(g, b, initialize_pools(g, b, init), o);
  if (r.status == RunStatus::no_equilibrium_certified) {
    CHECK(r.delta_lower > o.eps_cert);
  } else {
    // The first lower bound may be negative; then the run finishes normally.
    CHECK(r.status == RunStatus::md_exact);
  }
}

TEST_CASE("pools containing the best responses exit at iteration 1") {
  const auto g = cournot_game();
  const auto b = bind_all(g);
  const auto r = run(g, b, initialize_pools(g, b, user({{{0.0}, {1.0}}, {{0.0}, {1.0}}})));
  CHECK(r.iterations == 1);
  CHECK(r.trace[0].action == IterationAction::exact_exit);
  CHECK(r.status == RunStatus::equilibrium_found);
}

TEST_CASE("random finite games agree with brute force") {
  int with_eq = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    RandomFiniteGameSpec spec;
    spec.seed = seed;
    spec.players = 1 + static_cast<int>(seed % 3);
    const auto g = generate_random_finite_game(spec);
    const auto bf = brute_force_md(g);
    REQUIRE(bf.feasible);
    const auto b = bind_all(g);
    const auto r = run(g, b, initialize_pools(g, b, PoolInit{}));
    CAPTURE(seed);
    REQUIRE(r.has_point);
    CHECK(std::abs(r.delta() - bf.delta) <= 1e-6);
    CHECK((r.status == RunStatus::equilibrium_found) == !bf.equilibria.empty());
    check_monotone(r);
    with_eq += bf.equilibria.empty() ? 0 : 1;
  }
  MESSAGE("games with an equilibrium: " << with_eq << " / 100");
}
