#include <cmath>

#include "doctest.h"
#include "gnep/compile.hpp"
#include "gnep/instances.hpp"
#include "gnep/oracles.hpp"

using namespace gnep;

namespace {

double val(const OracleResult& r) {
  REQUIRE(r.optimal());
  return r.value.value();
}

}  // namespace

TEST_CASE("cournot player oracles") {
  const auto g = cournot_game();
  const auto b = bind_all(g);
  CHECK(b[0].kind == OracleKind::enumeration);
  const std::vector<double> x{1.0, 1.0};
  const auto r = solve_players(g, x, b);
  CHECK(val(r[0]) == doctest::Approx(-2.0));
  CHECK(r[0].minimizer == std::vector<double>{1.0});
  CHECK(r[0].certificate == CertificateKind::enumeration_complete);
  CHECK(val(r[1]) == doctest::Approx(-2.0));
}

TEST_CASE("cournot lower bound from seed pools") {
  const auto g = cournot_game();
  CutPool pools;
  pools.points = {{{0.0}}, {{0.0}}};
  const auto r = solve_lower_bound(g, pools);
  CHECK(val(r) == doctest::Approx(-2.0));
  // (x, y, w) = (1, 1, 1, 1, -1, -1)
  const std::vector<double> expect{1, 1, 1, 1, -1, -1};
  REQUIRE(r.minimizer.size() == expect.size());
  for (std::size_t j = 0; j < expect.size(); ++j) CHECK(r.minimizer[j] == doctest::Approx(expect[j]));
}

TEST_CASE("cut pool rejects duplicates") {
  CutPool p;
  p.points.resize(2);
  CHECK(p.add(0, {1.0}));
  CHECK_FALSE(p.add(0, {1.0}));
  CHECK(p.add(1, {1.0}));
  CHECK(p.total() == 2);
}

TEST_CASE("unit commitment producers at the published price") {
  const auto g = unit_commitment_game();
  const auto b = bind_all(g);
  for (const auto& bi : b) CHECK(bi.kind == OracleKind::mixed_binary_sep_qp);
  const std::vector<double> x{39.5, 802.5};
  const auto r = solve_players(g, x, b);
  CHECK(val(r[0]) == doctest::Approx(-4702.5));
  CHECK(r[0].minimizer[1] == doctest::Approx(590.0));
  CHECK(val(r[1]) == doctest::Approx(0.0));
  CHECK(val(r[2]) == doctest::Approx(0.0).epsilon(1e-12));
  const std::vector<double> y0{1.0, 502.5};
  CHECK(evaluate_player_objective(g, 0, x, y0) == doctest::Approx(expected_uc().at("player1_objective_at_solution").values[0]));
}

TEST_CASE("gas supply and demand players") {
  const auto d = gas_data();
  const auto g = gas_network_game(d);
  const auto b = bind_all(g);
  CHECK(b[0].kind == OracleKind::tree_transmission);
  CHECK(b[gas_first_supply_player()].kind == OracleKind::box_lp);
  CHECK(b[gas_first_demand_player(d)].kind == OracleKind::fixed_charge);
  const std::vector<double> x(20, 5.5);
  CHECK(val(solve_player(g, 1, x, b[1])) == doctest::Approx(-31.2));
  // zero prices: every demand starts, no supply
  const std::vector<double> zero(20, 0.0);
  double total = 0.0;
  for (std::size_t q = 0; q < d.demands.size(); ++q) {
    const int i = gas_first_demand_player(d) + static_cast<int>(q);
    const double expect = std::min(0.0, -d.demands[q].utility * d.demands[q].capacity + d.demands[q].fixed_cost);
    const double v = val(solve_player(g, i, zero, b[i]));
    CHECK(v == doctest::Approx(expect));
    total += v;
  }
  CHECK(total == doctest::Approx(-320.135));
}

TEST_CASE("tree transmission on a three-node path") {
  GasData d;
  d.nodes = 3;
  d.arcs = {{1, 2, 1.0}, {2, 3, 1.0}};
  d.supplies = {{1, 1.0, 1.0}};
  d.demands = {{3, 1.0, 2.0, 0.0}};
  d.pressure_lo = 0.0;
  d.pressure_hi = 4.0;
  const auto g = gas_network_game(d);
  const auto b = bind_oracle(g, 0, "tree_transmission");
  const std::vector<double> x{0.0, 1.0, 2.0};
  const auto r = solve_player(g, 0, x, b);
  CHECK(val(r) == doctest::Approx(-2.0 * std::sqrt(2.0)).epsilon(1e-7));
  CHECK(r.certificate == CertificateKind::branch_and_bound);
  CHECK(r.residual <= 1e-8);
  // reversed prices: flows only pay against the arc direction, so stay at 0
  const std::vector<double> rx{2.0, 1.0, 0.0};
  CHECK(val(solve_player(g, 0, rx, b)) == doctest::Approx(0.0));
}

TEST_CASE("gas transmission at the published prices") {
  const auto d = gas_data();
  const auto g = gas_network_game(d);
  const auto b = bind_all(g);
  const auto prices = expected_gas().at("prices").values;
  const auto r = solve_player(g, 0, prices, b[0]);
  CHECK(r.certificate == CertificateKind::branch_and_bound);
  // published flows at the published prices earn -25.99, a best response
  CHECK(val(r) == doctest::Approx(-25.99).epsilon(1e-3));
}

TEST_CASE("oracle structure errors") {
  const auto g = unit_commitment_game();
  CHECK_THROWS_AS(bind_oracle(g, 0, "box_lp"), StructureError);
  CHECK_THROWS_AS(bind_oracle(g, 0, "tree_transmission"), StructureError);
  CHECK_THROWS(bind_oracle(g, 0, "no_such_oracle"));
}
