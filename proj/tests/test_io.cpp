#include <random>

#include "doctest.h"
#include "gnep/io.hpp"

using namespace gnep;

namespace {

std::vector<GameInstance> bundled() {
  std::vector<GameInstance> out{cournot_game(), unit_commitment_game(), gas_network_game(), producer_consumer_toy()};
  for (std::uint64_t s = 1; s <= 5; ++s) {
    RandomFiniteGameSpec f;
    f.seed = s;
    f.players = 1 + static_cast<int>(s % 3);
    out.push_back(generate_random_finite_game(f));
    RandomPriceTakingSpec p;
    p.seed = s;
    out.push_back(generate_random_price_taking_game(p));
  }
  return out;
}

GamePoint random_point(const GameInstance& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  GamePoint p;
  for (int k = 0; k < g.n0; ++k) p.x.push_back(u(rng));
  for (const auto& pl : g.players) {
    std::vector<double> y(pl.n);
    for (auto& v : y) v = u(rng);
    p.y.push_back(y);
  }
  return p;
}

std::string error_of(const std::string& text) {
  try {
    game_from_json(parse_json_text(text, "t.json"));
  } catch (const FormatError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("expression arrays") {
  const auto e = expression_from_json(Json::parse(
      R"(["add", ["mul", ["const", 0.5], ["square", ["pvar", 0, 0]]], ["svar", 1]])"));
  const std::vector<double> x{0.0, 3.0};
  const std::vector<std::vector<double>> y{{2.0}};
  CHECK(e.evaluate(x, y) == doctest::Approx(5.0));
  const auto back = expression_to_json(e);
  CHECK(expression_to_json(expression_from_json(back)) == back);
  CHECK(real_from_json(real_to_json(-kInf), "v") == -kInf);
}

TEST_CASE("bundled and random instances round-trip") {
  std::mt19937_64 rng(5);
  for (const auto& g : bundled()) {
    CAPTURE(g.name);
    const Json first = game_to_json(g);
    const GameInstance parsed = game_from_json(parse_json_text(dump(first)));
    const Json second = game_to_json(parsed);
    CHECK(dump(first) == dump(second));
    CHECK(dump(game_to_json(game_from_json(second))) == dump(second));
    CHECK(parsed.n0 == g.n0);
    REQUIRE(parsed.num_players() == g.num_players());
    CHECK(parsed.global_linear.size() == g.global_linear.size());
    CHECK(parsed.global_nonlinear.size() == g.global_nonlinear.size());
    for (int t = 0; t < 10; ++t) {
      const auto p = random_point(g, rng);
      for (int i = 0; i < g.num_players(); ++i)
        CHECK(evaluate_player_objective(parsed, i, p) == evaluate_player_objective(g, i, p));
      CHECK(check_point_feasible(parsed, p).violations.size() == check_point_feasible(g, p).violations.size());
    }
  }
}

TEST_CASE("shipped instance files match the built-in games") {
  const std::string dir = GNEP_INSTANCES;
  CHECK(dump(game_to_json(load_game(dir + "/cournot.json"))) == dump(game_to_json(cournot_game())));
  CHECK(dump(game_to_json(load_game(dir + "/uc.json"))) == dump(game_to_json(unit_commitment_game())));
  CHECK(dump(game_to_json(load_game(dir + "/gas.json"))) == dump(game_to_json(gas_network_game())));
  CHECK(dump(game_to_json(load_game(dir + "/toy.json"))) == dump(game_to_json(producer_consumer_toy())));
}

TEST_CASE("diagnostics name the offending field") {
  CHECK(error_of("{\"n0\": 1,\n \"players\": [}") .find("t.json:2:") == 0);
  CHECK(error_of(R"({"players": []})").find("n0: missing field") != std::string::npos);
  CHECK(error_of(R"({"n0": 0, "players": [{"n": 1, "objective": ["cube", ["pvar", 0, 0]]}]})")
            .find("players[0].objective: unknown operator 'cube'") != std::string::npos);
  CHECK(error_of(R"({"n0": 0, "players": [{"n": 2, "objective": 0, "feasible_set": {"lower": [0]}}]})")
            .find("players[0].feasible_set.lower") != std::string::npos);
  CHECK(error_of(R"({"n0": 0, "schema": 7, "players": []})").find("schema") != std::string::npos);
  CHECK(error_of(R"({"n0": 1, "players": [], "mu": "median"})").find("mu: unknown measure") != std::string::npos);
  CHECK_THROWS_AS(point_from_json(Json::parse(R"({"x": [1]})")), FormatError);
}

TEST_CASE("price-taking form survives the round trip") {
  auto g = producer_consumer_toy(1.0, 1.0, 2.0);
  const auto y0 = Expression::player_var(0, 0), y1 = Expression::player_var(1, 0);
  g.players[0].price_taking_form = PriceTakingForm{y0, {-y0}};
  g.players[1].price_taking_form = PriceTakingForm{-2.0 * y1, {y1}};
  const auto parsed = game_from_json(parse_json_text(dump(game_to_json(g))));
  REQUIRE(parsed.players[1].price_taking_form.has_value());
  CHECK(dump(game_to_json(parsed)) == dump(game_to_json(g)));
  const auto d = detect_price_taking(parsed);
  CHECK_MESSAGE(d.accepted(), d.reason);
}

TEST_CASE("reports are deterministic") {
  const auto g = unit_commitment_game();
  auto once = [&] {
    const auto b = bind_all(g);
    PoolInit init;
    return dump(report_to_json(run(g, b, initialize_pools(g, b, init))));
  };
  CHECK(once() == once());
}
