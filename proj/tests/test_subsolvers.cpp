// Built-in player oracles against independent references, 100 instances per
// class.
#include <cmath>
#include <map>

#include "doctest.h"
#include "gnep/oracles.hpp"
#include "oracle_cases.hpp"

using namespace gnep;

namespace {

/// Value reported by an oracle; +inf when infeasible.
double oracle_value(const GameInstance& g, std::span<const double> x) {
  const auto b = bind_oracle(g, 0, g.players[0].oracle);
  const auto res = solve_player(g, 0, x, b);
  if (res.status == SolveStatus::infeasible) return kInf;
  REQUIRE_MESSAGE(res.optimal(), res.detail);
  // The minimizer must reproduce the value and lie in Y.
  CHECK(g.players[0].objective.evaluate_local(x, 0, res.minimizer) == doctest::Approx(res.value.value()));
  CHECK(g.players[0].feasible_set.contains(res.minimizer, x, g.tol));
  return res.value.value();
}

}  // namespace

TEST_CASE("built-in oracles match independent references") {
  std::map<std::string, int> per_class;
  for (const auto& c : testing::all_oracle_cases(100)) {
    CAPTURE(c.oracle);
    CAPTURE(per_class[c.oracle]);
    const double got = oracle_value(c.game, c.x);
    if (std::isinf(c.reference)) {
      CHECK(std::isinf(got));
    } else {
      CHECK(std::abs(got - c.reference) <= 1e-6);
    }
    ++per_class[c.oracle];
  }
  CHECK(per_class.size() == 5);
  for (const auto& [name, n] : per_class) CHECK(n == 100);
}
