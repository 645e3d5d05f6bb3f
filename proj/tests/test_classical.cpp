#include <algorithm>
#include <set>

#include "doctest.h"
#include "gnep/classical.hpp"
#include "gnep/instances.hpp"

using namespace gnep;

namespace {

using Classical = std::vector<std::vector<double>>;

std::set<Classical> as_set(const std::vector<Classical>& v) { return {v.begin(), v.end()}; }

std::set<std::vector<double>> flat_set(const std::vector<GamePoint>& pts) {
  std::set<std::vector<double>> out;
  for (const auto& p : pts) out.insert(p.flatten());
  return out;
}

}  // namespace

TEST_CASE("equilibrium sets survive both identifications") {
  int with_equilibria = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    RandomFiniteGameSpec spec;
    spec.seed = 1000 + seed;
    spec.players = 1 + static_cast<int>(seed % 3);
    spec.max_strategies = 3;
    spec.max_grid = 6;
    const auto g = generate_random_finite_game(spec);
    CAPTURE(seed);

    // shared form -> classical form
    const auto shared_eq = brute_force_md(g).equilibria;
    const auto classical = to_classical_gnep(g);
    const auto classical_eq = brute_force_classical_equilibria(classical);
    std::vector<Classical> mapped;
    for (const auto& p : shared_eq) mapped.push_back(to_classical_point(p));
    CHECK(as_set(mapped) == as_set(classical_eq));

    // classical form -> copy form
    const auto copy = from_classical_gnep(classical);
    const auto copy_eq = brute_force_md(copy).equilibria;
    std::vector<GamePoint> back;
    for (const auto& u : classical_eq) back.push_back(from_classical_point(copy, u));
    CHECK(flat_set(copy_eq) == flat_set(back));
    if (!shared_eq.empty()) ++with_equilibria;
  }
  MESSAGE(with_equilibria << " of 50 games have an equilibrium");
  CHECK(with_equilibria > 0);
  CHECK(with_equilibria < 50);
}

TEST_CASE("cournot in classical form") {
  const auto classical = to_classical_gnep(cournot_game());
  CHECK(classical.num_players() == 3);
  const auto eq = brute_force_classical_equilibria(classical);
  REQUIRE(eq.size() == 1);
  CHECK(eq[0] == Classical{{1.0, 1.0}, {1.0}, {1.0}});
}
