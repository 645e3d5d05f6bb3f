#include <random>

#include "doctest.h"
#include "gnep/expression.hpp"

using gnep::Degree;
using gnep::Expression;

namespace {

Expression x(int k) { return Expression::shared_var(k); }
Expression y(int i, int j) { return Expression::player_var(i, j); }
Expression c(double v) { return Expression::constant(v); }

}  // namespace

TEST_CASE("evaluation of a bilinear price term") {
  const Expression e = c(10) * y(0, 1) + 0.5 * c(0.05) * Expression::square(y(0, 1)) + c(4000) * y(0, 0) -
                       x(0) * y(0, 1);
  const std::vector<double> xs{39.5};
  const std::vector<std::vector<double>> ys{{1.0, 502.5}};
  const double want = 10 * 502.5 + 0.5 * 0.05 * 502.5 * 502.5 + 4000 - 39.5 * 502.5;
  CHECK(e.evaluate(xs, ys) == doctest::Approx(want).epsilon(1e-14));
  CHECK(e.evaluate_local(xs, 0, ys[0]) == doctest::Approx(want).epsilon(1e-14));
  CHECK_THROWS(y(1, 0).evaluate_local(xs, 0, ys[0]));
}

TEST_CASE("classification") {
  CHECK(gnep::classify(c(3)).in_shared == Degree::constant);
  const auto cl = gnep::classify(x(0) * y(0, 0) + Expression::square(y(0, 1)));
  CHECK(cl.in_shared == Degree::affine);
  CHECK(cl.in_players == Degree::quadratic);
  CHECK(gnep::classify(x(0) * x(1) * x(0)).in_shared == Degree::general);
  // x*x - x*x cancels exactly.
  CHECK(gnep::classify(x(0) * x(0) - Expression::square(x(0))).in_shared == Degree::constant);
}

TEST_CASE("affine-in-x split reproduces the expression on random points") {
  const Expression e = c(2) * y(0, 0) + x(0) * (y(0, 0) - c(3) * y(0, 1)) + x(2) * Expression::square(y(0, 1)) - c(1);
  const auto split = e.expand().split_affine_in_shared();
  REQUIRE(split.has_value());
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> xs{u(rng), u(rng), u(rng)};
    std::vector<std::vector<double>> ys{{u(rng), u(rng)}};
    double v = split->base.evaluate(xs, ys);
    for (const auto& [k, p] : split->slopes) v += xs[k] * p.evaluate(xs, ys);
    CHECK(v == doctest::Approx(e.evaluate(xs, ys)).epsilon(1e-12));
  }
  CHECK_FALSE((x(0) * x(1) * y(0, 0)).expand().split_affine_in_shared().has_value());
}

TEST_CASE("polynomial round trip through expressions") {
  const Expression e = Expression::square(x(0) - y(1, 2)) * c(3) + y(0, 0);
  const auto p = e.expand();
  CHECK(p.distance(p.to_expression().expand()) == 0.0);
  CHECK(p.coefficient({gnep::VarRef::shared(0), gnep::VarRef::of_player(1, 2)}) == -6.0);
}
