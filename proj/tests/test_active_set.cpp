#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "doctest.h"
#include "gnep/active_set.hpp"
#include "gnep/subsolvers.hpp"

using namespace gnep;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

QpProblem lp(Eigen::VectorXd c, Eigen::VectorXd lo, Eigen::VectorXd hi) {
  QpProblem p;
  p.linear = std::move(c);
  p.lower = std::move(lo);
  p.upper = std::move(hi);
  p.rows.resize(0, p.linear.size());
  p.rhs.resize(0);
  return p;
}

void add_row(QpProblem& p, std::initializer_list<double> a, Sense s, double b) {
  const int m = p.num_rows();
  p.rows.conservativeResize(m + 1, p.num_vars());
  int j = 0;
  for (double v : a) p.rows(m, j++) = v;
  p.rhs.conservativeResize(m + 1);
  p.rhs[m] = b;
  p.senses.push_back(s);
}

}  // namespace

TEST_CASE("minimum of two cuts") {
  // max w s.t. w <= 3, w <= 5  ->  min -w
  auto p = lp(Eigen::VectorXd::Constant(1, -1.0), Eigen::VectorXd::Constant(1, -inf), Eigen::VectorXd::Constant(1, inf));
  add_row(p, {1.0}, Sense::le, 3.0);
  add_row(p, {1.0}, Sense::le, 5.0);
  const auto r = solve_active_set(p);
  REQUIRE(r.status == SolveStatus::optimal);
  CHECK(r.x[0] == doctest::Approx(3.0));
  CHECK(r.row_duals[0] == doctest::Approx(1.0));
  CHECK(r.certificate.dual_objective == doctest::Approx(-3.0));
}

TEST_CASE("interior QP minimum") {
  auto p = lp(Eigen::VectorXd::Constant(1, -1.0), Eigen::VectorXd::Constant(1, 0.0), Eigen::VectorXd::Constant(1, 10.0));
  p.hessian = Eigen::MatrixXd::Identity(1, 1);
  const auto r = solve_active_set(p);
  REQUIRE(r.status == SolveStatus::optimal);
  CHECK(r.x[0] == doctest::Approx(1.0));
  CHECK(r.objective == doctest::Approx(-0.5));
}

TEST_CASE("infeasible and unbounded") {
  auto p = lp(Eigen::VectorXd::Constant(2, 1.0), Eigen::VectorXd::Zero(2), Eigen::VectorXd::Constant(2, inf));
  add_row(p, {1.0, 1.0}, Sense::le, -1.0);
  CHECK(solve_active_set(p).status == SolveStatus::infeasible);

  auto q = lp(Eigen::VectorXd::Constant(2, -1.0), Eigen::VectorXd::Zero(2), Eigen::VectorXd::Constant(2, inf));
  add_row(q, {1.0, -1.0}, Sense::le, 1.0);
  const auto r = solve_active_set(q);
  REQUIRE(r.status == SolveStatus::unbounded);
  CHECK(r.ray.dot(q.linear) < 0.0);
}

TEST_CASE("equality-constrained degenerate LP") {
  // min -x1 - x2 s.t. x1 + x2 = 1, x1 - x2 <= 0, x >= 0: a whole face is optimal.
  auto p = lp(Eigen::VectorXd::Constant(2, -1.0), Eigen::VectorXd::Zero(2), Eigen::VectorXd::Constant(2, inf));
  add_row(p, {1.0, 1.0}, Sense::eq, 1.0);
  add_row(p, {1.0, -1.0}, Sense::le, 0.0);
  const auto r = solve_active_set(p);
  REQUIRE(r.status == SolveStatus::optimal);
  CHECK(r.objective == doctest::Approx(-1.0));
  CHECK(r.certificate.dual_objective == doctest::Approx(-1.0));
}

#include "random_problems.hpp"

TEST_CASE("random LPs and QPs certify") {
  std::mt19937_64 rng(11);
  int fails = 0;
  for (int t = 0; t < 2000; ++t) {
    const bool quad = t % 2 == 1;
    const auto p = gnep::testing::random_qp(rng, quad);
    const auto r = solve_active_set(p);
    if (r.status != SolveStatus::optimal) {
      ++fails;
      MESSAGE("instance " << t << ": " << to_string(r.status) << " " << r.message);
      continue;
    }
    const auto& c = r.certificate;
    const double scale = 1.0 + std::abs(c.objective);
    CHECK(c.primal_residual <= 1e-8);
    CHECK(c.dual_residual <= 1e-8);
    CHECK(c.complementarity <= 1e-7);
    CHECK(std::abs(c.objective - c.dual_objective) <= 1e-7 * scale);
  }
  CHECK(fails == 0);
}

TEST_CASE("tableau round trip") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 20; ++t) {
    const auto p = gnep::testing::random_qp(rng, t % 2 == 0);
    const auto q = parse_tableau(dump_tableau(p));
    CHECK(q.linear == p.linear);
    CHECK(q.lower == p.lower);
    CHECK(q.upper == p.upper);
    CHECK(q.rows == p.rows);
    CHECK(q.rhs == p.rhs);
    CHECK(q.senses == p.senses);
    CHECK(q.hessian == p.hessian);
  }
  CHECK_THROWS_AS(parse_tableau("vars 2 rows 0 lp\nc 1\n"), std::invalid_argument);
}

TEST_CASE("degenerate outer-approximation relaxation with warm start") {
  // Captured from a transmission branch-and-bound node; fixing a pressure at
  // its bound used to leave dependent tangent rows in the working set.
  std::ifstream f(std::string(GNEP_TEST_DATA) + "/degenerate_relaxation.tableau");
  REQUIRE(f.good());
  std::stringstream ss;
  ss << f.rdbuf();
  const std::string text = ss.str();
  const auto p = parse_tableau(text);
  Eigen::VectorXd start(p.num_vars());
  std::istringstream is(text.substr(text.find("#start") + 6));
  for (int j = 0; j < p.num_vars(); ++j) is >> start[j];
  QpOptions o;
  o.start = &start;
  const auto r = solve_active_set(p, o);
  REQUIRE(r.status == SolveStatus::optimal);
  // reference optimum from an independent LP solver
  CHECK(r.objective == doctest::Approx(-3703.90848267955).epsilon(1e-10));
  const auto cold = solve_active_set(p);
  CHECK(cold.objective == doctest::Approx(r.objective).epsilon(1e-10));
}
