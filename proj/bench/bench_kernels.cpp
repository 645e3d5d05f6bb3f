// Serial vs OpenMP timings of the parallel kernels. Arg 0 = serial, 1 = OpenMP.
#include <benchmark/benchmark.h>

#include <random>

#include "gnep/cga.hpp"
#include "gnep/instances.hpp"
#include "gnep/miqp.hpp"
#include "gnep/pricetaking.hpp"

using namespace gnep;

namespace {

// 12 binaries + 4 continuous, diagonal PD Hessian, a few covering rows.
MixedIntegerQp random_miqp(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int nb = 12, nc = 4, n = nb + nc, m = 4;
  MixedIntegerQp p;
  auto& q = p.relaxation;
  q.hessian = Eigen::MatrixXd::Zero(n, n);
  for (int j = nb; j < n; ++j) q.hessian(j, j) = 1.0 + u(rng) * 0.5;
  q.linear = Eigen::VectorXd::NullaryExpr(n, [&] { return u(rng); });
  q.lower = Eigen::VectorXd::Zero(n);
  q.upper = Eigen::VectorXd::Ones(n);
  q.upper.tail(nc).setConstant(5.0);
  q.rows = Eigen::MatrixXd::NullaryExpr(m, n, [&] { return u(rng); });
  q.rhs = Eigen::VectorXd::Constant(m, 1.5);
  q.senses.assign(m, Sense::le);
  p.integral.assign(n, false);
  for (int j = 0; j < nb; ++j) p.integral[j] = true;
  return p;
}

void BM_Miqp(benchmark::State& st) {
  const auto p = random_miqp(7);
  MiqpOptions o;
  o.parallel = st.range(0) != 0;
  for (auto _ : st) benchmark::DoNotOptimize(solve_miqp(p, o));
}
BENCHMARK(BM_Miqp)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SolveUc(benchmark::State& st) {
  const auto g = unit_commitment_game();
  const auto b = bind_all(g);
  const auto d = uc_data();
  PoolInit init;
  init.x0 = {d.alpha - d.beta * 100.0, 100.0};
  RunOptions o;
  o.parallel = st.range(0) != 0;
  for (auto _ : st) benchmark::DoNotOptimize(run(g, b, initialize_pools(g, b, init), o));
}
BENCHMARK(BM_SolveUc)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_RandomFiniteGame(benchmark::State& st) {
  RandomFiniteGameSpec spec;
  spec.seed = 11;
  spec.players = 3;
  const auto g = generate_random_finite_game(spec);
  const auto b = bind_all(g);
  RunOptions o;
  o.parallel = st.range(0) != 0;
  for (auto _ : st) benchmark::DoNotOptimize(run(g, b, initialize_pools(g, b, PoolInit{}), o));
}
BENCHMARK(BM_RandomFiniteGame)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_EvaluateDualGas(benchmark::State& st) {
  const auto g = gas_network_game(gas_data());
  const auto ptg = *detect_price_taking(g).ptg;
  const auto b = bind_all(g);
  const auto prices = expected_gas().at("prices").values;
  for (auto _ : st) benchmark::DoNotOptimize(evaluate_dual(ptg, prices, b, st.range(0) != 0));
}
BENCHMARK(BM_EvaluateDualGas)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
