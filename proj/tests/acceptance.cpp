// Acceptance run: one PASS/FAIL line per criterion; exit status 0 iff all pass.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "gnep/classical.hpp"
#include "gnep/reproduce.hpp"
#include "gnep/subsolvers.hpp"
#include "oracle_cases.hpp"
#include "random_problems.hpp"

using namespace gnep;

namespace {

double now() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

struct Line {
  bool pass = true;
  std::ostringstream detail;
  void fail(const std::string& why) {
    if (pass) detail << "first failure: " << why << "; ";
    pass = false;
  }
};

int failures = 0;

void report(int n, const std::string& title, Line& l) {
  std::cout << (l.pass ? "PASS" : "FAIL") << " criterion " << n << ": " << title << " -- " << l.detail.str()
            << std::endl;
  if (!l.pass) ++failures;
}

std::string failed_quantities(const Reproduction& r) {
  std::string s;
  for (const auto& c : r.comparisons)
    if (!c.pass && !c.informational) s += (s.empty() ? "" : ", ") + c.quantity;
  return s;
}

// Bound comparisons carry the subproblem solve tolerance.
bool leq(double a, double b) { return a <= b + 1e-9 * (1.0 + std::max(std::abs(a), std::abs(b))); }

// Bound behaviour of one constraint-generation run.
void check_bounds(const SolveReport& r, Line& l, const std::string& who) {
  const auto& lo = r.lower_sequence;
  const auto& up = r.upper_sequence;
  for (std::size_t k = 1; k < lo.size(); ++k)
    if (!leq(lo[k - 1], lo[k])) l.fail(who + ": lower bound decreased at iteration " + std::to_string(k + 1));
  for (std::size_t k = 1; k < up.size(); ++k)
    if (!leq(up[k], up[k - 1])) l.fail(who + ": upper bound increased at iteration " + std::to_string(k + 1));
  for (std::size_t k = 0; k < std::min(lo.size(), up.size()); ++k)
    if (!leq(lo[k], up[k])) l.fail(who + ": lower bound above upper bound at iteration " + std::to_string(k + 1));
  // Gaps are nonnegative, so max(lower, 0) is a valid final lower bound.
  const double gap = r.delta_upper - std::max(r.delta_lower, 0.0);
  if (!(gap <= r.eps)) l.fail(who + ": final gap " + std::to_string(gap));
}

}  // namespace

int main() {
  std::cout.setf(std::ios::boolalpha);
  ReproduceOptions ro;

  // 1. Cournot
  const auto cournot = reproduce_cournot(ro);
  {
    Line l;
    const auto& r = *cournot.report;
    if (!cournot.pass()) l.fail("mismatch in " + failed_quantities(cournot));
    if (!(r.has_point && r.delta() == 0.0)) l.fail("delta is not exactly 0");
    if (r.lower_sequence.empty() || r.lower_sequence.front() != -2.0) l.fail("first lower bound is not -2");
    if (!(cournot.seconds < 0.1)) l.fail("runtime " + std::to_string(cournot.seconds) + " s");
    l.detail << to_string(r.status) << ", delta " << r.delta() << ", first lower bound "
             << (r.lower_sequence.empty() ? std::nan("") : r.lower_sequence.front()) << ", " << r.iterations
             << " iteration(s), " << cournot.seconds << " s";
    report(1, "Cournot equilibrium", l);
  }

  // 2. Unit commitment
  const auto uc = reproduce_uc(ro);
  {
    Line l;
    const auto& r = *uc.report;
    if (!uc.pass()) l.fail("mismatch in " + failed_quantities(uc));
    if (!(uc.seconds < 5.0)) l.fail("runtime " + std::to_string(uc.seconds) + " s");
    l.detail.precision(10);
    l.detail << to_string(r.status) << (r.no_equilibrium_certified ? " + NO_EQUILIBRIUM_CERTIFIED" : "")
             << ", delta " << r.delta() << ", x (" << r.point.x[0] << ", " << r.point.x[1] << "), " << r.iterations
             << " iterations, " << uc.seconds << " s";
    report(2, "unit commitment minimum disequilibrium", l);
  }

  // 3. Gas network
  const auto gas = reproduce_gas(ro);
  {
    Line l;
    if (!gas.pass()) l.fail("mismatch in " + failed_quantities(gas));
    if (!(gas.seconds < 600.0)) l.fail("runtime " + std::to_string(gas.seconds) + " s");
    double price_dev = 0.0;
    for (const auto& c : gas.comparisons)
      if (c.quantity == "prices") price_dev = c.worst;
    l.detail.precision(8);
    l.detail << "primal " << gas.primal->value << (gas.primal->certified ? " (certified)" : "")
             << ", dual at published prices " << gas.dual_at_published << ", cutting-plane gap "
             << gas.dual->upper - gas.dual->value << " after " << gas.dual->iterations
             << " iterations, max price deviation " << price_dev << ", " << gas.seconds << " s";
    report(3, "gas network primal/dual", l);
  }

  // 4. Random finite games against brute force
  std::vector<SolveReport> random_runs;
  {
    Line l;
    const double t0 = now();
    int with_eq = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      RandomFiniteGameSpec spec;
      spec.seed = seed;
      spec.players = 1 + static_cast<int>(seed % 3);
      const auto g = generate_random_finite_game(spec);
      const auto bf = brute_force_md(g);
      const auto b = bind_all(g);
      auto r = run(g, b, initialize_pools(g, b, PoolInit{}));
      const std::string who = "seed " + std::to_string(seed);
      if (!bf.feasible || !r.has_point) {
        l.fail(who + ": no point");
      } else {
        worst = std::max(worst, std::abs(r.delta() - bf.delta));
        if (std::abs(r.delta() - bf.delta) > 1e-6) l.fail(who + ": delta differs");
        if ((r.status == RunStatus::equilibrium_found) != !bf.equilibria.empty()) l.fail(who + ": status");
      }
      with_eq += bf.equilibria.empty() ? 0 : 1;
      random_runs.push_back(std::move(r));
    }
    const double secs = now() - t0;
    if (!(secs < 60.0)) l.fail("runtime " + std::to_string(secs) + " s");
    l.detail << "100 games, " << with_eq << " with an equilibrium, max |delta - brute force| " << worst << ", "
             << secs << " s";
    report(4, "minimum disequilibrium equals brute force", l);
  }

  // 5. Bound behaviour
  {
    Line l;
    for (std::size_t k = 0; k < random_runs.size(); ++k) check_bounds(random_runs[k], l, "seed " + std::to_string(k + 1));
    check_bounds(*cournot.report, l, "cournot");
    check_bounds(*uc.report, l, "uc");
    // Gas: delta^L_k = delta^P - delta^{D,U}_k, delta^U_k = delta^P - best dual value.
    const double dp = gas.primal->value;
    const auto& tr = gas.dual->trace;
    for (std::size_t k = 0; k < tr.size(); ++k) {
      const double lo = dp - tr[k].upper, up = dp - tr[k].best;
      if (k > 0 && !leq(dp - tr[k - 1].upper, lo)) l.fail("gas: lower bound decreased");
      if (k > 0 && !leq(up, dp - tr[k - 1].best)) l.fail("gas: upper bound increased");
      if (!leq(lo, up)) l.fail("gas: lower bound above upper bound at iteration " + std::to_string(k + 1));
    }
    const double gas_gap = gas.dual->upper - gas.dual->value;
    if (!(gas_gap <= ro.dual_tol)) l.fail("gas: final gap " + std::to_string(gas_gap));
    l.detail << random_runs.size() << " random runs + cournot + uc + gas (" << tr.size() << " dual iterations)";
    report(5, "bounds monotone, ordered and closed", l);
  }

  // 6. Convex price-taking games
  {
    Line l;
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      RandomPriceTakingSpec spec;
      spec.seed = seed;
      spec.commodities = 1 + static_cast<int>(seed % 3);
      const auto g = generate_random_price_taking_game(spec);
      const std::string who = "seed " + std::to_string(seed);
      const auto det = detect_price_taking(g);
      if (!det.accepted()) {
        l.fail(who + ": not detected (" + det.reason + ")");
        continue;
      }
      const auto b = bind_all(g);
      const auto p = solve_primal(*det.ptg);
      DualOptions o;
      o.tol = 1e-9;
      const auto d = dual_cutting_plane(*det.ptg, b, o);
      if (p.status != SolveStatus::optimal || d.status != SolveStatus::optimal) {
        l.fail(who + ": primal or dual not solved");
        continue;
      }
      worst = std::max(worst, p.value - d.value);
      if (p.value - d.value > 1e-6) l.fail(who + ": duality gap " + std::to_string(p.value - d.value));
      const auto a = assemble_min_disequilibrium(*det.ptg, p, d, b);
      if (!(a.check && a.check->is_equilibrium)) l.fail(who + ": prices do not certify");
    }
    l.detail << "50 games, max delta^P - delta^D " << worst;
    report(6, "zero duality gap and certified prices", l);
  }

  // 7. Subsolvers and oracles
  {
    Line l;
    std::mt19937_64 rng(2024);
    double lp_gap = 0.0, qp_kkt = 0.0, oracle_dev = 0.0;
    int lps = 0, qps = 0;
    while (lps < 500 || qps < 500) {
      const bool quad = lps >= 500 || (qps < 500 && (lps + qps) % 2 == 1);
      const auto prob = testing::random_qp(rng, quad);
      const auto r = solve_active_set(prob);
      if (r.status != SolveStatus::optimal) {
        l.fail(std::string(quad ? "QP" : "LP") + " not solved: " + r.message);
      } else if (quad) {
        const auto& c = r.certificate;
        qp_kkt = std::max({qp_kkt, c.primal_residual, c.dual_residual, c.complementarity});
      } else {
        lp_gap = std::max(lp_gap, std::abs(r.certificate.objective - r.certificate.dual_objective));
      }
      (quad ? qps : lps)++;
    }
    if (lp_gap > 1e-7) l.fail("LP strong-duality residual " + std::to_string(lp_gap));
    if (qp_kkt > 1e-8) l.fail("QP KKT residual " + std::to_string(qp_kkt));
    const auto cases = testing::all_oracle_cases(100);
    for (const auto& c : cases) {
      const auto res = solve_player(c.game, 0, c.x, bind_oracle(c.game, 0, c.oracle));
      const double got = res.optimal() ? res.value.value() : (res.status == SolveStatus::infeasible ? kInf : std::nan(""));
      const double dev = std::isinf(c.reference) && std::isinf(got) ? 0.0 : std::abs(got - c.reference);
      if (!(dev <= 1e-6)) l.fail(c.oracle + " oracle deviates by " + std::to_string(dev));
      if (std::isfinite(dev)) oracle_dev = std::max(oracle_dev, dev);
    }
    l.detail << "500 LPs max duality residual " << lp_gap << ", 500 QPs max KKT residual " << qp_kkt << ", "
             << cases.size() << " oracle cases max deviation " << oracle_dev;
    report(7, "subsolver certificates and oracle references", l);
  }

  // 8. Classical round trip
  {
    Line l;
    int with_eq = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      RandomFiniteGameSpec spec;
      spec.seed = 1000 + seed;
      spec.players = 1 + static_cast<int>(seed % 3);
      spec.max_strategies = 3;
      spec.max_grid = 6;
      const auto g = generate_random_finite_game(spec);
      const std::string who = "seed " + std::to_string(seed);
      const auto shared_eq = brute_force_md(g).equilibria;
      const auto classical = to_classical_gnep(g);
      const auto classical_eq = brute_force_classical_equilibria(classical);
      std::set<std::vector<std::vector<double>>> a, b(classical_eq.begin(), classical_eq.end());
      for (const auto& p : shared_eq) a.insert(to_classical_point(p));
      if (a != b) l.fail(who + ": shared vs classical equilibrium sets differ");
      const auto copy = from_classical_gnep(classical);
      std::set<std::vector<double>> c, d;
      for (const auto& p : brute_force_md(copy).equilibria) c.insert(p.flatten());
      for (const auto& u : classical_eq) d.insert(from_classical_point(copy, u).flatten());
      if (c != d) l.fail(who + ": classical vs copy-form equilibrium sets differ");
      with_eq += shared_eq.empty() ? 0 : 1;
    }
    l.detail << "50 games, " << with_eq << " with an equilibrium";
    report(8, "equilibrium sets preserved by the classical identifications", l);
  }

  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " criterion/criteria FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
