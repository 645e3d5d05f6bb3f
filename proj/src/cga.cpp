#include "gnep/cga.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

namespace gnep {

namespace {

const char* const kStatusNames[] = {"EQUILIBRIUM_FOUND",         "MD_EXACT",        "MD_EPS_OPTIMAL",
                                    "NO_EQUILIBRIUM_CERTIFIED", "ITERATION_LIMIT", "ORACLE_FAILURE"};
const char* const kActionNames[] = {"exact_exit", "cut_added", "eps_exit", "certified_no_equilibrium", "aborted"};

constexpr double kInfD = std::numeric_limits<double>::infinity();

bool near_duplicate(const std::vector<std::vector<double>>& pool, const std::vector<double>& z) {
  for (const auto& p : pool) {
    bool same = p.size() == z.size();
    for (std::size_t j = 0; same && j < z.size(); ++j) same = std::abs(p[j] - z[j]) <= 1e-9 * (1.0 + std::abs(z[j]));
    if (same) return true;
  }
  return false;
}

void check_run_preconditions(const GameInstance& game, const std::vector<PlayerOracleBinding>& bindings) {
  game.validate();
  if (game.mu.kind != MuMeasure::Kind::sum) throw std::invalid_argument("constraint generation requires mu = sum");
  if (!game.has_constant_feasible_sets())
    throw std::invalid_argument("constraint generation requires constant feasible sets F_i = X x Y_i");
  if (static_cast<int>(bindings.size()) != game.num_players())
    throw std::invalid_argument("one oracle binding per player required");
}

std::vector<double> project_zero(const FeasibleSet& x) {
  std::vector<double> v(x.n, 0.0);
  for (int k = 0; k < x.n; ++k) v[k] = std::clamp(0.0, x.lower[k], x.upper[k]);
  return v;
}

}  // namespace

std::string to_string(RunStatus s) { return kStatusNames[static_cast<int>(s)]; }

std::optional<RunStatus> run_status_from_string(const std::string& s) {
  for (int k = 0; k < 6; ++k)
    if (s == kStatusNames[k]) return static_cast<RunStatus>(k);
  return std::nullopt;
}

std::string to_string(IterationAction a) { return kActionNames[static_cast<int>(a)]; }

std::optional<IterationAction> iteration_action_from_string(const std::string& s) {
  for (int k = 0; k < 5; ++k)
    if (s == kActionNames[k]) return static_cast<IterationAction>(k);
  return std::nullopt;
}

CutPool initialize_pools(const GameInstance& game, const std::vector<PlayerOracleBinding>& bindings,
                         const PoolInit& init) {
  const int m = game.num_players();
  CutPool pools;
  pools.points.resize(m);
  if (init.strategy == PoolInit::Strategy::user_points) {
    if (static_cast<int>(init.points.size()) != m) throw std::invalid_argument("user pools: one list per player");
    for (int i = 0; i < m; ++i) {
      if (init.points[i].empty()) throw std::invalid_argument("user pools: empty list for player " + std::to_string(i));
      for (const auto& z : init.points[i]) {
        if (static_cast<int>(z.size()) != game.players[i].n)
          throw std::invalid_argument("user pools: wrong dimension for player " + std::to_string(i));
        // Constant feasible sets: membership does not depend on x.
        const std::vector<double> x(game.n0, 0.0);
        if (!game.players[i].feasible_set.contains(z, x, game.tol))
          throw std::invalid_argument("user pools: point outside Y_" + std::to_string(i));
        pools.add(i, z);
      }
    }
    return pools;
  }
  const std::vector<double> x0 = init.x0.empty() ? project_zero(game.shared_set) : init.x0;
  if (static_cast<int>(x0.size()) != game.n0) throw std::invalid_argument("x0 has the wrong dimension");
  if (!game.shared_set.contains(x0, x0, game.tol)) throw std::invalid_argument("x0 is not in X");
  const auto res = solve_players(game, x0, bindings);
  for (int i = 0; i < m; ++i) {
    if (!res[i].optimal())
      throw std::runtime_error("seeding player " + std::to_string(i) + " failed: " + res[i].detail);
    pools.add(i, res[i].minimizer);
  }
  return pools;
}

SolveReport run(const GameInstance& game, const std::vector<PlayerOracleBinding>& bindings, CutPool pools,
                const RunOptions& opt) {
  check_run_preconditions(game, bindings);
  const auto t0 = std::chrono::steady_clock::now();
  const int m = game.num_players();
  if (pools.num_players() != m) throw std::invalid_argument("one cut pool per player required");
  for (int i = 0; i < m; ++i)
    if (pools.points[i].empty()) throw std::invalid_argument("empty cut pool for player " + std::to_string(i));

  SolveReport rep;
  rep.eps = opt.eps;
  rep.eps_cert = opt.eps_cert;
  rep.eps_eq = opt.eps_eq;
  auto finish = [&](RunStatus s, std::string msg) {
    rep.status = s;
    rep.message = std::move(msg);
    rep.pools = pools;
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
  };
  auto equilibrium_ok = [&]() {
    if (!rep.has_point || rep.delta_upper > opt.eps_eq) return false;
    if (!check_point_feasible(game, rep.point).feasible()) return false;
    return std::all_of(rep.gaps.begin(), rep.gaps.end(), [&](double gap) { return gap <= opt.eps_eq; });
  };

  for (int k = 1; k <= opt.max_iter; ++k) {
    rep.iterations = k;
    IterationRecord rec;
    rec.iteration = k;

    const OracleResult lb = opt.lower_bound ? opt.lower_bound(pools) : solve_lower_bound(game, pools);
    ++rep.lower_bound_calls;
    if (lb.status == SolveStatus::infeasible) {
      rep.delta_lower = kInfD;
      rep.no_equilibrium_certified = true;
      rep.lower_sequence.push_back(kInfD);
      rep.upper_sequence.push_back(rep.delta_upper);
      return finish(RunStatus::no_equilibrium_certified, "joint feasible set is empty: " + lb.detail);
    }
    if (lb.status == SolveStatus::unbounded)
      return finish(RunStatus::oracle_failure,
                    "lower-bounding problem unbounded (a Y_i or X is not compact, or a pool is degenerate): " + lb.detail);
    if (!lb.optimal()) return finish(RunStatus::oracle_failure, "lower-bounding problem failed: " + lb.detail);

    const auto flat = lb.minimizer;
    const int ny = game.total_dimension();
    if (static_cast<int>(flat.size()) != ny + m)
      return finish(RunStatus::oracle_failure, "lower-bounding solve returned a point of the wrong dimension");
    rec.candidate = GamePoint::unflatten(game, std::span<const double>(flat.data(), ny));
    rec.w.assign(flat.begin() + ny, flat.end());
    rec.lower = lb.value.value();
    rep.delta_lower = std::max(rep.delta_lower, rec.lower);
    rep.lower_sequence.push_back(rep.delta_lower);
    if (rep.delta_lower > opt.eps_cert) rep.no_equilibrium_certified = true;

    if (opt.existence_only && rep.no_equilibrium_certified) {
      rec.action = IterationAction::certified_no_equilibrium;
      rec.upper = rep.delta_upper;
      rep.upper_sequence.push_back(rep.delta_upper);
      rep.trace.push_back(std::move(rec));
      return finish(RunStatus::no_equilibrium_certified, "lower bound exceeds eps_cert");
    }

    const auto& x = rec.candidate.x;
    const auto br = solve_players(game, x, bindings, ParallelOptions{opt.parallel});
    rep.oracle_calls += m;
    std::vector<double> gaps(m);
    rec.best_response_value.resize(m);
    rec.best_response.resize(m);
    for (int i = 0; i < m; ++i) {
      if (!br[i].optimal()) {
        rec.action = IterationAction::aborted;
        rec.upper = rep.delta_upper;
        rep.upper_sequence.push_back(rep.delta_upper);
        rep.trace.push_back(std::move(rec));
        return finish(RunStatus::oracle_failure, "player " + std::to_string(i) + " oracle: " + to_string(br[i].status) +
                                                     (br[i].detail.empty() ? "" : " (" + br[i].detail + ")"));
      }
      rec.best_response_value[i] = br[i].value.value();
      rec.best_response[i] = br[i].minimizer;
      gaps[i] = evaluate_player_objective(game, i, rec.candidate) - rec.best_response_value[i];
    }
    rec.candidate_value = 0.0;
    for (double gap : gaps) rec.candidate_value += gap;

    bool exact = true;
    for (int i = 0; i < m; ++i)
      if (rec.w[i] > rec.best_response_value[i] + exact_exit_tolerance(rec.best_response_value[i])) exact = false;

    // First point achieving the best value is kept.
    if (rec.candidate_value < rep.delta_upper) {
      rep.delta_upper = rec.candidate_value;
      rep.point = rec.candidate;
      rep.gaps = gaps;
      rep.has_point = true;
    }
    rec.upper = rep.delta_upper;
    rep.upper_sequence.push_back(rep.delta_upper);

    if (exact) {
      rec.action = IterationAction::exact_exit;
      rep.trace.push_back(std::move(rec));
      return finish(equilibrium_ok() ? RunStatus::equilibrium_found : RunStatus::md_exact,
                    "lower-bounding solution is feasible in the disequilibrium problem");
    }

    for (int i = 0; i < m; ++i) {
      if (rec.w[i] <= rec.best_response_value[i] + exact_exit_tolerance(rec.best_response_value[i])) continue;
      if (near_duplicate(pools.points[i], rec.best_response[i])) {
        rec.action = IterationAction::aborted;
        rep.trace.push_back(std::move(rec));
        return finish(RunStatus::oracle_failure,
                      "player " + std::to_string(i) +
                          ": best response already in the pool but its cut is violated (lower-bound/oracle mismatch)");
      }
      pools.add(i, rec.best_response[i]);
    }

    if (rep.delta_upper - std::max(rep.delta_lower, 0.0) < opt.eps) {
      rec.action = IterationAction::eps_exit;
      rep.trace.push_back(std::move(rec));
      return finish(equilibrium_ok() ? RunStatus::equilibrium_found : RunStatus::md_eps_optimal,
                    "bounds within eps");
    }
    rec.action = IterationAction::cut_added;
    rep.trace.push_back(std::move(rec));
  }
  return finish(RunStatus::iteration_limit, "iteration limit reached");
}

EquilibriumCheck certify_equilibrium(const GameInstance& game, const GamePoint& point,
                                     const std::vector<PlayerOracleBinding>& bindings, double eps_eq) {
  check_dimensions(game, point);
  const int m = game.num_players();
  if (static_cast<int>(bindings.size()) != m) throw std::invalid_argument("one oracle binding per player required");
  EquilibriumCheck out;
  const auto fr = check_point_feasible(game, point);
  out.feasible = fr.feasible();
  out.max_residual = fr.max_residual();
  const auto br = solve_players(game, point.x, bindings);
  out.gaps.resize(m);
  out.best_response_value.resize(m);
  bool all_small = true;
  for (int i = 0; i < m; ++i) {
    if (br[i].status == SolveStatus::unbounded) {
      out.gaps[i] = ExtendedReal::plus_infinity();
      out.best_response_value[i] = -kInfD;
    } else if (!br[i].optimal()) {
      throw std::runtime_error("player " + std::to_string(i) + " oracle failed: " + br[i].detail);
    } else {
      out.best_response_value[i] = br[i].value.value();
      out.gaps[i] = ExtendedReal::finite(evaluate_player_objective(game, i, point) - out.best_response_value[i]);
    }
    if (!(out.gaps[i] < ExtendedReal::finite(eps_eq) || out.gaps[i] == ExtendedReal::finite(eps_eq))) all_small = false;
  }
  out.delta = game.mu.apply(std::span<const ExtendedReal>(out.gaps));
  out.is_equilibrium = out.feasible && all_small;
  if (!out.feasible) out.message = "point is infeasible (max residual " + std::to_string(out.max_residual) + ")";
  else if (!all_small) out.message = "some player has a profitable deviation";
  else out.message = "equilibrium";
  return out;
}

}  // namespace gnep
