#include "gnep/pricetaking.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>

#include "gnep/compile.hpp"
#include "gnep/miqp.hpp"
#include "gnep/spatial_bb.hpp"
#include "gnep/subsolvers.hpp"

namespace gnep {

namespace {

std::string who(int i) { return "player " + std::to_string(i); }

bool shared_set_is_free(const FeasibleSet& s) {
  if (!s.linear.empty() || !s.nonlinear.empty() || s.any_integral()) return false;
  for (int k = 0; k < s.n; ++k)
    if (std::isfinite(s.lower[k]) || std::isfinite(s.upper[k])) return false;
  return true;
}

bool shared_set_is_box(const FeasibleSet& s, const PriceBox& box) {
  if (!s.linear.empty() || !s.nonlinear.empty() || s.any_integral()) return false;
  for (int k = 0; k < s.n; ++k)
    if (s.lower[k] != box.lower[k] || s.upper[k] != box.upper[k]) return false;
  return true;
}

bool same_polynomial(const Polynomial& a, const Polynomial& b) {
  Polynomial d = a;
  Polynomial nb = b;
  nb *= -1.0;
  d += nb;
  double scale = 1.0;
  for (const auto& [m, c] : a.terms()) scale = std::max(scale, std::abs(c));
  for (const auto& [m, c] : d.terms())
    if (std::abs(c) > 1e-12 * scale) return false;
  return true;
}

double evaluate_block(const Polynomial& p, int player, int m, const std::vector<double>& z) {
  std::vector<std::vector<double>> ys(m);
  ys[player] = z;
  return p.evaluate({}, ys);
}

// Row over (x, y) expected for the balance of commodity k.
struct ExpectedRow {
  std::vector<double> coefs;
  double rhs = 0.0;
  bool zero = true;
};

}  // namespace

// ---- detection ------------------------------------------------------------------

Detection detect_price_taking(const GameInstance& game) {
  Detection out;
  try {
    game.validate();
  } catch (const std::exception& e) {
    out.reason = std::string("invalid game: ") + e.what();
    return out;
  }
  const int m = game.num_players();
  const int n0 = game.n0;
  const bool free_x = shared_set_is_free(game.shared_set);
  const bool box_x = game.price_box && shared_set_is_box(game.shared_set, *game.price_box);
  if (!free_x && !box_x) {
    out.reason = "X is neither free nor equal to the price box";
    return out;
  }
  if (!game.global_nonlinear.empty()) {
    out.reason = "G has nonlinear rows; a price-taking G is a linear balance";
    return out;
  }
  if (!game.has_constant_feasible_sets()) {
    out.reason = "some feasible set depends on x";
    return out;
  }
  PriceTakingGame ptg;
  ptg.game = game;
  ptg.players.resize(m);
  for (int i = 0; i < m; ++i) {
    const auto& p = game.players[i];
    Polynomial obj;
    try {
      obj = p.objective.expand();
    } catch (const std::exception& e) {
      out.reason = who(i) + ": objective expansion failed: " + e.what();
      return out;
    }
    auto& part = ptg.players[i];
    part.slopes.assign(n0, Polynomial());
    if (p.price_taking_form) {
      const auto& f = *p.price_taking_form;
      if (static_cast<int>(f.slopes.size()) != n0) {
        out.reason = who(i) + ": declared price-taking form has the wrong number of slopes";
        return out;
      }
      part.base = f.base.expand();
      Polynomial rebuilt = part.base;
      for (int k = 0; k < n0; ++k) {
        part.slopes[k] = f.slopes[k].expand();
        rebuilt += Polynomial::variable(VarRef::shared(k)).times(part.slopes[k], 100000);
      }
      if (!same_polynomial(rebuilt, obj)) {
        out.reason = who(i) + ": declared price-taking form does not reproduce the objective";
        return out;
      }
    } else {
      const auto split = obj.split_affine_in_shared();
      if (!split) {
        out.reason = who(i) + ": objective is not affine in x";
        return out;
      }
      part.base = split->base;
      for (const auto& [k, s] : split->slopes) part.slopes[k] = s;
    }
    if (part.base.degree_in_shared() > 0) {
      out.reason = who(i) + ": base term depends on x";
      return out;
    }
    for (int k = 0; k < n0; ++k) {
      if (part.slopes[k].degree_in_shared() > 0 || part.slopes[k].degree() > 1) {
        out.reason = who(i) + ": coefficient of x_" + std::to_string(k) + " is not affine in y_i";
        return out;
      }
    }
  }

  // Expected balance rows over (x, y).
  const int width = game.total_dimension();
  std::vector<ExpectedRow> expect(n0);
  for (int k = 0; k < n0; ++k) {
    auto& e = expect[k];
    e.coefs.assign(width, 0.0);
    for (int i = 0; i < m; ++i) {
      for (const auto& [mono, c] : ptg.players[i].slopes[k].terms()) {
        if (mono.empty()) {
          e.rhs -= c;
        } else {
          e.coefs[game.block_offset(i) + mono[0].index] += c;
        }
        if (c != 0.0) e.zero = false;
      }
    }
  }
  ptg.balance_row.assign(n0, -1);
  std::vector<bool> used(game.global_linear.size(), false);
  for (int k = 0; k < n0; ++k) {
    if (expect[k].zero) continue;
    for (std::size_t r = 0; r < game.global_linear.size() && ptg.balance_row[k] < 0; ++r) {
      if (used[r]) continue;
      const auto& row = game.global_linear[r];
      if (row.sense != Sense::eq) continue;
      // row = s * expected for some s != 0
      double s = 0.0;
      bool ok = true;
      for (int j = 0; j < width && ok; ++j) {
        const double a = row.coefs[j];
        const double b = expect[k].coefs[j];
        if (b == 0.0) {
          ok = std::abs(a) <= 1e-12;
        } else if (s == 0.0) {
          s = a / b;
          ok = s != 0.0;
        } else {
          ok = std::abs(a - s * b) <= 1e-12 * (1.0 + std::abs(a));
        }
      }
      if (ok && s != 0.0 && std::abs(row.rhs - s * expect[k].rhs) <= 1e-12 * (1.0 + std::abs(row.rhs))) {
        ptg.balance_row[k] = static_cast<int>(r);
        used[r] = true;
      }
    }
    if (ptg.balance_row[k] < 0) {
      out.reason = "no row of G is the balance of commodity " + std::to_string(k) +
                   " (sum of the x_" + std::to_string(k) + " coefficients)";
      return out;
    }
  }
  for (std::size_t r = 0; r < used.size(); ++r) {
    if (!used[r]) {
      out.reason = "row '" + game.global_linear[r].name + "' of G is not a balance row";
      return out;
    }
  }
  out.ptg = std::move(ptg);
  return out;
}

BoundednessCheck verify_boundedness_at(const PriceTakingGame& ptg, std::span<const double> x,
                                       const std::vector<PlayerOracleBinding>& bindings) {
  BoundednessCheck out;
  const auto res = solve_players(ptg.game, x, bindings);
  for (int i = 0; i < static_cast<int>(res.size()); ++i) {
    if (res[i].status == SolveStatus::unbounded) {
      out.unbounded_players.push_back(i);
    } else if (!res[i].optimal()) {
      throw std::runtime_error(who(i) + " oracle: " + to_string(res[i].status) + " " + res[i].detail);
    }
  }
  out.bounded = out.unbounded_players.empty();
  out.message = out.bounded ? "every player problem is bounded"
                            : std::to_string(out.unbounded_players.size()) + " player problem(s) unbounded";
  return out;
}

// ---- primal ---------------------------------------------------------------------

namespace {

struct PotentialLinks {
  bool ok = false;
  std::vector<int> nodes;
  std::vector<std::pair<int, int>> arcs;  // from, to columns
  std::vector<double> scale;
  std::vector<int> flows;
};

PotentialLinks potential_links(const std::vector<SquareLink>& links) {
  PotentialLinks t;
  for (const auto& l : links) {
    if (l.terms.size() != 2 || l.terms[0].second != -l.terms[1].second || l.terms[0].second == 0.0) return t;
    const auto [a, ca] = l.terms[0];
    const auto [c, cc] = l.terms[1];
    (void)cc;
    t.arcs.emplace_back(ca > 0 ? a : c, ca > 0 ? c : a);
    t.scale.push_back(l.coef / std::abs(ca));
    t.flows.push_back(l.var);
    for (int v : {a, c})
      if (std::find(t.nodes.begin(), t.nodes.end(), v) == t.nodes.end()) t.nodes.push_back(v);
  }
  t.ok = true;
  return t;
}

bool linear_feasible(const QpProblem& lp, const std::vector<bool>& integral, const Eigen::VectorXd& v) {
  for (int j = 0; j < lp.num_vars(); ++j) {
    if (v[j] < lp.lower[j] - 1e-9 || v[j] > lp.upper[j] + 1e-9) return false;
    if (integral[j] && v[j] != std::round(v[j])) return false;
  }
  if (lp.num_rows() == 0) return true;
  const Eigen::VectorXd act = lp.rows * v - lp.rhs;
  for (int r = 0; r < lp.num_rows(); ++r) {
    const double s = 1e-9 * (1.0 + std::abs(lp.rhs[r]));
    if (lp.senses[r] == Sense::eq ? std::abs(act[r]) > s : act[r] > s) return false;
  }
  return true;
}

// Keeps flows and every non-pressure variable, recomputes pressures from the
// flows on each tree component and shifts them into the boxes.
bool place_potentials(const PotentialLinks& t, const QpProblem& lp, Eigen::VectorXd& v) {
  std::map<int, std::vector<std::pair<int, double>>> adj;
  for (std::size_t a = 0; a < t.arcs.size(); ++a) {
    const double d = t.scale[a] * v[t.flows[a]] * v[t.flows[a]];
    adj[t.arcs[a].first].emplace_back(t.arcs[a].second, -d);
    adj[t.arcs[a].second].emplace_back(t.arcs[a].first, d);
  }
  std::map<int, double> phi;
  for (int root : t.nodes) {
    if (phi.count(root)) continue;
    std::vector<int> comp{root};
    phi[root] = 0.0;
    for (std::size_t q = 0; q < comp.size(); ++q) {
      for (const auto& [nb, d] : adj[comp[q]]) {
        const double want = phi[comp[q]] + d;
        if (!phi.count(nb)) {
          phi[nb] = want;
          comp.push_back(nb);
        } else if (std::abs(phi[nb] - want) > 1e-9 * (1.0 + std::abs(want))) {
          return false;  // cycle with inconsistent drops
        }
      }
    }
    double lo = -kInf, hi = kInf;
    for (int c : comp) {
      lo = std::max(lo, lp.lower[c] - phi[c]);
      hi = std::min(hi, lp.upper[c] - phi[c]);
    }
    if (lo > hi) return false;
    const double shift = std::clamp(v[root] - phi[root], lo, hi);
    for (int c : comp) v[c] = phi[c] + shift;
  }
  return true;
}

}  // namespace

PrimalResult solve_primal(const PriceTakingGame& ptg, const PrimalOptions& opt) {
  const auto& g = ptg.game;
  const int m = g.num_players();
  const int ny = g.total_dimension() - g.n0;
  PrimalResult out;
  ProblemBuilder b(ny, [&](VarRef v) { return v.is_shared() ? -1 : g.block_offset(v.player) - g.n0 + v.index; });
  std::vector<NonlinearConstraint> nonlinear;
  try {
    for (int i = 0; i < m; ++i) {
      auto nl = b.add_block(g.players[i].feasible_set, g.block_offset(i) - g.n0);
      nonlinear.insert(nonlinear.end(), nl.begin(), nl.end());
      b.add_objective(ptg.players[i].base);
    }
    for (const auto& row : g.global_linear) {
      Eigen::VectorXd a(ny);
      for (int j = 0; j < ny; ++j) a[j] = row.coefs[g.n0 + j];
      b.add_row(a, row.sense, row.rhs);
    }
    for (const auto& row : nonlinear) {
      if (row.sense != Sense::eq) throw StructureError("nonlinear inequality in a player set");
      b.add_square_link(row.lhs.expand(), row.rhs);
    }
  } catch (const StructureError& e) {
    out.message = std::string("primal outside built-in coverage: ") + e.what();
    return out;
  }
  auto unpack = [&](const Eigen::VectorXd& v) {
    std::vector<std::vector<double>> y(m);
    for (int i = 0; i < m; ++i) {
      const int off = g.block_offset(i) - g.n0;
      y[i].assign(v.data() + off, v.data() + off + g.players[i].n);
    }
    return y;
  };
  auto residual_of = [&](const std::vector<std::vector<double>>& y) {
    GamePoint pt;
    pt.x.assign(g.n0, 0.0);
    if (g.price_box)
      for (int k = 0; k < g.n0; ++k) pt.x[k] = std::clamp(0.0, g.price_box->lower[k], g.price_box->upper[k]);
    pt.y = y;
    return check_point_feasible(g, pt).max_residual();
  };

  if (b.links().empty()) {
    MiqpOptions mo;
    mo.parallel = opt.parallel;
    const auto r = solve_miqp(b.miqp(), mo);
    out.status = r.status;
    out.method = "miqp";
    out.message = r.message;
    if (r.status == SolveStatus::optimal) {
      out.value = r.objective + b.objective_constant();
      out.lower_bound = out.value;
      out.y = unpack(r.x);
      out.certified = true;
      out.max_residual = residual_of(out.y);
      out.nodes = static_cast<int>(r.assignments);
    }
    return out;
  }

  if (b.has_quadratic()) {
    out.message = "primal with square links needs a linear objective";
    return out;
  }
  SquareLinkProblem sp = b.square_link();
  // Bound each linked variable through the range of its link's left side.
  for (const auto& l : sp.links) {
    double hi = 0.0;
    for (const auto& [j, a] : l.terms) hi += std::max(a * sp.lp.lower[j], a * sp.lp.upper[j]);
    if (!std::isfinite(hi)) continue;
    const double f = hi > 0.0 ? std::sqrt(hi / l.coef) : 0.0;
    sp.lp.lower[l.var] = std::max(sp.lp.lower[l.var], -f);
    sp.lp.upper[l.var] = std::min(sp.lp.upper[l.var], f);
    if (sp.lp.lower[l.var] > sp.lp.upper[l.var]) {
      out.status = SolveStatus::infeasible;
      out.method = "spatial_bb";
      out.message = "square link incompatible with variable bounds";
      return out;
    }
  }
  const PotentialLinks pl = potential_links(sp.links);
  SbbOptions so;
  so.abs_gap = opt.abs_gap;
  so.max_nodes = opt.max_nodes;
  if (pl.ok) {
    so.repair = [&](const Eigen::VectorXd& v) -> std::optional<Eigen::VectorXd> {
      for (int mode = 0; mode < 2; ++mode) {
        Eigen::VectorXd c = v;
        for (int j = 0; j < c.size(); ++j)
          if (sp.integral[j]) c[j] = mode == 0 ? std::round(c[j]) : std::ceil(c[j] - 1e-9);
        if (!place_potentials(pl, sp.lp, c)) continue;
        if (linear_feasible(sp.lp, sp.integral, c)) return c;
      }
      return std::nullopt;
    };
  }
  const auto r = solve_square_link(sp, so);
  out.status = r.status;
  out.method = "spatial_bb";
  out.nodes = r.nodes;
  out.message = r.message;
  if (r.status == SolveStatus::optimal) {
    out.value = r.objective + b.objective_constant();
    out.lower_bound = r.lower_bound + b.objective_constant();
    out.y = unpack(r.x);
    out.certified = r.certified;
    out.max_residual = residual_of(out.y);
    if (out.message.empty())
      out.message = "branch-and-bound closed the gap (" + std::to_string(r.nodes) + " nodes, " +
                    std::to_string(r.lp_solves) + " LPs)";
  }
  return out;
}

// ---- dual -----------------------------------------------------------------------

DualValue evaluate_dual(const PriceTakingGame& ptg, std::span<const double> x,
                        const std::vector<PlayerOracleBinding>& bindings, bool parallel) {
  DualValue out;
  out.responses = solve_players(ptg.game, x, bindings, ParallelOptions{parallel});
  double total = 0.0;
  out.ok = true;
  for (int i = 0; i < static_cast<int>(out.responses.size()); ++i) {
    const auto& r = out.responses[i];
    if (r.status == SolveStatus::unbounded) {
      out.unbounded_players.push_back(i);
    } else if (r.optimal()) {
      total += r.value.value();
    } else {
      out.ok = false;
      out.message = who(i) + " oracle: " + to_string(r.status) + (r.detail.empty() ? "" : " (" + r.detail + ")");
      return out;
    }
  }
  if (!out.unbounded_players.empty()) {
    out.value = ExtendedReal::minus_infinity();
    out.message = who(out.unbounded_players.front()) + " is unbounded at these prices";
  } else {
    out.value = ExtendedReal::finite(total);
  }
  return out;
}

DualResult dual_cutting_plane(const PriceTakingGame& ptg, const std::vector<PlayerOracleBinding>& bindings,
                              const DualOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  const int n0 = ptg.n0();
  const int m = ptg.game.num_players();
  const PriceBox box = opt.box ? *opt.box : (ptg.game.price_box ? *ptg.game.price_box : PriceBox{});
  if (static_cast<int>(box.lower.size()) != n0 || static_cast<int>(box.upper.size()) != n0)
    throw std::invalid_argument("dual cutting plane needs a price box with one interval per commodity");
  for (int k = 0; k < n0; ++k)
    if (!std::isfinite(box.lower[k]) || !std::isfinite(box.upper[k]) || box.lower[k] > box.upper[k])
      throw std::invalid_argument("dual cutting plane needs a finite price box");
  if (static_cast<int>(bindings.size()) != m) throw std::invalid_argument("one oracle binding per player required");

  DualResult out;
  out.pool.points.resize(m);
  std::vector<double> x = opt.x0.empty() ? std::vector<double>(n0, 0.0) : opt.x0;
  if (static_cast<int>(x.size()) != n0) throw std::invalid_argument("x0 has the wrong dimension");
  for (int k = 0; k < n0; ++k) x[k] = std::clamp(x[k], box.lower[k], box.upper[k]);

  // Relaxed dual LP over (x, w): max sum w  s.t.  w_i - sum_k x_k b_ik(z) <= a_i(z).
  DenseLinearProgram lp = DenseLinearProgram::with_vars(n0 + m, Optimize::maximize);
  for (int k = 0; k < n0; ++k) {
    lp.lower[k] = box.lower[k];
    lp.upper[k] = box.upper[k];
  }
  for (int i = 0; i < m; ++i) lp.objective[n0 + i] = 1.0;

  auto finish = [&](SolveStatus s, std::string msg) {
    out.status = s;
    out.message = std::move(msg);
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
  };
  auto add_cuts = [&](const DualValue& dv) {
    for (int i = 0; i < m; ++i) {
      const auto& z = dv.responses[i].minimizer;
      if (!out.pool.add(i, z)) continue;
      Eigen::VectorXd row = Eigen::VectorXd::Zero(n0 + m);
      row[n0 + i] = 1.0;
      for (int k = 0; k < n0; ++k) row[k] = -evaluate_block(ptg.players[i].slopes[k], i, m, z);
      lp.add_row(row, Sense::le, evaluate_block(ptg.players[i].base, i, m, z));
    }
  };
  auto evaluate = [&](const std::vector<double>& at, double& value) -> std::optional<DualResult> {
    const DualValue dv = evaluate_dual(ptg, at, bindings, opt.parallel);
    if (!dv.ok) return finish(SolveStatus::failed, "dual evaluation failed: " + dv.message);
    if (!dv.value.is_finite())
      return finish(SolveStatus::unbounded, "dual function is -inf at a probed price vector: " + dv.message);
    value = dv.value.value();
    if (out.x.empty() || value > out.value) {
      out.value = value;
      out.x = at;
      out.responses.clear();
      for (const auto& r : dv.responses) out.responses.push_back(r.minimizer);
    }
    add_cuts(dv);
    return std::nullopt;
  };

  double v0 = 0.0;
  if (auto fail = evaluate(x, v0)) return *fail;
  out.upper = kInf;
  Eigen::VectorXd start = Eigen::VectorXd::Zero(n0 + m);
  for (int k = 0; k < n0; ++k) start[k] = x[k];
  for (int it = 1; it <= opt.max_iter; ++it) {
    out.iterations = it;
    const auto r = solve_lp(lp, 1e-9, &start);
    if (r.status != SolveStatus::optimal)
      return finish(SolveStatus::failed, "relaxed dual LP: " + to_string(r.status) + " " + r.message);
    start = r.x;
    DualIteration rec;
    rec.iteration = it;
    rec.x.assign(r.x.data(), r.x.data() + n0);
    rec.lp_value = r.value;
    out.upper = std::min(out.upper, r.value);
    rec.upper = out.upper;
    if (out.upper - out.value <= opt.tol) {
      rec.value = out.value;
      rec.best = out.value;
      out.trace.push_back(std::move(rec));
      out.attained = true;
      break;
    }
    double v = 0.0;
    const std::size_t before = out.pool.total();
    if (auto fail = evaluate(rec.x, v)) return *fail;
    rec.value = v;
    rec.best = out.value;
    out.trace.push_back(std::move(rec));
    if (v > out.upper + 1e-9 * (1.0 + std::abs(v)))
      return finish(SolveStatus::failed, "dual value exceeds the relaxed dual bound (oracle not global)");
    if (out.upper - out.value <= opt.tol) {
      out.attained = true;
      break;
    }
    if (out.pool.total() == before)
      return finish(SolveStatus::failed, "no new cut while the gap is open (oracle/LP tolerance mismatch)");
  }
  for (int k = 0; k < n0; ++k) {
    // Prices that no player responds to are free in the LP; their edges mean nothing.
    const bool priced = std::any_of(ptg.players.begin(), ptg.players.end(),
                                    [&](const PriceTakingPlayer& p) { return !p.slopes[k].terms().empty(); });
    if (priced && (out.x[k] - box.lower[k] <= opt.edge_tol || box.upper[k] - out.x[k] <= opt.edge_tol))
      out.active_edges.push_back(k);
  }
  out.box_edge_active = !out.active_edges.empty();
  if (out.box_edge_active)
    return finish(SolveStatus::failed, "price of commodity " + std::to_string(out.active_edges.front()) +
                                           " sits on a box edge; the bound may be artificial");
  if (!out.attained)
    return finish(SolveStatus::optimal, "iteration limit: best dual reported, supremum not attained within tol");
  return finish(SolveStatus::optimal, "relaxed dual bound met within tol");
}

// ---- assembly -------------------------------------------------------------------

PrimalDualResult assemble_min_disequilibrium(const PriceTakingGame& ptg, const PrimalResult& primal,
                                             const DualResult& dual, const std::vector<PlayerOracleBinding>& bindings,
                                             double eps_eq, double gap_tol) {
  if (primal.status != SolveStatus::optimal) throw std::invalid_argument("assemble: primal solve did not complete");
  if (dual.x.empty()) throw std::invalid_argument("assemble: dual solve produced no price vector");
  PrimalDualResult out;
  out.primal_value = primal.value;
  out.dual_value = dual.value;
  out.delta = primal.value - dual.value;
  out.point.x = dual.x;
  out.point.y = primal.y;
  out.lagrangian_minimizers = dual.responses;
  out.dual_attained = dual.attained;
  out.negative_gap = out.delta < -gap_tol * (1.0 + std::abs(primal.value));
  if (out.negative_gap) {
    out.message = "negative duality gap: a primal or player solve was not global";
    return out;
  }
  if (out.delta <= eps_eq) {
    out.check = certify_equilibrium(ptg.game, out.point, bindings, eps_eq);
    out.equilibrium = out.check->is_equilibrium;
    out.message = out.equilibrium ? "equilibrium: prices and primal solution certified"
                                  : "zero gap but the certificate failed: " + out.check->message;
  } else {
    out.message = "minimum disequilibrium equals the duality gap";
  }
  return out;
}

}  // namespace gnep
