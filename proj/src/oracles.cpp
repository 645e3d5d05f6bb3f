#include "gnep/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>

#include "gnep/compile.hpp"
#include "gnep/miqp.hpp"
#include "gnep/spatial_bb.hpp"
#include "gnep/subsolvers.hpp"

namespace gnep {

std::string to_string(CertificateKind k) {
  switch (k) {
    case CertificateKind::none: return "none";
    case CertificateKind::enumeration_complete: return "enumeration-complete";
    case CertificateKind::convexity_kkt: return "convexity+kkt";
    case CertificateKind::vertex_enumeration: return "vertex-enumeration";
    case CertificateKind::branch_and_bound: return "branch-and-bound";
    case CertificateKind::external: return "external";
  }
  return "none";
}

std::string to_string(OracleKind k) {
  switch (k) {
    case OracleKind::enumeration: return "enumeration";
    case OracleKind::box_lp: return "box_lp";
    case OracleKind::fixed_charge: return "fixed_charge";
    case OracleKind::mixed_binary_sep_qp: return "mixed_binary_sep_qp";
    case OracleKind::tree_transmission: return "tree_transmission";
    case OracleKind::custom: return "custom";
  }
  return "custom";
}

std::optional<OracleKind> oracle_kind_from_string(const std::string& s) {
  for (auto k : {OracleKind::enumeration, OracleKind::box_lp, OracleKind::fixed_charge,
                 OracleKind::mixed_binary_sep_qp, OracleKind::tree_transmission})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

namespace {

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

std::map<std::string, CustomOracleFactory>& registry() {
  static std::map<std::string, CustomOracleFactory> r;
  return r;
}

std::string who(int player) { return "player " + std::to_string(player); }

// Fills value/minimizer from a candidate minimizer, re-evaluating the
// objective so the reported value is exactly g_i(x, z).
OracleResult finish(const Player& p, std::span<const double> x, std::vector<double> z, CertificateKind cert,
                    std::string detail, const Tolerances& tol) {
  OracleResult r;
  r.status = SolveStatus::optimal;
  r.value = ExtendedReal::finite(p.objective.evaluate_local(x, p.id, z));
  r.certificate = cert;
  r.detail = std::move(detail);
  const auto viol = p.feasible_set.violations(z, x, tol);
  for (const auto& v : viol) r.residual = std::max(r.residual, v.residual);
  if (!viol.empty()) {
    r.status = SolveStatus::failed;
    r.detail += "; minimizer violates " + viol.front().what;
  }
  r.minimizer = std::move(z);
  return r;
}

OracleResult non_optimal(SolveStatus s, std::string detail) {
  OracleResult r;
  r.status = s;
  r.value = s == SolveStatus::unbounded ? ExtendedReal::minus_infinity() : ExtendedReal::plus_infinity();
  r.detail = std::move(detail);
  return r;
}

// The player's problem at fixed x as dense data over y.
struct PlayerModel {
  ProblemBuilder builder;
  std::vector<NonlinearConstraint> nonlinear;
};

PlayerModel player_model(const Player& p, const Polynomial& objective, std::span<const double> x) {
  const int id = p.id;
  PlayerModel m{ProblemBuilder(p.n, [id](VarRef v) { return v.player == id ? v.index : -1; }), {}};
  m.nonlinear = m.builder.add_block(p.feasible_set, 0);
  m.builder.add_objective(objective.substitute_block(-1, x));
  return m;
}

// ---- enumeration -----------------------------------------------------------

void check_enumeration(const Player& p) {
  if (!p.feasible_set.all_integral()) throw StructureError(who(p.id) + ": enumeration needs all-integral Y_i");
}

OracleResult run_enumeration(const Player& p, std::span<const double> x, const Tolerances& tol) {
  auto res = enumerate_assignments(p.feasible_set, x, [&](std::span<const double> z) {
    return p.objective.evaluate_local(x, p.id, z);
  });
  if (res.status == SolveStatus::infeasible) return non_optimal(SolveStatus::infeasible, res.message);
  if (res.status != SolveStatus::optimal) return non_optimal(SolveStatus::failed, res.message);
  return finish(p, x, res.assignment, CertificateKind::enumeration_complete,
                "all " + std::to_string(res.visited) + " lattice points scanned", tol);
}

// ---- LP / fixed-charge -----------------------------------------------------

void check_linear_player(const Player& p, const Polynomial& obj) {
  if (!p.feasible_set.nonlinear.empty()) throw StructureError(who(p.id) + ": nonlinear constraints in Y_i");
  if (obj.degree_in_players() > 1) throw StructureError(who(p.id) + ": objective is not linear in y_i");
}

void check_box_lp(const Player& p, const Polynomial& obj) {
  check_linear_player(p, obj);
  if (p.feasible_set.any_integral()) throw StructureError(who(p.id) + ": box_lp does not accept integer variables");
}

int single_binary(const Player& p) {
  int b = -1;
  const auto& s = p.feasible_set;
  for (int j = 0; j < s.n; ++j) {
    if (!s.integral[j]) continue;
    if (b >= 0) throw StructureError(who(p.id) + ": more than one integer variable");
    if (s.lower[j] < 0.0 || s.upper[j] > 1.0) throw StructureError(who(p.id) + ": integer variable is not binary");
    b = j;
  }
  if (b < 0) throw StructureError(who(p.id) + ": no binary gate variable");
  return b;
}

void check_fixed_charge(const Player& p, const Polynomial& obj) {
  check_linear_player(p, obj);
  single_binary(p);
}

OracleResult run_linear(const Player& p, const Polynomial& obj, std::span<const double> x, const Tolerances& tol,
                        bool with_binary) {
  auto m = player_model(p, obj, x);
  MiqpOptions mo;
  mo.parallel = false;
  const auto r = solve_miqp(m.builder.miqp(), mo);
  if (r.status == SolveStatus::unbounded)
    return non_optimal(SolveStatus::unbounded, "objective decreases along a feasible ray");
  if (r.status == SolveStatus::infeasible) return non_optimal(SolveStatus::infeasible, r.message);
  if (r.status != SolveStatus::optimal) return non_optimal(SolveStatus::failed, r.message);
  std::vector<double> z(r.x.data(), r.x.data() + r.x.size());
  return finish(p, x, std::move(z), CertificateKind::convexity_kkt,
                with_binary ? "binary gate enumerated; LP optimality certified per branch" : "LP optimality certified",
                tol);
}

// ---- mixed-binary separable QP --------------------------------------------

void check_sep_qp(const Player& p, const Polynomial& obj) {
  const int u = single_binary(p);
  if (!p.feasible_set.nonlinear.empty()) throw StructureError(who(p.id) + ": nonlinear constraints in Y_i");
  for (const auto& [m, c] : obj.terms()) {
    std::vector<int> ys;
    for (const auto& v : m)
      if (!v.is_shared()) ys.push_back(v.index);
    if (ys.size() > 2) throw StructureError(who(p.id) + ": objective term of degree > 2 in y_i");
    if (ys.size() == 2 && (ys[0] != ys[1] || ys[0] == u))
      throw StructureError(who(p.id) + ": objective is not separable");
    if (ys.size() == 2 && m.size() > 2) throw StructureError(who(p.id) + ": quadratic coefficient depends on x");
    if (ys.size() == 2 && c < 0.0) throw StructureError(who(p.id) + ": negative curvature; bind a custom oracle");
  }
  for (const auto& row : p.feasible_set.linear) {
    int cont = 0;
    for (int j = 0; j < p.n; ++j)
      if (j != u && row.coefs[j] != 0.0) ++cont;
    if (cont > 1) throw StructureError(who(p.id) + ": a constraint couples two continuous variables");
  }
}

OracleResult run_sep_qp(const Player& p, const Polynomial& obj, std::span<const double> x, const Tolerances& tol) {
  const int u = single_binary(p);
  const auto& s = p.feasible_set;
  const Polynomial px = obj.substitute_block(-1, x);
  std::vector<double> lin(p.n, 0.0), quad(p.n, 0.0);
  double cst = 0.0;
  for (const auto& [m, c] : px.terms()) {
    if (m.empty()) cst += c;
    else if (m.size() == 1) lin[m[0].index] += c;
    else quad[m[0].index] += 2.0 * c;  // c y^2 = 0.5 (2c) y^2
  }
  bool have = false;
  double best = 0.0;
  std::vector<double> best_z;
  bool unbounded = false;
  for (int uv = static_cast<int>(std::ceil(s.lower[u])); uv <= static_cast<int>(std::floor(s.upper[u])); ++uv) {
    std::vector<double> lo(s.lower), hi(s.upper);
    lo[u] = hi[u] = uv;
    bool feasible = true;
    for (const auto& row : s.linear) {
      int j = -1;
      for (int t = 0; t < p.n; ++t)
        if (t != u && row.coefs[t] != 0.0) j = t;
      const double rest = row.rhs - row.coefs[u] * uv;
      if (j < 0) {
        if (row.sense == Sense::eq ? std::abs(rest) > tol.linear : rest < -tol.linear) feasible = false;
        continue;
      }
      const double bound = rest / row.coefs[j];
      if (row.sense == Sense::eq) {
        lo[j] = std::max(lo[j], bound);
        hi[j] = std::min(hi[j], bound);
      } else if (row.coefs[j] > 0) {
        hi[j] = std::min(hi[j], bound);
      } else {
        lo[j] = std::max(lo[j], bound);
      }
    }
    std::vector<double> z(p.n, 0.0);
    z[u] = uv;
    double val = cst + lin[u] * uv + 0.5 * quad[u] * uv * uv;
    for (int j = 0; j < p.n && feasible; ++j) {
      if (j == u) continue;
      if (lo[j] > hi[j] + tol.linear) {
        feasible = false;
        break;
      }
      if (lo[j] > hi[j]) hi[j] = lo[j];
      double y;
      if (quad[j] > 0) {
        y = std::clamp(-lin[j] / quad[j], lo[j], hi[j]);
      } else if (lin[j] > 0) {
        y = lo[j];
      } else if (lin[j] < 0) {
        y = hi[j];
      } else {
        y = std::clamp(0.0, lo[j], hi[j]);
      }
      if (!std::isfinite(y)) {
        unbounded = true;
        break;
      }
      z[j] = y;
      val += lin[j] * y + 0.5 * quad[j] * y * y;
    }
    if (unbounded) break;
    if (!feasible) continue;
    if (!have || val < best - 1e-12 * (1.0 + std::abs(best))) {
      have = true;
      best = val;
      best_z = z;
    }
  }
  if (unbounded) return non_optimal(SolveStatus::unbounded, "continuous variable unbounded in a descent direction");
  if (!have) return non_optimal(SolveStatus::infeasible, "both gate branches infeasible");
  return finish(p, x, std::move(best_z), CertificateKind::enumeration_complete,
                "gate enumerated; separable convex branches solved in closed form", tol);
}

// ---- tree transmission -----------------------------------------------------

struct TreeStructure {
  std::vector<int> nodes;                          // pressure columns
  std::vector<std::pair<int, int>> arcs;           // (from, to) pressure columns
  std::vector<double> scale;                       // p_from - p_to = scale * f^2
  std::vector<int> flows;                          // flow column per arc
};

TreeStructure analyse_tree(const Player& p) {
  const auto& s = p.feasible_set;
  if (s.any_integral()) throw StructureError(who(p.id) + ": transmission player has integer variables");
  TreeStructure t;
  ProblemBuilder b(p.n, [&](VarRef v) { return v.player == p.id ? v.index : -1; });
  for (const auto& row : s.nonlinear) {
    if (row.sense != Sense::eq) throw StructureError(who(p.id) + ": nonlinear inequality in a transmission player");
    if (row.lhs.references_shared()) throw StructureError(who(p.id) + ": x-dependent constraint");
    b.add_square_link(row.lhs.expand(), row.rhs);
  }
  std::map<int, int> node_index;
  for (const auto& l : b.links()) {
    if (l.terms.size() != 2 || l.terms[0].second != -l.terms[1].second || l.terms[0].second == 0.0)
      throw StructureError(who(p.id) + ": link is not a potential difference between two nodes");
    const auto [a, ca] = l.terms[0];
    const auto [c, cc] = l.terms[1];
    const int from = ca > 0 ? a : c;
    const int to = ca > 0 ? c : a;
    t.arcs.emplace_back(from, to);
    t.scale.push_back(l.coef / std::abs(ca));
    t.flows.push_back(l.var);
    for (int v : {from, to})
      if (!node_index.count(v)) {
        node_index[v] = static_cast<int>(t.nodes.size());
        t.nodes.push_back(v);
      }
  }
  for (std::size_t a = 0; a < t.flows.size(); ++a)
    for (int v : t.nodes)
      if (v == t.flows[a]) throw StructureError(who(p.id) + ": a flow variable is also a pressure");
  // Tree: connected and |arcs| = |nodes| - 1.
  std::vector<int> parent(t.nodes.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int v) { return parent[v] == v ? v : parent[v] = find(parent[v]); };
  for (const auto& [from, to] : t.arcs) {
    const int a = find(node_index[from]);
    const int c = find(node_index[to]);
    if (a == c) throw StructureError(who(p.id) + ": pipeline graph has a cycle; bind a custom oracle");
    parent[a] = c;
  }
  if (!t.nodes.empty() && t.arcs.size() + 1 != t.nodes.size())
    throw StructureError(who(p.id) + ": pipeline graph is not connected");
  for (int v : t.nodes)
    if (!std::isfinite(s.lower[v]) || !std::isfinite(s.upper[v]))
      throw StructureError(who(p.id) + ": pressure variables need finite bounds");
  return t;
}

void check_tree(const Player& p, const Polynomial& obj) {
  if (obj.degree_in_players() > 1) throw StructureError(who(p.id) + ": objective is not linear in y_i");
  analyse_tree(p);
}

// Scales all flows by the largest lambda in [0, 1] for which a pressure
// profile inside the boxes exists, then places pressures.
std::optional<Eigen::VectorXd> repair_tree(const TreeStructure& t, const FeasibleSet& s, const Eigen::VectorXd& v) {
  const int nn = static_cast<int>(t.nodes.size());
  std::map<int, int> idx;
  for (int k = 0; k < nn; ++k) idx[t.nodes[k]] = k;
  std::vector<std::vector<std::pair<int, double>>> adj(nn);  // neighbour, potential(neigh) - potential(me) per unit
  for (std::size_t a = 0; a < t.arcs.size(); ++a) {
    const int from = idx[t.arcs[a].first];
    const int to = idx[t.arcs[a].second];
    const double f = v[t.flows[a]];
    const double d = t.scale[a] * f * f;
    adj[from].emplace_back(to, -d);
    adj[to].emplace_back(from, d);
  }
  std::vector<double> phi(nn, 0.0);
  std::vector<bool> seen(nn, false);
  std::vector<int> stack{0};
  seen[0] = true;
  while (!stack.empty()) {
    const int k = stack.back();
    stack.pop_back();
    for (const auto& [m, d] : adj[k])
      if (!seen[m]) {
        seen[m] = true;
        phi[m] = phi[k] + d;
        stack.push_back(m);
      }
  }
  auto shift_range = [&](double lam2) {
    double lo = -kInf, hi = kInf;
    for (int k = 0; k < nn; ++k) {
      lo = std::max(lo, s.lower[t.nodes[k]] - lam2 * phi[k]);
      hi = std::min(hi, s.upper[t.nodes[k]] - lam2 * phi[k]);
    }
    return std::pair{lo, hi};
  };
  double lam = 1.0;
  if (auto [lo, hi] = shift_range(1.0); lo > hi) {
    double a = 0.0, b = 1.0;
    if (auto [l0, h0] = shift_range(0.0); l0 > h0) return std::nullopt;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (a + b);
      auto [l, h] = shift_range(mid * mid);
      (l <= h ? a : b) = mid;
    }
    lam = a;
  }
  Eigen::VectorXd out = v;
  for (int f : t.flows) out[f] = lam * v[f];
  // Recompute potentials from the scaled flows to keep links exact.
  std::fill(phi.begin(), phi.end(), 0.0);
  std::fill(seen.begin(), seen.end(), false);
  for (auto& list : adj) list.clear();
  for (std::size_t a = 0; a < t.arcs.size(); ++a) {
    const int from = idx[t.arcs[a].first];
    const int to = idx[t.arcs[a].second];
    const double f = out[t.flows[a]];
    const double d = t.scale[a] * f * f;
    adj[from].emplace_back(to, -d);
    adj[to].emplace_back(from, d);
  }
  stack = {0};
  seen[0] = true;
  while (!stack.empty()) {
    const int k = stack.back();
    stack.pop_back();
    for (const auto& [m, d] : adj[k])
      if (!seen[m]) {
        seen[m] = true;
        phi[m] = phi[k] + d;
        stack.push_back(m);
      }
  }
  double lo = -kInf, hi = kInf;
  for (int k = 0; k < nn; ++k) {
    lo = std::max(lo, s.lower[t.nodes[k]] - phi[k]);
    hi = std::min(hi, s.upper[t.nodes[k]] - phi[k]);
  }
  if (lo > hi) return std::nullopt;
  // Stay close to the relaxation's pressure level.
  double shift = v[t.nodes[0]] - phi[0];
  shift = std::clamp(shift, lo, hi);
  for (int k = 0; k < nn; ++k) out[t.nodes[k]] = phi[k] + shift;
  return out;
}

OracleResult run_tree(const Player& p, const Polynomial& obj, const TreeStructure& t, std::span<const double> x,
                      const Tolerances& tol) {
  const auto& s = p.feasible_set;
  ProblemBuilder b(p.n, [&](VarRef v) { return v.player == p.id ? v.index : -1; });
  b.add_block(s, 0);
  b.add_objective(obj.substitute_block(-1, x));
  for (const auto& row : s.nonlinear) b.add_square_link(row.lhs.expand(), row.rhs);
  SquareLinkProblem sp = b.square_link();
  // Flow bounds implied by the pressure boxes.
  for (std::size_t a = 0; a < t.arcs.size(); ++a) {
    const double drop = s.upper[t.arcs[a].first] - s.lower[t.arcs[a].second];
    const double fmax = drop > 0 ? std::sqrt(drop / t.scale[a]) : 0.0;
    const int f = t.flows[a];
    sp.lp.lower[f] = std::max(sp.lp.lower[f], -fmax);
    sp.lp.upper[f] = std::min(sp.lp.upper[f], fmax);
    if (sp.lp.lower[f] > sp.lp.upper[f]) return non_optimal(SolveStatus::infeasible, "flow bounds incompatible");
  }
  for (int j = 0; j < p.n; ++j)
    if (!std::isfinite(sp.lp.lower[j]) && !std::isfinite(sp.lp.upper[j]) && sp.lp.linear[j] != 0.0)
      return non_optimal(SolveStatus::unbounded, "free variable with nonzero price");
  SbbOptions so;
  so.link_tol = 1e-9;
  so.abs_gap = 1e-8;
  so.repair = [&](const Eigen::VectorXd& v) { return repair_tree(t, s, v); };
  const auto r = solve_square_link(sp, so);
  if (r.status == SolveStatus::infeasible) return non_optimal(SolveStatus::infeasible, r.message);
  if (r.status == SolveStatus::unbounded) return non_optimal(SolveStatus::unbounded, r.message);
  if (r.status != SolveStatus::optimal || !r.certified)
    return non_optimal(SolveStatus::failed, "transmission branch-and-bound: " + r.message);
  std::vector<double> z(r.x.data(), r.x.data() + r.x.size());
  return finish(p, x, std::move(z), CertificateKind::branch_and_bound,
                "outer-approximation branch-and-bound closed the gap (" + std::to_string(r.nodes) + " nodes)", tol);
}

const Player& player_of(const GameInstance& game, int i) {
  if (i < 0 || i >= game.num_players()) throw std::out_of_range("player index out of range");
  return game.players[i];
}

void check_x(const GameInstance& game, std::span<const double> x) {
  if (static_cast<int>(x.size()) != game.n0) throw std::invalid_argument("x has wrong dimension");
}

}  // namespace

OracleResult enumeration_oracle(const GameInstance& game, int i, std::span<const double> x) {
  check_x(game, x);
  const auto& p = player_of(game, i);
  check_enumeration(p);
  return run_enumeration(p, x, game.tol);
}

OracleResult box_lp_oracle(const GameInstance& game, int i, std::span<const double> x) {
  check_x(game, x);
  const auto& p = player_of(game, i);
  const auto obj = p.objective.expand();
  check_box_lp(p, obj);
  return run_linear(p, obj, x, game.tol, false);
}

OracleResult fixed_charge_oracle(const GameInstance& game, int i, std::span<const double> x) {
  check_x(game, x);
  const auto& p = player_of(game, i);
  const auto obj = p.objective.expand();
  check_fixed_charge(p, obj);
  return run_linear(p, obj, x, game.tol, true);
}

OracleResult mixed_binary_sep_qp_oracle(const GameInstance& game, int i, std::span<const double> x) {
  check_x(game, x);
  const auto& p = player_of(game, i);
  const auto obj = p.objective.expand();
  check_sep_qp(p, obj);
  return run_sep_qp(p, obj, x, game.tol);
}

OracleResult tree_transmission_oracle(const GameInstance& game, int i, std::span<const double> x) {
  check_x(game, x);
  const auto& p = player_of(game, i);
  const auto obj = p.objective.expand();
  check_tree(p, obj);
  return run_tree(p, obj, analyse_tree(p), x, game.tol);
}

void register_custom_oracle(const std::string& name, CustomOracleFactory factory) {
  if (name == "auto" || oracle_kind_from_string(name)) throw std::invalid_argument("'" + name + "' is a built-in oracle name");
  std::lock_guard lock(registry_mutex());
  registry()[name] = std::move(factory);
}

bool has_custom_oracle(const std::string& name) {
  std::lock_guard lock(registry_mutex());
  return registry().count(name) > 0;
}

OracleKind auto_oracle_kind(const GameInstance& game, int i) {
  const auto& p = player_of(game, i);
  const auto obj = p.objective.expand();
  const auto& s = p.feasible_set;
  if (s.all_integral()) return OracleKind::enumeration;
  if (!s.nonlinear.empty()) return OracleKind::tree_transmission;
  int ints = 0;
  for (int j = 0; j < s.n; ++j) ints += s.integral[j] ? 1 : 0;
  if (ints == 0) return OracleKind::box_lp;
  if (obj.degree_in_players() <= 1) return OracleKind::fixed_charge;
  return OracleKind::mixed_binary_sep_qp;
}

PlayerOracleBinding bind_oracle(const GameInstance& game, int i, const std::string& requested) {
  const Player p = player_of(game, i);
  const Tolerances tol = game.tol;
  const int n0 = game.n0;
  PlayerOracleBinding b;
  b.player = i;
  std::string name = requested == "auto" ? to_string(auto_oracle_kind(game, i)) : requested;
  b.name = name;
  const auto kind = oracle_kind_from_string(name);
  if (!kind) {
    CustomOracleFactory factory;
    {
      std::lock_guard lock(registry_mutex());
      auto it = registry().find(name);
      if (it == registry().end()) throw StructureError(who(i) + ": unknown oracle '" + name + "'");
      factory = it->second;
    }
    b.kind = OracleKind::custom;
    b.solve = factory(game, i);
    return b;
  }
  b.kind = *kind;
  auto obj = std::make_shared<const Polynomial>(p.objective.expand());
  auto guard = [n0](std::span<const double> x) {
    if (static_cast<int>(x.size()) != n0) throw std::invalid_argument("x has wrong dimension");
  };
  switch (*kind) {
    case OracleKind::enumeration:
      check_enumeration(p);
      b.solve = [p, tol, guard](std::span<const double> x) {
        guard(x);
        return run_enumeration(p, x, tol);
      };
      break;
    case OracleKind::box_lp:
      check_box_lp(p, *obj);
      b.solve = [p, obj, tol, guard](std::span<const double> x) {
        guard(x);
        return run_linear(p, *obj, x, tol, false);
      };
      break;
    case OracleKind::fixed_charge:
      check_fixed_charge(p, *obj);
      b.solve = [p, obj, tol, guard](std::span<const double> x) {
        guard(x);
        return run_linear(p, *obj, x, tol, true);
      };
      break;
    case OracleKind::mixed_binary_sep_qp:
      check_sep_qp(p, *obj);
      b.solve = [p, obj, tol, guard](std::span<const double> x) {
        guard(x);
        return run_sep_qp(p, *obj, x, tol);
      };
      break;
    case OracleKind::tree_transmission: {
      check_tree(p, *obj);
      auto tree = std::make_shared<const TreeStructure>(analyse_tree(p));
      b.solve = [p, obj, tree, tol, guard](std::span<const double> x) {
        guard(x);
        return run_tree(p, *obj, *tree, x, tol);
      };
      break;
    }
    case OracleKind::custom: break;
  }
  return b;
}

std::vector<PlayerOracleBinding> bind_all(const GameInstance& game) {
  std::vector<PlayerOracleBinding> out;
  for (int i = 0; i < game.num_players(); ++i) out.push_back(bind_oracle(game, i, game.players[i].oracle));
  return out;
}

OracleResult solve_player(const GameInstance& game, int i, std::span<const double> x,
                          const PlayerOracleBinding& binding) {
  player_of(game, i);
  if (binding.player != i) throw std::invalid_argument("binding belongs to another player");
  if (game.players[i].depends_on_shared_feasibility())
    throw std::invalid_argument(who(i) + ": feasible set depends on x; only constant feasible sets are supported");
  OracleResult r = binding.solve(x);
  if (r.optimal() && r.minimizer.size() != static_cast<std::size_t>(game.players[i].n)) {
    r.status = SolveStatus::failed;
    r.detail = "oracle returned a minimizer of the wrong dimension";
  }
  return r;
}

std::vector<OracleResult> solve_players(const GameInstance& game, std::span<const double> x,
                                        const std::vector<PlayerOracleBinding>& bindings,
                                        const ParallelOptions& options) {
  const int m = game.num_players();
  if (static_cast<int>(bindings.size()) != m) throw std::invalid_argument("one binding per player required");
  std::vector<OracleResult> out(m);
#pragma omp parallel for schedule(dynamic, 1) if (options.parallel && m > 1)
  for (int i = 0; i < m; ++i) {
    try {
      out[i] = solve_player(game, i, x, bindings[i]);
    } catch (const std::exception& e) {
      out[i] = non_optimal(SolveStatus::failed, e.what());
    }
  }
  return out;
}

// ---- cut pools -------------------------------------------------------------

bool CutPool::contains(int player, const std::vector<double>& z) const {
  const auto& list = points.at(player);
  return std::find(list.begin(), list.end(), z) != list.end();
}

bool CutPool::add(int player, std::vector<double> z) {
  if (contains(player, z)) return false;
  points.at(player).push_back(std::move(z));
  return true;
}

std::size_t CutPool::total() const {
  std::size_t t = 0;
  for (const auto& l : points) t += l.size();
  return t;
}

// ---- lower-bounding problem -------------------------------------------------

namespace {

// Lattice points of an all-integral set that satisfy its constraints.
std::vector<std::vector<double>> lattice_points(const FeasibleSet& s, std::span<const double> shared,
                                                const Tolerances& tol, std::uint64_t cap) {
  if (lattice_size(s.lower, s.upper) > cap) throw std::length_error("lattice exceeds the enumeration cap");
  std::vector<std::vector<double>> out;
  std::vector<double> v(s.n);
  std::function<void(int)> rec = [&](int d) {
    if (d == s.n) {
      if (s.contains(v, shared, tol)) out.push_back(v);
      return;
    }
    for (double t = std::ceil(s.lower[d] - 1e-9); t <= std::floor(s.upper[d] + 1e-9); t += 1.0) {
      v[d] = t;
      rec(d + 1);
    }
  };
  rec(0);
  return out;
}

bool game_all_integral(const GameInstance& g) {
  if (!g.shared_set.all_integral()) return false;
  for (const auto& p : g.players)
    if (!p.feasible_set.all_integral()) return false;
  return true;
}

OracleResult lbp_enumerate(const GameInstance& g, const CutPool& pools) {
  const int m = g.num_players();
  const std::uint64_t cap = 1000000;
  const auto xs = lattice_points(g.shared_set, {}, g.tol, cap);
  std::vector<std::vector<std::vector<double>>> ys(m);
  std::uint64_t joint = xs.size();
  for (int i = 0; i < m; ++i) {
    ys[i] = lattice_points(g.players[i].feasible_set, {}, g.tol, cap);
    joint *= std::max<std::size_t>(ys[i].size(), 1);
    if (joint > cap) throw std::length_error("joint lattice exceeds the enumeration cap");
  }
  struct Best {
    bool have = false;
    double value = 0.0;
    std::uint64_t index = 0;
    std::vector<double> flat;
  };
  Best best;
  const long long nx = static_cast<long long>(xs.size());
#pragma omp parallel
  {
    Best local;
    std::vector<std::size_t> pick(m);
#pragma omp for schedule(dynamic, 1)
    for (long long a = 0; a < nx; ++a) {
      const auto& x = xs[a];
      std::vector<double> w(m);
      std::vector<std::vector<double>> gval(m);
      for (int i = 0; i < m; ++i) {
        double lo = kInf;
        for (const auto& z : pools.points[i]) lo = std::min(lo, g.players[i].objective.evaluate_local(x, i, z));
        w[i] = lo;
        for (const auto& y : ys[i]) gval[i].push_back(g.players[i].objective.evaluate_local(x, i, y));
      }
      std::uint64_t combos = 1;
      for (int i = 0; i < m; ++i) combos *= ys[i].size();
      GamePoint pt;
      pt.x = x;
      pt.y.resize(m);
      for (std::uint64_t c = 0; c < combos; ++c) {
        std::uint64_t rest = c;
        double val = 0.0;
        for (int i = m - 1; i >= 0; --i) {
          pick[i] = rest % ys[i].size();
          rest /= ys[i].size();
        }
        for (int i = 0; i < m; ++i) {
          pt.y[i] = ys[i][pick[i]];
          val += gval[i][pick[i]] - w[i];
        }
        const std::uint64_t index = static_cast<std::uint64_t>(a) * combos + c;
        if (local.have && !(val < local.value - 1e-12 * (1.0 + std::abs(local.value)))) continue;
        // G membership only for improving candidates.
        bool ok = true;
        const auto flat = pt.flatten();
        for (const auto& row : g.global_linear) {
          const double act = row_activity(row.coefs, flat) - row.rhs;
          if (row.sense == Sense::eq ? std::abs(act) > g.tol.linear : act > g.tol.linear) ok = false;
        }
        for (const auto& row : g.global_nonlinear) {
          const double act = row.lhs.evaluate(pt.x, pt.y) - row.rhs;
          if (row.sense == Sense::eq ? std::abs(act) > g.tol.nonlinear : act > g.tol.nonlinear) ok = false;
        }
        if (!ok) continue;
        local.have = true;
        local.value = val;
        local.index = index;
        local.flat = flat;
        local.flat.insert(local.flat.end(), w.begin(), w.end());
      }
    }
#pragma omp critical
    {
      if (local.have) {
        const double tie = 1e-12 * (1.0 + std::abs(best.value));
        if (!best.have || local.value < best.value - tie ||
            (std::abs(local.value - best.value) <= tie && local.index < best.index))
          best = std::move(local);
      }
    }
  }
  if (!best.have) return non_optimal(SolveStatus::infeasible, "joint feasible set is empty");
  OracleResult r;
  r.status = SolveStatus::optimal;
  r.value = ExtendedReal::finite(best.value);
  r.minimizer = std::move(best.flat);
  r.certificate = CertificateKind::enumeration_complete;
  r.detail = "joint lattice enumerated (" + std::to_string(joint) + " points)";
  return r;
}

OracleResult lbp_miqp(const GameInstance& g, const CutPool& pools) {
  const int m = g.num_players();
  const int dim = g.total_dimension();
  std::vector<int> offset(m);
  for (int i = 0; i < m; ++i) offset[i] = g.block_offset(i);
  ProblemBuilder b(dim + m, [&](VarRef v) { return v.is_shared() ? v.index : offset[v.player] + v.index; });
  if (!b.add_block(g.shared_set, 0).empty()) throw StructureError("X has nonlinear constraints");
  for (int i = 0; i < m; ++i)
    if (!b.add_block(g.players[i].feasible_set, offset[i]).empty())
      throw StructureError(who(i) + ": Y_i has nonlinear constraints; the built-in lower bound needs linear sets");
  for (const auto& row : g.global_linear) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(dim + m);
    for (int j = 0; j < dim; ++j) a[j] = row.coefs[j];
    b.add_row(a, row.sense, row.rhs);
  }
  for (const auto& row : g.global_nonlinear) b.add_row(row.lhs.expand(), row.sense, row.rhs);
  for (int i = 0; i < m; ++i) {
    const Polynomial obj = g.players[i].objective.expand();
    b.add_objective(obj);
    Eigen::VectorXd a;
    for (const auto& z : pools.points[i]) {
      const Polynomial cut = obj.substitute_block(i, z);
      if (cut.degree() > 1) throw StructureError(who(i) + ": cut g_i(x, z) is not affine in x");
      a = Eigen::VectorXd::Zero(dim + m);
      a[dim + i] = 1.0;
      double rhs = 0.0;
      for (const auto& [mono, c] : cut.terms()) {
        if (mono.empty()) rhs += c;
        else a[mono[0].index] -= c;
      }
      b.add_row(a, Sense::le, rhs);
    }
  }
  MixedIntegerQp mp = b.miqp();
  for (int i = 0; i < m; ++i) mp.relaxation.linear[dim + i] -= 1.0;
  const auto r = solve_miqp(mp);
  if (r.status == SolveStatus::unbounded)
    return non_optimal(SolveStatus::unbounded, "lower-bounding problem unbounded (empty pools or unbounded sets)");
  if (r.status == SolveStatus::infeasible) return non_optimal(SolveStatus::infeasible, "joint feasible set is empty");
  if (r.status != SolveStatus::optimal) return non_optimal(SolveStatus::failed, "lower-bounding MIQP: " + r.message);
  OracleResult out;
  out.status = SolveStatus::optimal;
  out.minimizer.assign(r.x.data(), r.x.data() + r.x.size());
  const auto pt = GamePoint::unflatten(g, std::span<const double>(out.minimizer).first(dim));
  double val = 0.0;
  for (int i = 0; i < m; ++i) val += g.players[i].objective.evaluate_local(pt.x, i, pt.y[i]) - out.minimizer[dim + i];
  out.value = ExtendedReal::finite(val);
  out.certificate = CertificateKind::convexity_kkt;
  out.detail = "integers enumerated (" + std::to_string(r.assignments) + "); convex QP certified per assignment";
  out.residual = r.certificate.primal_residual;
  return out;
}

}  // namespace

OracleResult solve_lower_bound(const GameInstance& game, const CutPool& pools) {
  if (pools.num_players() != game.num_players()) throw std::invalid_argument("one cut pool per player required");
  for (int i = 0; i < game.num_players(); ++i)
    if (pools.points[i].empty()) throw std::invalid_argument(who(i) + ": empty cut pool");
  try {
    if (game_all_integral(game)) return lbp_enumerate(game, pools);
    return lbp_miqp(game, pools);
  } catch (const StructureError& e) {
    return non_optimal(SolveStatus::failed, std::string("outside built-in lower-bound coverage: ") + e.what());
  } catch (const std::length_error& e) {
    return non_optimal(SolveStatus::failed, e.what());
  }
}

}  // namespace gnep
