#include "gnep/instances.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>

namespace gnep {

namespace {

Expression X(int k) { return Expression::shared_var(k); }
Expression Y(int i, int j) { return Expression::player_var(i, j); }
Expression C(double v) { return Expression::constant(v); }

LinearConstraint row(int width, std::vector<std::pair<int, double>> terms, Sense s, double rhs, std::string name) {
  LinearConstraint r;
  r.coefs.assign(width, 0.0);
  for (const auto& [j, a] : terms) r.coefs[j] += a;
  r.sense = s;
  r.rhs = rhs;
  r.name = std::move(name);
  return r;
}

}  // namespace

// ---- Cournot -------------------------------------------------------------------

GameInstance cournot_game() {
  GameInstance g;
  g.name = "cournot";
  g.n0 = 2;
  // x = y in G, so X may carry the hull of Y_1 x Y_2 without changing the
  // game; this keeps the whole model on the integer lattice.
  g.shared_set = FeasibleSet::box(-1, {0.0, 0.0}, {1.1, 1.1});
  g.shared_set.integral = {true, true};
  for (int i = 0; i < 2; ++i) {
    Player p;
    p.id = i;
    p.n = 1;
    p.objective = -Y(i, 0) - X(1 - i);
    p.feasible_set = FeasibleSet::box(i, {0.0}, {1.1});
    p.feasible_set.integral = {true};
    p.oracle = "enumeration";
    g.players.push_back(std::move(p));
  }
  g.global_linear.push_back(row(4, {{0, 1.0}, {2, -1.0}}, Sense::eq, 0.0, "x1 = y1"));
  g.global_linear.push_back(row(4, {{1, 1.0}, {3, -1.0}}, Sense::eq, 0.0, "x2 = y2"));
  g.validate();
  return g;
}

// ---- unit commitment ----------------------------------------------------------

UcData uc_data() {
  UcData d;
  d.producers = {
      {10.0, 0.05, 4000.0, 400.0, 600.0},
      {45.0, 0.1, 100.0, 200.0, 250.0},
      {35.0, 0.002, 2000.0, 300.0, 500.0},
  };
  return d;
}

GameInstance unit_commitment_game(const UcData& d) {
  GameInstance g;
  g.name = "unit_commitment";
  g.n0 = 2;  // (x^p, x^q)
  double qmax = 0.0;
  for (const auto& p : d.producers) qmax += p.cap_hi;
  g.shared_set = FeasibleSet::box(-1, {-kInf, 0.0}, {kInf, qmax});
  const int m = static_cast<int>(d.producers.size());
  for (int i = 0; i < m; ++i) {
    const auto& pd = d.producers[i];
    Player p;
    p.id = i;
    p.n = 2;  // (y^b, y^c)
    p.objective = C(pd.a) * Y(i, 1) + C(0.5 * pd.c) * Expression::square(Y(i, 1)) + C(pd.b) * Y(i, 0) - X(0) * Y(i, 1);
    p.feasible_set = FeasibleSet::box(i, {0.0, -kInf}, {1.0, kInf});
    p.feasible_set.integral = {true, false};
    p.feasible_set.linear.push_back(row(2, {{0, pd.cap_lo}, {1, -1.0}}, Sense::le, 0.0, "min output"));
    p.feasible_set.linear.push_back(row(2, {{1, 1.0}, {0, -pd.cap_hi}}, Sense::le, 0.0, "max output"));
    p.oracle = "mixed_binary_sep_qp";
    g.players.push_back(std::move(p));
  }
  const int width = 2 + 2 * m;
  g.global_linear.push_back(row(width, {{0, 1.0}, {1, d.beta}}, Sense::eq, d.alpha, "inverse demand"));
  std::vector<std::pair<int, double>> bal{{1, 1.0}};
  for (int i = 0; i < m; ++i) bal.emplace_back(2 + 2 * i + 1, -1.0);
  g.global_linear.push_back(row(width, bal, Sense::eq, 0.0, "consumption = production"));
  g.validate();
  return g;
}

// ---- gas network ---------------------------------------------------------------

GasData gas_data() {
  GasData d;
  d.arcs = {
      {1, 2, 3.011688895},  {2, 3, 2.459034363},   {3, 4, 1.181283201},   {4, 7, 0.476334966},
      {4, 14, 0.812192096}, {5, 6, 0.316632279},   {7, 6, 0.385558037},   {8, 9, 3.000000000},
      {9, 10, 0.164342326}, {10, 11, 1.204674230}, {11, 12, 0.929427781}, {11, 17, 0.226813800},
      {12, 13, 0.952379651}, {13, 14, 2.693737181}, {14, 15, 1.904759827}, {15, 16, 1.204674230},
      {17, 18, 3.000000000}, {18, 19, 0.041270934}, {19, 20, 0.166790287},
  };
  d.supplies = {{1, 31.20, 4.5}, {2, 8.40, 5.5}, {5, 4.80, 5.5}, {8, 20.00, 4.5}, {13, 0.96, 5.5}, {14, 1.20, 5.5}};
  d.demands = {
      {3, 3.918, 7, 6}, {6, 4.034, 7, 3},   {7, 5.256, 7, 3},  {10, 6.365, 8, 1}, {12, 2.120, 8, 1},
      {15, 6.848, 7, 3}, {16, 15.616, 7, 3}, {19, 0.222, 11, 1}, {20, 1.919, 11, 0},
  };
  return d;
}

GameInstance gas_network_game(const GasData& d) {
  GameInstance g;
  g.name = "gas_network";
  const int nn = d.nodes;
  const int na = static_cast<int>(d.arcs.size());
  g.n0 = nn;
  g.shared_set = FeasibleSet::free(-1, nn);
  g.price_box = PriceBox{std::vector<double>(nn, d.price_lo), std::vector<double>(nn, d.price_hi)};

  // Transmission: y = (p_1..p_N, f_1..f_A).
  Player t;
  t.id = 0;
  t.n = nn + na;
  {
    std::vector<double> lo(t.n), hi(t.n);
    for (int k = 0; k < nn; ++k) {
      lo[k] = d.pressure_lo;
      hi[k] = d.pressure_hi;
    }
    for (int a = 0; a < na; ++a) {
      lo[nn + a] = 0.0;
      hi[nn + a] = kInf;
    }
    t.feasible_set = FeasibleSet::box(0, lo, hi);
    std::vector<Expression> obj;
    for (int a = 0; a < na; ++a) {
      const auto& arc = d.arcs[a];
      obj.push_back((X(arc.from - 1) - X(arc.to - 1)) * Y(0, nn + a));
      NonlinearConstraint w;
      w.lhs = Y(0, arc.from - 1) - Y(0, arc.to - 1) -
              C(1.0 / (arc.weymouth * arc.weymouth)) * Expression::square(Y(0, nn + a));
      w.sense = Sense::eq;
      w.rhs = 0.0;
      w.name = "weymouth (" + std::to_string(arc.from) + "," + std::to_string(arc.to) + ")";
      t.feasible_set.nonlinear.push_back(std::move(w));
    }
    t.objective = Expression::add(std::move(obj));
    t.oracle = "tree_transmission";
  }
  g.players.push_back(std::move(t));

  for (const auto& s : d.supplies) {
    Player p;
    p.id = g.num_players();
    p.n = 1;
    p.objective = (C(s.cost) - X(s.node - 1)) * Y(p.id, 0);
    p.feasible_set = FeasibleSet::box(p.id, {0.0}, {s.capacity});
    p.oracle = "box_lp";
    g.players.push_back(std::move(p));
  }
  for (const auto& dm : d.demands) {
    Player p;
    p.id = g.num_players();
    p.n = 2;  // (y^d, y^b)
    p.objective = (X(dm.node - 1) - C(dm.utility)) * Y(p.id, 0) + C(dm.fixed_cost) * Y(p.id, 1);
    p.feasible_set = FeasibleSet::box(p.id, {0.0, 0.0}, {kInf, 1.0});
    p.feasible_set.integral = {false, true};
    p.feasible_set.linear.push_back(row(2, {{0, 1.0}, {1, -dm.capacity}}, Sense::le, 0.0, "start-up gate"));
    p.oracle = "fixed_charge";
    g.players.push_back(std::move(p));
  }

  // Node balance: demand + outflow - supply - inflow = 0.
  const int width = g.total_dimension();
  for (int k = 1; k <= nn; ++k) {
    std::vector<std::pair<int, double>> terms;
    for (int a = 0; a < na; ++a) {
      if (d.arcs[a].from == k) terms.emplace_back(g.block_offset(0) + nn + a, 1.0);
      if (d.arcs[a].to == k) terms.emplace_back(g.block_offset(0) + nn + a, -1.0);
    }
    for (std::size_t s = 0; s < d.supplies.size(); ++s)
      if (d.supplies[s].node == k) terms.emplace_back(g.block_offset(gas_first_supply_player() + static_cast<int>(s)), -1.0);
    for (std::size_t q = 0; q < d.demands.size(); ++q)
      if (d.demands[q].node == k) terms.emplace_back(g.block_offset(gas_first_demand_player(d) + static_cast<int>(q)), 1.0);
    g.global_linear.push_back(row(width, terms, Sense::eq, 0.0, "balance node " + std::to_string(k)));
  }
  g.validate();
  return g;
}

// ---- expectations --------------------------------------------------------------

std::string to_string(Provenance p) { return p == Provenance::published ? "published" : "derived"; }

const Expectation& ExpectedValues::at(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return e;
  throw std::out_of_range("no expectation named '" + name + "' for " + instance);
}

bool ExpectedValues::has(const std::string& name) const {
  return std::any_of(entries.begin(), entries.end(), [&](const Expectation& e) { return e.name == name; });
}

ExpectedValues expected_cournot() {
  return {"cournot",
          {
              {"x", {1, 1}, 0.0, Provenance::published, "Cournot example: unique equilibrium (1,1)"},
              {"y", {1, 1}, 0.0, Provenance::published, "Cournot example: unique equilibrium (1,1)"},
              {"delta", {0}, 0.0, Provenance::published, "Cournot example: upper bound delta^U = 0"},
              {"first_lower_bound", {-2}, 0.0, Provenance::published, "Cournot example: delta^L = -2"},
              {"iterations", {1}, 0.0, Provenance::published, "Cournot example: termination after one iteration"},
          }};
}

ExpectedValues expected_uc() {
  return {"unit_commitment",
          {
              {"delta", {931.41}, 0.01, Provenance::published, "unit commitment: delta^L = delta^U = 931.41"},
              {"x", {39.5, 802.5}, 1e-6, Provenance::published, "published x^p = 39.5, x^q = 802.5"},
              {"y", {1, 502.5, 0, 0, 1, 300}, 1e-4, Provenance::published, "published dispatch (1,502.5), (0,0), (1,300)"},
              {"iterations_max", {10}, 0.0, Provenance::published, "unit commitment: converges after three iterations"},
              {"player1_objective_at_solution", {-4511.09375}, 1e-9, Provenance::derived,
               "producer 1 objective evaluated at x^p = 39.5, y = (1, 502.5)"},
          }};
}

ExpectedValues expected_gas() {
  return {"gas_network",
          {
              {"primal_value", {-101.060}, 0.01, Provenance::published, "gas example: optimal primal value -101.060"},
              {"dual_at_published_prices", {-101.060}, 0.01, Provenance::published,
               "gas example: dual function attains the primal value at the published prices"},
              {"dual_gap", {1e-3}, 0.0, Provenance::published, "gas example: absolute duality gap below 1e-3"},
              {"dual_iterations_max", {2000}, 0.0, Provenance::published, "gas example: cutting plane, 266 iterations"},
              {"prices",
               {5.5, 5.5, 5.5, 5.5, 5.5, 5.5, 5.5, 4.5, 4.507, 6.790, 6.804, 6.804, 5.5, 5.5, 5.5, 5.5, 6.931, 6.932,
                10.765, 11.0},
               5e-3, Provenance::published, "published equilibrium prices"},
              {"pressures",
               {3305.3, 3198.0, 3031.2, 2308.6, 1818.8, 1818.8, 1928.3, 4900.0, 4890.0, 1555.6, 1548.8, 1543.6, 1543.6,
                1543.6, 1404.6, 1236.5, 1529.2, 1529.1, 936.3, 900.0},
               0.1, Provenance::published, "published equilibrium squared pressures"},
              {"supplies", {31.2, 0.554, 0, 9.49, 0, 0}, 1e-3, Provenance::published, "published equilibrium supply"},
              {"demands", {0, 4.034, 5.256, 6.365, 2.120, 6.848, 15.616, 0, 1.005}, 1e-3, Provenance::published,
               "published equilibrium demand"},
              {"flows",
               {31.2, 31.754, 31.754, 9.290, 22.464, 0, 4.034, 9.49, 9.49, 3.125, 2.120, 1.005, 0, 0, 22.464, 15.616,
                1.005, 1.005, 1.005},
               1e-3, Provenance::published, "published equilibrium pipeline flows"},
          }};
}

GamePoint gas_published_point(const GasData& d) {
  const auto e = expected_gas();
  const auto& prices = e.at("prices").values;
  const auto& pres = e.at("pressures").values;
  const auto& sup = e.at("supplies").values;
  const auto& dem = e.at("demands").values;
  const auto& flows = e.at("flows").values;
  GamePoint pt;
  pt.x = prices;
  std::vector<double> t(pres);
  t.insert(t.end(), flows.begin(), flows.end());
  pt.y.push_back(std::move(t));
  for (std::size_t s = 0; s < d.supplies.size(); ++s) pt.y.push_back({sup[s]});
  for (std::size_t q = 0; q < d.demands.size(); ++q) pt.y.push_back({dem[q], dem[q] > 0 ? 1.0 : 0.0});
  return pt;
}

// ---- random finite games ---------------------------------------------------------

GameInstance generate_random_finite_game(const RandomFiniteGameSpec& spec) {
  if (spec.players < 1 || spec.players > 3) throw std::invalid_argument("random game: 1..3 players");
  if (spec.max_strategies < 1 || spec.max_grid < 1) throw std::invalid_argument("random game: empty strategy sets");
  std::mt19937_64 rng(spec.seed);
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const int R = spec.coef_range;

  GameInstance g;
  g.name = "random_finite_" + std::to_string(spec.seed);
  // X: one or two integer coordinates with at most max_grid lattice points.
  g.n0 = spec.max_grid >= 4 ? uni(1, 2) : 1;
  std::vector<double> xlo(g.n0), xhi(g.n0);
  int grid = 1;
  for (int k = 0; k < g.n0; ++k) {
    const int cap = std::max(1, (k == 0 ? spec.max_grid : spec.max_grid / grid));
    const int width = uni(1, std::min(cap, g.n0 == 1 ? spec.max_grid : 5));
    xlo[k] = uni(-2, 1);
    xhi[k] = xlo[k] + width - 1;
    grid *= width;
  }
  g.shared_set = FeasibleSet::box(-1, xlo, xhi);
  g.shared_set.integral.assign(g.n0, true);

  for (int i = 0; i < spec.players; ++i) {
    Player p;
    p.id = i;
    p.n = 1;
    const int count = spec.singleton_strategies ? 1 : uni(1, spec.max_strategies);
    const double lo = uni(-1, 1);
    p.feasible_set = FeasibleSet::box(i, {lo}, {lo + count - 1});
    p.feasible_set.integral = {true};
    // g_i = a y^2 + b y + sum_k c_k x_k y + d_k x_k + e x_0 x_{n0-1}
    std::vector<Expression> terms;
    terms.push_back(C(uni(-R, R)) * Expression::square(Y(i, 0)));
    terms.push_back(C(uni(-R, R)) * Y(i, 0));
    for (int k = 0; k < g.n0; ++k) {
      terms.push_back(C(uni(-R, R)) * X(k) * Y(i, 0));
      terms.push_back(C(uni(-R, R)) * X(k));
    }
    terms.push_back(C(uni(-1, 1)) * X(0) * X(g.n0 - 1));
    p.objective = Expression::add(std::move(terms));
    p.oracle = "enumeration";
    g.players.push_back(std::move(p));
  }

  // G through a random reference point, so the joint set is nonempty.
  const int width = g.total_dimension();
  std::vector<double> ref(width);
  for (int k = 0; k < g.n0; ++k) ref[k] = uni(static_cast<int>(xlo[k]), static_cast<int>(xhi[k]));
  for (int i = 0; i < spec.players; ++i) {
    const auto& s = g.players[i].feasible_set;
    ref[g.block_offset(i)] = uni(static_cast<int>(s.lower[0]), static_cast<int>(s.upper[0]));
  }
  const int rows = uni(1, 2);
  for (int r = 0; r < rows; ++r) {
    LinearConstraint lc;
    lc.coefs.resize(width);
    for (int j = 0; j < width; ++j) lc.coefs[j] = uni(-2, 2);
    if (std::all_of(lc.coefs.begin(), lc.coefs.end(), [](double c) { return c == 0.0; })) lc.coefs[0] = 1.0;
    const bool eq = r == 0 && uni(0, 2) == 0;
    lc.sense = eq ? Sense::eq : Sense::le;
    lc.rhs = row_activity(lc.coefs, ref) + (eq ? 0 : uni(0, 2));
    lc.name = "g" + std::to_string(r);
    g.global_linear.push_back(std::move(lc));
  }
  g.validate();
  return g;
}

namespace {

std::vector<std::vector<double>> lattice(const std::vector<double>& lo, const std::vector<double>& hi) {
  std::vector<std::vector<double>> out;
  std::vector<double> v(lo.size());
  std::function<void(std::size_t)> rec = [&](std::size_t d) {
    if (d == lo.size()) {
      out.push_back(v);
      return;
    }
    for (double t = std::ceil(lo[d] - 1e-9); t <= std::floor(hi[d] + 1e-9); t += 1.0) {
      v[d] = t;
      rec(d + 1);
    }
  };
  rec(0);
  return out;
}

void require_integral(const FeasibleSet& s, const char* what) {
  if (!s.all_integral()) throw std::invalid_argument(std::string("brute force: ") + what + " is not all-integral");
}

}  // namespace

BruteForceResult brute_force_md(const GameInstance& g, std::uint64_t cap, double tol) {
  g.validate();
  require_integral(g.shared_set, "X");
  const int m = g.num_players();
  for (const auto& p : g.players) require_integral(p.feasible_set, "Y_i");
  const auto xs = lattice(g.shared_set.lower, g.shared_set.upper);
  std::vector<std::vector<std::vector<double>>> ys(m);
  std::uint64_t joint = xs.size();
  for (int i = 0; i < m; ++i) {
    ys[i] = lattice(g.players[i].feasible_set.lower, g.players[i].feasible_set.upper);
    joint *= std::max<std::size_t>(1, ys[i].size());
    if (joint > cap) throw std::length_error("brute force: joint lattice exceeds the cap");
  }
  BruteForceResult res;
  bool have = false;
  for (const auto& x : xs) {
    if (!g.shared_set.contains(x, x, g.tol)) continue;
    // g_i^*(x) over {y_i : (x, y_i) in F_i}.
    std::vector<double> opt(m, kInf);
    std::vector<std::vector<int>> feasible(m);
    for (int i = 0; i < m; ++i) {
      for (int k = 0; k < static_cast<int>(ys[i].size()); ++k) {
        if (!g.players[i].feasible_set.contains(ys[i][k], x, g.tol)) continue;
        feasible[i].push_back(k);
        opt[i] = std::min(opt[i], g.players[i].objective.evaluate_local(x, i, ys[i][k]));
      }
    }
    std::uint64_t combos = 1;
    for (int i = 0; i < m; ++i) combos *= feasible[i].size();
    GamePoint pt;
    pt.x = x;
    pt.y.resize(m);
    for (std::uint64_t c = 0; c < combos; ++c) {
      std::uint64_t rest = c;
      for (int i = m - 1; i >= 0; --i) {
        pt.y[i] = ys[i][feasible[i][rest % feasible[i].size()]];
        rest /= feasible[i].size();
      }
      ++res.points;
      const auto flat = pt.flatten();
      bool ok = true;
      for (const auto& r : g.global_linear) {
        const double act = row_activity(r.coefs, flat) - r.rhs;
        if (r.sense == Sense::eq ? std::abs(act) > g.tol.linear : act > g.tol.linear) ok = false;
      }
      for (const auto& r : g.global_nonlinear) {
        const double act = r.lhs.evaluate(pt.x, pt.y) - r.rhs;
        if (r.sense == Sense::eq ? std::abs(act) > g.tol.nonlinear : act > g.tol.nonlinear) ok = false;
      }
      if (!ok) continue;
      std::vector<double> gaps(m);
      bool eq = true;
      for (int i = 0; i < m; ++i) {
        gaps[i] = g.players[i].objective.evaluate_local(x, i, pt.y[i]) - opt[i];
        if (gaps[i] > tol) eq = false;
      }
      const double val = g.mu.apply(std::span<const double>(gaps));
      if (eq) res.equilibria.push_back(pt);
      if (!have || val < res.delta - tol) {
        have = true;
        res.delta = val;
        res.argmin.clear();
        res.argmin.push_back(pt);
      } else if (std::abs(val - res.delta) <= tol) {
        res.argmin.push_back(pt);
      }
    }
  }
  res.feasible = have;
  return res;
}

std::vector<std::vector<std::vector<double>>> brute_force_classical_equilibria(const ClassicalGame& game,
                                                                               std::uint64_t cap, double tol) {
  const int m = game.num_players();
  std::vector<std::vector<std::vector<double>>> blocks(m);
  std::uint64_t joint = 1;
  for (int i = 0; i < m; ++i) {
    require_integral(game.players[i].own, "classical block");
    blocks[i] = lattice(game.players[i].own.lower, game.players[i].own.upper);
    joint *= std::max<std::size_t>(1, blocks[i].size());
    if (joint > cap) throw std::length_error("brute force: classical lattice exceeds the cap");
  }
  std::vector<std::vector<std::vector<double>>> out;
  std::vector<std::vector<double>> u(m);
  for (std::uint64_t c = 0; c < joint; ++c) {
    std::uint64_t rest = c;
    for (int i = m - 1; i >= 0; --i) {
      u[i] = blocks[i][rest % blocks[i].size()];
      rest /= blocks[i].size();
    }
    bool eq = true;
    for (int i = 0; i < m && eq; ++i) {
      if (!game.feasible_for(i, u)) {
        eq = false;
        break;
      }
      const double val = game.players[i].objective.evaluate({}, u);
      auto v = u;
      for (const auto& alt : blocks[i]) {
        v[i] = alt;
        if (!game.feasible_for(i, v)) continue;
        if (game.players[i].objective.evaluate({}, v) < val - tol) {
          eq = false;
          break;
        }
      }
    }
    if (eq) out.push_back(u);
  }
  return out;
}

// ---- random convex price-taking games ----------------------------------------------

namespace {

// Appends a player with linear objective sum_j cost_j y_j - sum_k x_k s_kj y_j
// convention: g = g^a + sum_k x_k g^b_k with g^b_k = sum_j s_kj y_j.
void add_linear_player(GameInstance& g, std::vector<double> cap, std::vector<double> cost,
                       std::vector<std::vector<double>> s /* [k][j] */, const std::string& oracle) {
  Player p;
  p.id = g.num_players();
  p.n = static_cast<int>(cap.size());
  p.feasible_set = FeasibleSet::box(p.id, std::vector<double>(p.n, 0.0), cap);
  std::vector<Expression> terms;
  for (int j = 0; j < p.n; ++j) {
    terms.push_back(C(cost[j]) * Y(p.id, j));
    for (int k = 0; k < g.n0; ++k)
      if (s[k][j] != 0.0) terms.push_back(C(s[k][j]) * X(k) * Y(p.id, j));
  }
  p.objective = Expression::add(std::move(terms));
  p.oracle = oracle;
  g.players.push_back(std::move(p));
}

void add_balance_rows(GameInstance& g, const std::vector<std::vector<std::vector<double>>>& s_of_player) {
  const int width = g.total_dimension();
  for (int k = 0; k < g.n0; ++k) {
    LinearConstraint r;
    r.coefs.assign(width, 0.0);
    for (int i = 0; i < g.num_players(); ++i)
      for (int j = 0; j < g.players[i].n; ++j) r.coefs[g.block_offset(i) + j] = s_of_player[i][k][j];
    r.sense = Sense::eq;
    r.rhs = 0.0;
    r.name = "balance " + std::to_string(k);
    g.global_linear.push_back(std::move(r));
  }
}

}  // namespace

GameInstance generate_random_price_taking_game(const RandomPriceTakingSpec& spec) {
  if (spec.commodities < 1 || spec.commodities > 3) throw std::invalid_argument("ptg: 1..3 commodities");
  std::mt19937_64 rng(spec.seed);
  auto real = [&](double lo, double hi) { return std::round(std::uniform_real_distribution<double>(lo, hi)(rng) * 4) / 4; };
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const int K = spec.commodities;
  GameInstance g;
  g.name = "random_ptg_" + std::to_string(spec.seed);
  g.n0 = K;
  g.shared_set = FeasibleSet::box(-1, std::vector<double>(K, 0.0), std::vector<double>(K, spec.price_hi));
  g.price_box = PriceBox{std::vector<double>(K, 0.0), std::vector<double>(K, spec.price_hi)};
  std::vector<std::vector<std::vector<double>>> S;  // per player [k][j]
  auto zero_s = [&](int n) { return std::vector<std::vector<double>>(K, std::vector<double>(n, 0.0)); };
  for (int k = 0; k < K; ++k) {
    auto sp = zero_s(1);
    sp[k][0] = -1.0;  // producer sells
    add_linear_player(g, {real(1, 5)}, {real(1, 10)}, sp, "box_lp");
    S.push_back(sp);
    auto sc = zero_s(1);
    sc[k][0] = 1.0;  // consumer buys
    add_linear_player(g, {real(1, 5)}, {-real(1, 10)}, sc, "box_lp");
    S.push_back(sc);
  }
  for (int e = 0; e < spec.extra_players; ++e) {
    const int type = K > 1 ? pick(0, 2) : pick(0, 1);
    const int k = pick(0, K - 1);
    if (type == 0) {
      auto sp = zero_s(1);
      sp[k][0] = -1.0;
      add_linear_player(g, {real(1, 5)}, {real(1, 10)}, sp, "box_lp");
      S.push_back(sp);
    } else if (type == 1) {
      auto sc = zero_s(1);
      sc[k][0] = 1.0;
      add_linear_player(g, {real(1, 5)}, {-real(1, 10)}, sc, "box_lp");
      S.push_back(sc);
    } else {
      // Trader: buys at k, sells at k2 (two routes).
      int k2 = pick(0, K - 2);
      if (k2 >= k) ++k2;
      auto st = zero_s(2);
      st[k][0] = 1.0;
      st[k2][0] = -1.0;
      st[k2][1] = 1.0;
      st[k][1] = -1.0;
      add_linear_player(g, {real(1, 5), real(1, 5)}, {real(0, 2), real(0, 2)}, st, "box_lp");
      S.push_back(st);
    }
  }
  add_balance_rows(g, S);
  g.validate();
  return g;
}

GameInstance producer_consumer_toy(double cap, double cost, double utility, double consumer_min, double price_hi) {
  GameInstance g;
  g.name = "producer_consumer";
  g.n0 = 1;
  g.shared_set = FeasibleSet::box(-1, {0.0}, {price_hi});
  g.price_box = PriceBox{{0.0}, {price_hi}};
  std::vector<std::vector<std::vector<double>>> S;
  add_linear_player(g, {cap}, {cost}, {{-1.0}}, "box_lp");
  S.push_back({{-1.0}});
  add_linear_player(g, {cap}, {-utility}, {{1.0}}, "box_lp");
  g.players[1].feasible_set.lower[0] = consumer_min;
  S.push_back({{1.0}});
  add_balance_rows(g, S);
  g.validate();
  return g;
}

}  // namespace gnep
