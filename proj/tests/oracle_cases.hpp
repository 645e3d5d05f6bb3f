#pragma once

// Random single-player instances per built-in oracle class, each paired with
// an independently computed optimal value: lattice scans, vertex
// enumeration, 1-D ternary search, and exact radial scaling over a zooming
// grid of flow directions for pipeline trees.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gnep/instances.hpp"

namespace gnep::testing {

struct OracleCase {
  std::string oracle;
  GameInstance game;
  std::vector<double> x;
  double reference = 0.0;  // +inf when Y_0 is empty
};

using Rng = std::mt19937_64;

inline double uni(Rng& r, double a, double b) { return std::uniform_real_distribution<double>(a, b)(r); }
inline int pick(Rng& r, int a, int b) { return std::uniform_int_distribution<int>(a, b)(r); }

inline Expression C(double v) { return Expression::constant(v); }
inline Expression X(int k) { return Expression::shared_var(k); }
inline Expression Y(int j) { return Expression::player_var(0, j); }

inline GameInstance single_player(int n0, Player p) {
  GameInstance g;
  g.name = "single";
  g.n0 = n0;
  g.shared_set = FeasibleSet::free(-1, n0);
  p.id = 0;
  g.players.push_back(std::move(p));
  g.validate();
  return g;
}

inline std::vector<double> random_x(Rng& r, int n0) {
  std::vector<double> x(n0);
  for (auto& v : x) v = uni(r, -3.0, 3.0);
  return x;
}

// min c.y over {y : A y <= b} by trying every n-subset of active rows.
inline double vertex_min(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
  const int m = static_cast<int>(A.rows()), n = static_cast<int>(A.cols());
  if (n == 0) return 0.0;
  double best = kInf;
  std::vector<int> sel(n);
  for (int k = 0; k < n; ++k) sel[k] = k;
  while (true) {
    Eigen::MatrixXd M(n, n);
    Eigen::VectorXd rhs(n);
    for (int k = 0; k < n; ++k) {
      M.row(k) = A.row(sel[k]);
      rhs[k] = b[sel[k]];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (lu.rank() == n) {
      const Eigen::VectorXd v = lu.solve(rhs);
      if (((A * v - b).array() <= 1e-9 * (1.0 + b.cwiseAbs().maxCoeff())).all()) best = std::min(best, c.dot(v));
    }
    int k = n - 1;
    while (k >= 0 && sel[k] == m - n + k) --k;
    if (k < 0) break;
    ++sel[k];
    for (int q = k + 1; q < n; ++q) sel[q] = sel[q - 1] + 1;
  }
  return best;
}

// Box bounds and <= rows of a continuous block as A y <= b.
inline void polytope(const FeasibleSet& s, const std::vector<int>& cols, const std::vector<double>& fixed,
              Eigen::MatrixXd& A, Eigen::VectorXd& b) {
  const int n = static_cast<int>(cols.size());
  std::vector<std::pair<Eigen::VectorXd, double>> rows;
  for (int k = 0; k < n; ++k) {
    const int j = cols[k];
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[k] = 1.0;
    if (std::isfinite(s.upper[j])) rows.emplace_back(e, s.upper[j]);
    if (std::isfinite(s.lower[j])) rows.emplace_back(-e, -s.lower[j]);
  }
  for (const auto& r : s.linear) {
    if (r.sense != Sense::le) throw std::logic_error("polytope: equality row");
    Eigen::VectorXd a(n);
    double rhs = r.rhs;
    for (int k = 0; k < n; ++k) a[k] = r.coefs[cols[k]];
    for (int j = 0; j < s.n; ++j)
      if (std::find(cols.begin(), cols.end(), j) == cols.end()) rhs -= r.coefs[j] * fixed[j];
    rows.emplace_back(a, rhs);
  }
  A.resize(static_cast<int>(rows.size()), n);
  b.resize(static_cast<int>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    A.row(static_cast<int>(r)) = rows[r].first.transpose();
    b[static_cast<int>(r)] = rows[r].second;
  }
}

// Linear objective coefficients at x by finite differences of exact evaluation.
inline Eigen::VectorXd linear_coefs(const Player& p, std::span<const double> x, const std::vector<int>& cols,
                             std::vector<double> base, double& constant) {
  for (int j : cols) base[j] = 0.0;
  constant = p.objective.evaluate_local(x, 0, base);
  Eigen::VectorXd c(static_cast<int>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) {
    auto v = base;
    v[cols[k]] = 1.0;
    c[static_cast<int>(k)] = p.objective.evaluate_local(x, 0, v) - constant;
  }
  return c;
}


inline std::vector<OracleCase> enumeration_cases(int count, std::uint64_t seed = 101) {
  Rng rng(seed);
  std::vector<OracleCase> out;
  for (int t = 0; t < count; ++t) {
    const int n = pick(rng, 1, 3), n0 = pick(rng, 1, 2);
    Player p;
    p.n = n;
    std::vector<double> lo(n), hi(n);
    for (int j = 0; j < n; ++j) {
      lo[j] = pick(rng, -3, 0);
      hi[j] = lo[j] + pick(rng, 0, 4);
    }
    p.feasible_set = FeasibleSet::box(0, lo, hi);
    p.feasible_set.integral.assign(n, true);
    LinearConstraint row;
    row.coefs.resize(n);
    for (auto& a : row.coefs) a = pick(rng, -2, 2);
    row.rhs = pick(rng, -2, 3);
    p.feasible_set.linear.push_back(row);
    std::vector<Expression> terms;
    for (int j = 0; j < n; ++j) {
      terms.push_back(C(uni(rng, -2, 2)) * Y(j));
      terms.push_back(C(uni(rng, -1, 1)) * Expression::square(Y(j)));
      terms.push_back(C(uni(rng, -1, 1)) * X(pick(rng, 0, n0 - 1)) * Y(j));
      if (j > 0) terms.push_back(C(uni(rng, -1, 1)) * Y(j - 1) * Y(j));
    }
    p.objective = Expression::add(terms);
    p.oracle = "enumeration";
    const auto g = single_player(n0, p);
    const auto x = random_x(rng, n0);

    double ref = kInf;
    std::vector<double> v(lo);
    while (true) {
      double act = 0.0;
      for (int j = 0; j < n; ++j) act += row.coefs[j] * v[j];
      if (act <= row.rhs) ref = std::min(ref, p.objective.evaluate_local(x, 0, v));
      int j = 0;
      while (j < n && v[j] == hi[j]) v[j] = lo[j], ++j;
      if (j == n) break;
      v[j] += 1.0;
    }
    out.push_back({"enumeration", g, x, ref});
  }
  return out;
}

inline std::vector<OracleCase> box_lp_cases(int count, std::uint64_t seed = 202) {
  Rng rng(seed);
  std::vector<OracleCase> out;
  for (int t = 0; t < count; ++t) {
    const int n = pick(rng, 1, 3), n0 = pick(rng, 1, 3);
    Player p;
    p.n = n;
    std::vector<double> lo(n), hi(n);
    for (int j = 0; j < n; ++j) {
      lo[j] = uni(rng, -2, 1);
      hi[j] = lo[j] + uni(rng, 0.1, 4);
    }
    p.feasible_set = FeasibleSet::box(0, lo, hi);
    if (t % 2 == 0) {
      LinearConstraint row;
      row.coefs.resize(n);
      for (auto& a : row.coefs) a = uni(rng, -1, 1);
      double at_lo = 0.0;
      for (int j = 0; j < n; ++j) at_lo += row.coefs[j] * (row.coefs[j] > 0 ? lo[j] : hi[j]);
      row.rhs = at_lo + uni(rng, 0.0, 2.0);  // nonempty
      p.feasible_set.linear.push_back(row);
    }
    std::vector<Expression> terms;
    for (int j = 0; j < n; ++j) {
      terms.push_back(C(uni(rng, -3, 3)) * Y(j));
      terms.push_back(C(uni(rng, -1, 1)) * X(pick(rng, 0, n0 - 1)) * Y(j));
    }
    terms.push_back(C(uni(rng, -1, 1)) * X(0));
    p.objective = Expression::add(terms);
    p.oracle = "box_lp";
    const auto g = single_player(n0, p);
    const auto x = random_x(rng, n0);

    std::vector<int> cols(n);
    for (int j = 0; j < n; ++j) cols[j] = j;
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    polytope(p.feasible_set, cols, std::vector<double>(n, 0.0), A, b);
    double c0 = 0.0;
    const auto c = linear_coefs(p, x, cols, std::vector<double>(n, 0.0), c0);
    const double ref = c0 + vertex_min(A, b, c);
    out.push_back({"box_lp", g, x, ref});
  }
  return out;
}

inline std::vector<OracleCase> fixed_charge_cases(int count, std::uint64_t seed = 303) {
  Rng rng(seed);
  std::vector<OracleCase> out;
  for (int t = 0; t < count; ++t) {
    const int nc = pick(rng, 1, 2), n0 = 1;
    const int n = nc + 1, u = nc;
    Player p;
    p.n = n;
    std::vector<double> lo(n, 0.0), hi(n, kInf);
    hi[u] = 1.0;
    p.feasible_set = FeasibleSet::box(0, lo, hi);
    p.feasible_set.integral[u] = true;
    std::vector<Expression> terms;
    for (int j = 0; j < nc; ++j) {
      LinearConstraint gate;
      gate.coefs.assign(n, 0.0);
      gate.coefs[j] = 1.0;
      gate.coefs[u] = -uni(rng, 0.5, 10.0);
      p.feasible_set.linear.push_back(gate);
      terms.push_back((X(0) - C(uni(rng, 0, 6))) * Y(j));
    }
    terms.push_back(C(uni(rng, 0, 5)) * Y(u));
    p.objective = Expression::add(terms);
    p.oracle = "fixed_charge";
    const auto g = single_player(n0, p);
    const std::vector<double> x{uni(rng, 0, 6)};

    std::vector<int> cols(nc);
    for (int j = 0; j < nc; ++j) cols[j] = j;
    double ref = kInf;
    for (double uv : {0.0, 1.0}) {
      std::vector<double> fixed(n, 0.0);
      fixed[u] = uv;
      Eigen::MatrixXd A;
      Eigen::VectorXd b;
      polytope(p.feasible_set, cols, fixed, A, b);
      double c0 = 0.0;
      const auto c = linear_coefs(p, x, cols, fixed, c0);
      ref = std::min(ref, c0 + vertex_min(A, b, c));
    }
    out.push_back({"fixed_charge", g, x, ref});
  }
  return out;
}

inline std::vector<OracleCase> mixed_binary_sep_qp_cases(int count, std::uint64_t seed = 404) {
  Rng rng(seed);
  std::vector<OracleCase> out;
  for (int t = 0; t < count; ++t) {
    Player p;
    p.n = 2;  // (y^b, y^c)
    p.feasible_set = FeasibleSet::box(0, {0.0, 0.0}, {1.0, kInf});
    p.feasible_set.integral = {true, false};
    const double cl = uni(rng, 0, 100), cu = cl + uni(rng, 1, 500);
    LinearConstraint lower, upper;
    lower.coefs = {cl, -1.0};
    upper.coefs = {-cu, 1.0};
    p.feasible_set.linear = {lower, upper};
    const double a = uni(rng, 0, 2000), b = uni(rng, 0, 50), c = t % 5 == 0 ? 0.0 : uni(rng, 0, 0.2);
    p.objective = C(a) * Y(0) + C(b) * Y(1) + C(0.5 * c) * Expression::square(Y(1)) - X(0) * Y(1);
    p.oracle = "mixed_binary_sep_qp";
    const auto g = single_player(1, p);
    const std::vector<double> x{uni(rng, 0, 100)};

    auto f = [&](double q) { return a + (b - x[0]) * q + 0.5 * c * q * q; };
    double l = cl, h = cu;
    for (int it = 0; it < 300; ++it) {
      const double m1 = l + (h - l) / 3.0, m2 = h - (h - l) / 3.0;
      (f(m1) <= f(m2) ? h : l) = (f(m1) <= f(m2) ? m2 : m1);
    }
    const double ref = std::min({0.0, f(cl), f(cu), f(0.5 * (l + h))});
    out.push_back({"mixed_binary_sep_qp", g, x, ref});
  }
  return out;
}

inline std::vector<OracleCase> tree_transmission_cases(int count, std::uint64_t seed = 505) {
  Rng rng(seed);
  std::vector<OracleCase> out;
  for (int t = 0; t < count; ++t) {
    GasData d;
    d.nodes = pick(rng, 2, 4);
    d.arcs.clear();
    for (int k = 2; k <= d.nodes; ++k) {
      const int parent = pick(rng, 1, k - 1);
      const double w = uni(rng, 0.5, 2.0);
      if (pick(rng, 0, 1)) {
        d.arcs.push_back({parent, k, w});
      } else {
        d.arcs.push_back({k, parent, w});
      }
    }
    d.supplies = {{1, 1.0, 1.0}};
    d.demands = {{d.nodes, 1.0, 2.0, 0.0}};
    d.pressure_lo = uni(rng, 0, 5);
    d.pressure_hi = d.pressure_lo + uni(rng, 0.5, 10);
    const auto g = gas_network_game(d);
    std::vector<double> x(d.nodes);
    for (auto& v : x) v = uni(rng, 0, 5);

    const int na = static_cast<int>(d.arcs.size());
    const double span = d.pressure_hi - d.pressure_lo;
    // Objective is linear in f and drops are quadratic, so along a ray u the
    // largest feasible scale is sqrt(span / spread(u)): minimise c.u / sqrt(spread(u)).
    auto ratio = [&](const std::vector<double>& u) {
      std::vector<double> phi(d.nodes, 0.0);
      std::vector<bool> known(d.nodes, false);
      known[0] = true;
      for (int pass = 0; pass < d.nodes; ++pass)
        for (int a = 0; a < na; ++a) {
          const int i = d.arcs[a].from - 1, j = d.arcs[a].to - 1;
          const double drop = u[a] * u[a] / (d.arcs[a].weymouth * d.arcs[a].weymouth);
          if (known[i] && !known[j]) phi[j] = phi[i] - drop, known[j] = true;
          if (known[j] && !known[i]) phi[i] = phi[j] + drop, known[i] = true;
        }
      const auto [mn, mx] = std::minmax_element(phi.begin(), phi.end());
      double cu = 0.0;
      for (int a = 0; a < na; ++a) cu += (x[d.arcs[a].from - 1] - x[d.arcs[a].to - 1]) * u[a];
      return *mx - *mn > 0.0 ? cu / std::sqrt(*mx - *mn) : 0.0;
    };
    std::vector<double> lo(na, 0.0), hi(na, 1.0);
    const int steps = 40;
    std::vector<double> best(na, 0.0);
    double best_r = 0.0;
    for (int round = 0; round < 16; ++round) {
      std::vector<int> k(na, 0);
      std::vector<double> u(na);
      while (true) {
        for (int a = 0; a < na; ++a) u[a] = lo[a] + (hi[a] - lo[a]) * k[a] / steps;
        const double r = ratio(u);
        if (r < best_r) best_r = r, best = u;
        int a = 0;
        while (a < na && k[a] == steps) k[a] = 0, ++a;
        if (a == na) break;
        ++k[a];
      }
      for (int a = 0; a < na; ++a) {
        const double w = 3.0 * (hi[a] - lo[a]) / steps;
        lo[a] = std::max(0.0, best[a] - w);
        hi[a] = best[a] + w;
      }
    }
    const double ref = std::sqrt(span) * best_r;
    out.push_back({"tree_transmission", g, x, ref});
  }
  return out;
}

inline std::vector<OracleCase> all_oracle_cases(int per_class) {
  std::vector<OracleCase> out;
  for (auto v : {enumeration_cases(per_class), box_lp_cases(per_class), fixed_charge_cases(per_class),
                 mixed_binary_sep_qp_cases(per_class), tree_transmission_cases(per_class)})
    out.insert(out.end(), v.begin(), v.end());
  return out;
}

}  // namespace gnep::testing
