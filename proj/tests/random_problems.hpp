#pragma once

#include <random>

#include "gnep/active_set.hpp"

namespace gnep::testing {

// Feasible, bounded LP/QP: finite box, rows satisfied by a random interior point.
inline QpProblem random_qp(std::mt19937_64& rng, bool quadratic) {
  std::uniform_int_distribution<int> nd(1, 8), md(0, 12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = nd(rng);
  const int m = md(rng);
  QpProblem p;
  p.linear.resize(n);
  p.lower.resize(n);
  p.upper.resize(n);
  Eigen::VectorXd x0(n);
  for (int j = 0; j < n; ++j) {
    p.linear[j] = 5 * u(rng);
    p.lower[j] = -5 + 2 * u(rng);
    p.upper[j] = 5 + 2 * u(rng);
    x0[j] = 3 * u(rng);
  }
  p.rows.resize(m, n);
  p.rhs.resize(m);
  for (int r = 0; r < m; ++r) {
    for (int j = 0; j < n; ++j) p.rows(r, j) = std::round(4 * u(rng)) * 0.5;
    const bool eq = r < 2 && u(rng) > 0.3;
    p.senses.push_back(eq ? Sense::eq : Sense::le);
    p.rhs[r] = p.rows.row(r).dot(x0) + (eq ? 0.0 : std::abs(u(rng)) * (u(rng) > 0 ? 1.0 : 0.0));
  }
  if (quadratic) {
    std::uniform_int_distribution<int> rk(0, n);
    const int k = rk(rng);
    Eigen::MatrixXd b(n, k);
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < k; ++c) b(a, c) = u(rng);
    p.hessian = b * b.transpose();
  }
  return p;
}

}  // namespace gnep::testing
