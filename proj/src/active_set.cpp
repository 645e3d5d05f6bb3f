#include "gnep/active_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gnep {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::failed: return "failed";
  }
  return "unknown";
}

void QpProblem::validate() const {
  const int n = num_vars();
  if (lower.size() != n || upper.size() != n) throw std::invalid_argument("qp: bounds must have n entries");
  if (!is_linear() && (hessian.rows() != n || hessian.cols() != n)) throw std::invalid_argument("qp: Hessian must be n x n");
  if (rows.rows() != num_rows() || (num_rows() > 0 && rows.cols() != n))
    throw std::invalid_argument("qp: constraint matrix shape mismatch");
  if (static_cast<int>(senses.size()) != num_rows()) throw std::invalid_argument("qp: one sense per row");
  if (!linear.allFinite() || !rhs.allFinite() || (num_rows() > 0 && !rows.allFinite()) ||
      (!is_linear() && !hessian.allFinite()))
    throw std::invalid_argument("qp: data must be finite");
  for (int j = 0; j < n; ++j)
    if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j])
      throw std::invalid_argument("qp: inconsistent bounds");
}

Certificate evaluate_certificate(const QpProblem& p, const Eigen::VectorXd& x, const Eigen::VectorXd& lambda) {
  Certificate c;
  const int n = p.num_vars();
  const int m = p.num_rows();
  Eigen::VectorXd hx = p.is_linear() ? Eigen::VectorXd::Zero(n) : Eigen::VectorXd(p.hessian * x);
  c.objective = 0.5 * x.dot(hx) + p.linear.dot(x);
  Eigen::VectorXd z = hx + p.linear;
  if (m > 0) z += p.rows.transpose() * lambda;
  double dual_obj = -0.5 * x.dot(hx);
  for (int j = 0; j < n; ++j) {
    c.primal_residual = std::max({c.primal_residual, p.lower[j] - x[j], x[j] - p.upper[j]});
    if (z[j] > 0) {
      if (std::isfinite(p.lower[j])) {
        c.complementarity = std::max(c.complementarity, z[j] * std::abs(x[j] - p.lower[j]));
        dual_obj += z[j] * p.lower[j];
      } else {
        c.dual_residual = std::max(c.dual_residual, z[j]);
      }
    } else if (z[j] < 0) {
      if (std::isfinite(p.upper[j])) {
        c.complementarity = std::max(c.complementarity, -z[j] * std::abs(p.upper[j] - x[j]));
        dual_obj += z[j] * p.upper[j];
      } else {
        c.dual_residual = std::max(c.dual_residual, -z[j]);
      }
    }
  }
  if (m > 0) {
    const Eigen::VectorXd act = p.rows * x - p.rhs;
    for (int r = 0; r < m; ++r) {
      if (p.senses[r] == Sense::eq) {
        c.primal_residual = std::max(c.primal_residual, std::abs(act[r]));
      } else {
        c.primal_residual = std::max(c.primal_residual, act[r]);
        c.dual_residual = std::max(c.dual_residual, -lambda[r]);
      }
      c.complementarity = std::max(c.complementarity, std::abs(lambda[r] * act[r]));
    }
    dual_obj -= p.rhs.dot(lambda);
  }
  c.dual_objective = dual_obj;
  return c;
}

namespace {

constexpr int kFree = 0;
constexpr int kAtLower = -1;
constexpr int kAtUpper = 1;
constexpr int kFixed = 2;

enum class Outcome { optimal, unbounded, nonconvex, iteration_limit, numerical };

// Active-set loop from a feasible point. Bounds are handled natively: a
// variable at an active bound leaves the free set, so null spaces are taken
// over the free columns only.
class FeasibleActiveSet {
 public:
  FeasibleActiveSet(const QpProblem& p, double tol, int max_iter)
      : p_(p), n_(p.num_vars()), m_(p.num_rows()), tol_(tol), max_iter_(max_iter) {
    double s = 1.0;
    if (!p.is_linear()) s = std::max(s, p.hessian.cwiseAbs().maxCoeff());
    hess_scale_ = s;
  }

  Outcome run(Eigen::VectorXd& v) {
    v_ = v;
    state_.assign(n_, kFree);
    in_w_.assign(m_, false);
    w_.clear();
    seed();
    int zero_steps = 0;
    for (iterations_ = 0; iterations_ < max_iter_; ++iterations_) {
      free_.clear();
      for (int j = 0; j < n_; ++j)
        if (state_[j] == kFree) free_.push_back(j);
      const int nf = static_cast<int>(free_.size());
      const int nw = static_cast<int>(w_.size());
      if (nw > nf) return Outcome::numerical;

      Eigen::VectorXd g = gradient();
      Eigen::VectorXd gf(nf);
      for (int a = 0; a < nf; ++a) gf[a] = g[free_[a]];

      Eigen::MatrixXd mt(nf, nw);  // A_W(:,F)^T
      for (int b = 0; b < nw; ++b)
        for (int a = 0; a < nf; ++a) mt(a, b) = p_.rows(w_[b], free_[a]);
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(mt);
      Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(nf, nf);
      const int k = nf - nw;

      Eigen::VectorXd d = Eigen::VectorXd::Zero(n_);
      bool is_ray = false;
      if (k > 0) {
        const Eigen::MatrixXd z = q.rightCols(k);
        const Eigen::VectorXd gr = z.transpose() * gf;
        const double gscale = 1.0 + g.cwiseAbs().maxCoeff();
        Eigen::VectorXd step;
        if (p_.is_linear()) {
          if (gr.cwiseAbs().maxCoeff() > 1e-11 * gscale) {
            step = -gr;
            is_ray = true;
          }
        } else {
          Eigen::MatrixXd hff(nf, nf);
          for (int a = 0; a < nf; ++a)
            for (int b = 0; b < nf; ++b) hff(a, b) = p_.hessian(free_[a], free_[b]);
          const Eigen::MatrixXd hr = z.transpose() * hff * z;
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (hr + hr.transpose()));
          const auto& evals = eig.eigenvalues();
          const auto& evecs = eig.eigenvectors();
          const double curv_tol = 1e-10 * hess_scale_;
          if (evals.minCoeff() < -1e-8 * hess_scale_) return Outcome::nonconvex;
          Eigen::VectorXd flat = Eigen::VectorXd::Zero(k);
          Eigen::VectorXd newton = Eigen::VectorXd::Zero(k);
          for (int j = 0; j < k; ++j) {
            const double comp = evecs.col(j).dot(gr);
            if (evals[j] <= curv_tol)
              flat += comp * evecs.col(j);
            else
              newton -= (comp / evals[j]) * evecs.col(j);
          }
          if (flat.cwiseAbs().maxCoeff() > 1e-11 * gscale) {
            step = -flat;
            is_ray = true;
          } else if (newton.cwiseAbs().maxCoeff() > 1e-13 * (1.0 + v_.cwiseAbs().maxCoeff())) {
            step = newton;
          }
        }
        if (step.size() > 0) {
          const Eigen::VectorXd df = z * step;
          for (int a = 0; a < nf; ++a) d[free_[a]] = df[a];
        }
      }

      if (d.cwiseAbs().maxCoeff() > 0.0) {
        const double full = is_ray ? std::numeric_limits<double>::infinity() : 1.0;
        int block = -1;
        double alpha = ratio_test(d, full, block);
        if (block < 0 && is_ray) {
          ray_ = d;
          v = v_;
          return Outcome::unbounded;
        }
        zero_steps = alpha <= 0.0 ? zero_steps + 1 : 0;
        v_ += alpha * d;
        if (block >= 0) {
          activate(block, d);
          if (block < n_) prune_dependent_rows();
        }
        continue;
      }

      // Stationary on the working set: inspect multipliers.
      Eigen::VectorXd lambda = Eigen::VectorXd::Zero(nw);
      if (nw > 0) lambda = qr.solve(Eigen::VectorXd(-gf));
      multipliers_.assign(m_, 0.0);
      for (int b = 0; b < nw; ++b) multipliers_[w_[b]] = lambda[b];
      Eigen::VectorXd zfull = g;
      for (int b = 0; b < nw; ++b) zfull += lambda[b] * p_.rows.row(w_[b]).transpose();
      const double dual_tol = tol_ * (1.0 + g.cwiseAbs().maxCoeff());
      const bool bland = zero_steps > 2 * (n_ + 1);
      int drop = -1;  // encoded: < n_ bound, >= n_ row
      double worst = -dual_tol;
      for (int j = 0; j < n_; ++j) {
        double mu = 0.0;
        if (state_[j] == kAtLower) mu = zfull[j];
        else if (state_[j] == kAtUpper) mu = -zfull[j];
        else continue;
        if (mu < worst || (bland && mu < -dual_tol && drop < 0)) {
          drop = j;
          worst = mu;
          if (bland) break;
        }
      }
      if (!(bland && drop >= 0)) {
        for (int b = 0; b < nw; ++b) {
          const int r = w_[b];
          if (p_.senses[r] == Sense::eq) continue;
          if (lambda[b] < worst || (bland && lambda[b] < -dual_tol && drop < 0)) {
            drop = n_ + r;
            worst = lambda[b];
            if (bland) break;
          }
        }
      }
      if (drop < 0) {
        v = v_;
        return Outcome::optimal;
      }
      deactivate(drop);
    }
    v = v_;
    return Outcome::iteration_limit;
  }

  const std::vector<double>& multipliers() const { return multipliers_; }
  const Eigen::VectorXd& ray() const { return ray_; }
  int iterations() const { return iterations_; }

 private:
  Eigen::VectorXd gradient() const {
    Eigen::VectorXd g = p_.linear;
    if (!p_.is_linear()) g += p_.hessian * v_;
    return g;
  }

  bool working_set_independent() const {
    std::vector<int> f;
    for (int j = 0; j < n_; ++j)
      if (state_[j] == kFree) f.push_back(j);
    const int nw = static_cast<int>(w_.size());
    if (nw == 0) return true;
    if (nw > static_cast<int>(f.size())) return false;
    Eigen::MatrixXd mt(f.size(), nw);
    for (int b = 0; b < nw; ++b)
      for (std::size_t a = 0; a < f.size(); ++a) mt(a, b) = p_.rows(w_[b], f[a]);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(mt);
    qr.setThreshold(1e-10);
    return qr.rank() == nw;
  }

  // Working set from constraints tight at the start point.
  void seed() {
    for (int r = 0; r < m_; ++r) {
      if (p_.senses[r] != Sense::eq) continue;
      w_.push_back(r);
      in_w_[r] = true;
      if (!working_set_independent()) {
        w_.pop_back();
        in_w_[r] = false;
      }
    }
    for (int j = 0; j < n_; ++j) {
      int s = kFree;
      if (p_.lower[j] == p_.upper[j]) s = kFixed;
      else if (v_[j] <= p_.lower[j]) s = kAtLower;
      else if (v_[j] >= p_.upper[j]) s = kAtUpper;
      if (s == kFree) continue;
      state_[j] = s;
      if (!working_set_independent()) state_[j] = kFree;
      else v_[j] = s == kAtUpper ? p_.upper[j] : p_.lower[j];
    }
    if (m_ == 0) return;
    const Eigen::VectorXd slack = p_.rhs - p_.rows * v_;
    for (int r = 0; r < m_; ++r) {
      if (p_.senses[r] == Sense::eq) continue;
      if (slack[r] > 1e-12 * (1.0 + std::abs(p_.rhs[r]))) continue;
      w_.push_back(r);
      in_w_[r] = true;
      if (!working_set_independent()) {
        w_.pop_back();
        in_w_[r] = false;
      }
    }
  }

  double ratio_test(const Eigen::VectorXd& d, double full, int& block) const {
    double alpha = full;
    block = -1;
    const double dn = d.cwiseAbs().maxCoeff();
    for (int j = 0; j < n_; ++j) {
      if (state_[j] != kFree) continue;
      if (d[j] < -1e-14 * dn && std::isfinite(p_.lower[j])) {
        const double a = std::max(0.0, (v_[j] - p_.lower[j]) / -d[j]);
        if (a < alpha) {
          alpha = a;
          block = j;
        }
      } else if (d[j] > 1e-14 * dn && std::isfinite(p_.upper[j])) {
        const double a = std::max(0.0, (p_.upper[j] - v_[j]) / d[j]);
        if (a < alpha) {
          alpha = a;
          block = j;
        }
      }
    }
    if (m_ > 0) {
      const Eigen::VectorXd ad = p_.rows * d;
      const Eigen::VectorXd act = p_.rows * v_;
      for (int r = 0; r < m_; ++r) {
        if (in_w_[r] || p_.senses[r] == Sense::eq) continue;
        const double rn = p_.rows.row(r).cwiseAbs().maxCoeff();
        if (ad[r] <= 1e-13 * rn * dn) continue;
        const double a = std::max(0.0, (p_.rhs[r] - act[r]) / ad[r]);
        if (a < alpha) {
          alpha = a;
          block = n_ + r;
        }
      }
    }
    return alpha;
  }

  // Fixing a variable can make the working rows dependent on the remaining
  // free columns; drop redundant inequality rows (newest first) until the
  // working set is independent again. They stay tight and are re-checked by
  // the ratio test.
  void prune_dependent_rows() {
    int rank = rank_of_working_set();
    for (int b = static_cast<int>(w_.size()) - 1; b >= 0 && rank < static_cast<int>(w_.size()); --b) {
      const int r = w_[b];
      if (p_.senses[r] == Sense::eq) continue;
      w_.erase(w_.begin() + b);
      if (rank_of_working_set() == rank) {
        in_w_[r] = false;
      } else {
        w_.insert(w_.begin() + b, r);  // not redundant
      }
    }
  }

  int rank_of_working_set() const {
    std::vector<int> f;
    for (int j = 0; j < n_; ++j)
      if (state_[j] == kFree) f.push_back(j);
    const int nw = static_cast<int>(w_.size());
    if (nw == 0 || f.empty()) return 0;
    Eigen::MatrixXd mt(f.size(), nw);
    for (int b = 0; b < nw; ++b)
      for (std::size_t a = 0; a < f.size(); ++a) mt(a, b) = p_.rows(w_[b], f[a]);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(mt);
    qr.setThreshold(1e-10);
    return static_cast<int>(qr.rank());
  }

  void activate(int code, const Eigen::VectorXd& d) {
    if (code < n_) {
      const int j = code;
      if (d[j] < 0.0) {
        state_[j] = kAtLower;
        v_[j] = p_.lower[j];
      } else {
        state_[j] = kAtUpper;
        v_[j] = p_.upper[j];
      }
    } else {
      w_.push_back(code - n_);
      in_w_[code - n_] = true;
    }
  }

  void deactivate(int code) {
    if (code < n_) {
      state_[code] = kFree;
    } else {
      const int r = code - n_;
      w_.erase(std::find(w_.begin(), w_.end(), r));
      in_w_[r] = false;
    }
  }

  const QpProblem& p_;
  int n_;
  int m_;
  double tol_;
  int max_iter_;
  double hess_scale_ = 1.0;
  Eigen::VectorXd v_;
  std::vector<int> state_;
  std::vector<bool> in_w_;
  std::vector<int> w_;
  std::vector<int> free_;
  std::vector<double> multipliers_;
  Eigen::VectorXd ray_;
  int iterations_ = 0;
};

double max_violation(const QpProblem& p, const Eigen::VectorXd& v) {
  double s = 0.0;
  for (int j = 0; j < p.num_vars(); ++j) s = std::max({s, p.lower[j] - v[j], v[j] - p.upper[j]});
  if (p.num_rows() > 0) {
    const Eigen::VectorXd act = p.rows * v - p.rhs;
    for (int r = 0; r < p.num_rows(); ++r)
      s = std::max(s, p.senses[r] == Sense::eq ? std::abs(act[r]) : act[r]);
  }
  return s;
}

}  // namespace

QpResult solve_active_set(const QpProblem& p, const QpOptions& opt) {
  p.validate();
  const int n = p.num_vars();
  const int m = p.num_rows();
  QpResult res;
  const int max_iter = opt.max_iterations > 0 ? opt.max_iterations : 50 * (n + m) + 1000;
  const double scale = 1.0 + (p.rhs.size() ? p.rhs.cwiseAbs().maxCoeff() : 0.0);
  const double feas_tol = opt.tol * scale;

  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  if (opt.start && opt.start->size() == n) v = *opt.start;
  for (int j = 0; j < n; ++j) {
    if (!std::isfinite(v[j])) v[j] = 0.0;
    v[j] = std::clamp(v[j], p.lower[j], p.upper[j]);
  }

  if (max_violation(p, v) > 0.1 * feas_tol) {
    // Phase one: min s  s.t.  rows v - s <= rhs (equalities split), s >= 0.
    int m1 = 0;
    for (int r = 0; r < m; ++r) m1 += p.senses[r] == Sense::eq ? 2 : 1;
    QpProblem ph;
    ph.linear = Eigen::VectorXd::Zero(n + 1);
    ph.linear[n] = 1.0;
    ph.lower.resize(n + 1);
    ph.upper.resize(n + 1);
    ph.lower.head(n) = p.lower;
    ph.upper.head(n) = p.upper;
    ph.lower[n] = 0.0;
    ph.upper[n] = std::numeric_limits<double>::infinity();
    ph.rows = Eigen::MatrixXd::Zero(m1, n + 1);
    ph.rhs.resize(m1);
    ph.senses.assign(m1, Sense::le);
    std::vector<std::pair<int, double>> origin;  // (row, sign)
    int q = 0;
    for (int r = 0; r < m; ++r) {
      ph.rows.row(q).head(n) = p.rows.row(r);
      ph.rows(q, n) = -1.0;
      ph.rhs[q] = p.rhs[r];
      origin.emplace_back(r, 1.0);
      ++q;
      if (p.senses[r] == Sense::eq) {
        ph.rows.row(q).head(n) = -p.rows.row(r);
        ph.rows(q, n) = -1.0;
        ph.rhs[q] = -p.rhs[r];
        origin.emplace_back(r, -1.0);
        ++q;
      }
    }
    Eigen::VectorXd v1(n + 1);
    v1.head(n) = v;
    v1[n] = std::max(0.0, max_violation(p, v));
    FeasibleActiveSet phase1(ph, opt.tol, max_iter);
    const Outcome o = phase1.run(v1);
    res.iterations += phase1.iterations();
    if (o != Outcome::optimal) {
      res.status = SolveStatus::failed;
      res.message = "phase one did not converge";
      res.x = v1.head(n);
      return res;
    }
    if (v1[n] > feas_tol) {
      res.status = SolveStatus::infeasible;
      res.message = "phase one optimum " + std::to_string(v1[n]) + " > 0";
      res.x = v1.head(n);
      res.ray = Eigen::VectorXd::Zero(m);
      const auto& mult = phase1.multipliers();
      for (int t = 0; t < m1; ++t) res.ray[origin[t].first] += origin[t].second * mult[t];
      return res;
    }
    v = v1.head(n);
    for (int j = 0; j < n; ++j) v[j] = std::clamp(v[j], p.lower[j], p.upper[j]);
  }

  FeasibleActiveSet phase2(p, opt.tol, max_iter);
  const Outcome o = phase2.run(v);
  res.iterations += phase2.iterations();
  res.x = v;
  switch (o) {
    case Outcome::unbounded:
      res.status = SolveStatus::unbounded;
      res.ray = phase2.ray();
      res.message = "feasible descent ray without blocking constraint";
      return res;
    case Outcome::nonconvex:
      res.status = SolveStatus::failed;
      res.message = "negative curvature on the working-set null space";
      return res;
    case Outcome::iteration_limit:
      res.status = SolveStatus::failed;
      res.message = "iteration limit";
      return res;
    case Outcome::numerical:
      res.status = SolveStatus::failed;
      res.message = "working set lost independence";
      return res;
    case Outcome::optimal:
      break;
  }
  res.row_duals = Eigen::VectorXd::Zero(m);
  const auto& mult = phase2.multipliers();
  for (int r = 0; r < m; ++r) res.row_duals[r] = mult.empty() ? 0.0 : mult[r];
  res.reduced_costs = p.linear;
  if (!p.is_linear()) res.reduced_costs += p.hessian * v;
  if (m > 0) res.reduced_costs += p.rows.transpose() * res.row_duals;
  res.certificate = evaluate_certificate(p, v, res.row_duals);
  res.objective = res.certificate.objective;
  const double gscale = 1.0 + p.linear.cwiseAbs().maxCoeff() +
                        (p.is_linear() ? 0.0 : (p.hessian * v).cwiseAbs().maxCoeff());
  const auto& c = res.certificate;
  if (c.primal_residual > 10 * feas_tol || c.dual_residual > 10 * opt.tol * gscale) {
    res.status = SolveStatus::failed;
    res.message = "certificate residuals exceed tolerance";
    return res;
  }
  res.status = SolveStatus::optimal;
  return res;
}

}  // namespace gnep
