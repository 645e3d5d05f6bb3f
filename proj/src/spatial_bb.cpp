#include "gnep/spatial_bb.hpp"

#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace gnep {

double SquareLink::lhs(const Eigen::VectorXd& v) const {
  double s = 0.0;
  for (const auto& [j, a] : terms) s += a * v[j];
  return s;
}

void SquareLinkProblem::validate() const {
  lp.validate();
  if (!lp.is_linear()) throw std::invalid_argument("square-link problem: objective must be linear");
  const int n = lp.num_vars();
  for (const auto& l : links) {
    if (l.var < 0 || l.var >= n) throw std::invalid_argument("square link: variable out of range");
    if (!(l.coef > 0.0)) throw std::invalid_argument("square link: coefficient must be positive");
    if (!std::isfinite(lp.lower[l.var]) || !std::isfinite(lp.upper[l.var]))
      throw std::invalid_argument("square link: linked variable needs finite bounds");
    for (const auto& [j, a] : l.terms)
      if (j < 0 || j >= n) throw std::invalid_argument("square link: term out of range");
  }
  for (int j = 0; j < n && j < static_cast<int>(integral.size()); ++j)
    if (integral[j] && (!std::isfinite(lp.lower[j]) || !std::isfinite(lp.upper[j])))
      throw std::invalid_argument("square-link problem: integral variable needs finite bounds");
}

namespace {

struct Node {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  Eigen::VectorXd start;
  double bound = -std::numeric_limits<double>::infinity();
  long id = 0;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

struct Tangent {
  int link;
  double at;
};

class Engine {
 public:
  Engine(const SquareLinkProblem& p, const SbbOptions& o) : p_(p), o_(o), n_(p.lp.num_vars()) {
    per_link_.resize(p.links.size());
  }

  SbbResult run() {
    SbbResult res;
    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    Node root;
    root.lower = p_.lp.lower;
    root.upper = p_.lp.upper;
    root.start = Eigen::VectorXd::Zero(n_);
    root.id = next_id_++;
    open.push(root);
    double pending_bound = std::numeric_limits<double>::infinity();  // nodes dropped by the limit

    while (!open.empty()) {
      Node node = open.top();
      open.pop();
      if (have_inc_ && node.bound >= inc_value_ - gap()) continue;
      if (res.nodes >= o_.max_nodes) {
        pending_bound = std::min(pending_bound, node.bound);
        while (!open.empty()) {
          pending_bound = std::min(pending_bound, open.top().bound);
          open.pop();
        }
        break;
      }
      ++res.nodes;
      process(node, open, res);
      if (unbounded_) {
        res.status = SolveStatus::unbounded;
        res.message = "relaxation unbounded";
        return res;
      }
    }
    res.lp_solves = lp_solves_;
    if (!have_inc_) {
      if (failed_lp_ || pending_bound < std::numeric_limits<double>::infinity()) {
        res.status = SolveStatus::failed;
        res.message = failed_lp_ ? "an LP relaxation failed: " + lp_message_ : "node limit reached without a feasible point";
      } else {
        res.status = SolveStatus::infeasible;
        res.message = "no feasible point";
      }
      return res;
    }
    res.status = SolveStatus::optimal;
    res.x = inc_;
    res.objective = inc_value_;
    res.lower_bound = std::min(inc_value_, pending_bound);
    res.certified = !failed_lp_ && pending_bound == std::numeric_limits<double>::infinity();
    if (!res.certified) res.message = failed_lp_ ? "an LP relaxation failed: " + lp_message_ : "node limit reached";
    return res;
  }

 private:
  double gap() const { return std::max(o_.abs_gap, o_.rel_gap * std::abs(inc_value_)); }

  QpProblem node_lp(const Node& node) const {
    QpProblem q;
    q.linear = p_.lp.linear;
    q.lower = node.lower;
    q.upper = node.upper;
    const int m0 = p_.lp.num_rows();
    int extra = static_cast<int>(tangents_.size());
    for (const auto& l : p_.links)
      if (node.upper[l.var] > node.lower[l.var]) extra += 3;
    q.rows = Eigen::MatrixXd::Zero(m0 + extra, n_);
    q.rhs.resize(m0 + extra);
    q.senses.assign(m0 + extra, Sense::le);
    if (m0 > 0) {
      q.rows.topRows(m0) = p_.lp.rows;
      q.rhs.head(m0) = p_.lp.rhs;
      for (int r = 0; r < m0; ++r) q.senses[r] = p_.lp.senses[r];
    }
    int r = m0;
    auto tangent_row = [&](const SquareLink& l, double at) {
      // coef*(2 at f - at^2) <= lhs
      for (const auto& [j, a] : l.terms) q.rows(r, j) -= a;
      q.rows(r, l.var) += 2.0 * l.coef * at;
      q.rhs[r] = l.coef * at * at;
      ++r;
    };
    for (const auto& t : tangents_) tangent_row(p_.links[t.link], t.at);
    for (const auto& l : p_.links) {
      const double lo = node.lower[l.var];
      const double hi = node.upper[l.var];
      if (!(hi > lo)) continue;
      tangent_row(l, lo);
      tangent_row(l, hi);
      for (const auto& [j, a] : l.terms) q.rows(r, j) += a;
      q.rows(r, l.var) -= l.coef * (lo + hi);
      q.rhs[r] = -l.coef * lo * hi;
      ++r;
    }
    // Fixed linked variables: the link is linear, impose it exactly.
    for (const auto& l : p_.links) {
      if (node.upper[l.var] > node.lower[l.var]) continue;
      const double f = node.lower[l.var];
      q.rows.conservativeResize(q.rows.rows() + 1, n_);
      q.rows.row(q.rows.rows() - 1).setZero();
      for (const auto& [j, a] : l.terms) q.rows(q.rows.rows() - 1, j) += a;
      q.rhs.conservativeResize(q.rhs.size() + 1);
      q.rhs[q.rhs.size() - 1] = l.coef * f * f;
      q.senses.push_back(Sense::eq);
    }
    return q;
  }

  bool add_tangent(int li, double at) {
    auto& list = per_link_[li];
    for (double a : list)
      if (std::abs(a - at) <= 1e-9 * (1.0 + std::abs(at))) return false;
    if (list.size() >= 200) return false;
    list.push_back(at);
    tangents_.push_back({li, at});
    return true;
  }

  bool exactly_feasible(const Eigen::VectorXd& v) const {
    if (v.size() != n_) return false;
    const double tol = 1e-9;
    for (int j = 0; j < n_; ++j) {
      if (v[j] < p_.lp.lower[j] - tol || v[j] > p_.lp.upper[j] + tol) return false;
      if (j < static_cast<int>(p_.integral.size()) && p_.integral[j] && std::abs(v[j] - std::round(v[j])) > tol)
        return false;
    }
    if (p_.lp.num_rows() > 0) {
      const Eigen::VectorXd act = p_.lp.rows * v - p_.lp.rhs;
      for (int r = 0; r < p_.lp.num_rows(); ++r) {
        const double s = 1e-9 * (1.0 + std::abs(p_.lp.rhs[r]));
        if (p_.lp.senses[r] == Sense::eq ? std::abs(act[r]) > s : act[r] > s) return false;
      }
    }
    for (const auto& l : p_.links)
      if (std::abs(l.residual(v)) > o_.link_tol) return false;
    return true;
  }

  void offer(const Eigen::VectorXd& v) {
    const double val = p_.lp.linear.dot(v);
    if (!have_inc_ || val < inc_value_ - 1e-12 * (1.0 + std::abs(inc_value_))) {
      have_inc_ = true;
      inc_ = v;
      inc_value_ = val;
    }
  }

  void process(Node& node, std::priority_queue<Node, std::vector<Node>, NodeOrder>& open, SbbResult&) {
    QpResult r;
    for (int round = 0;; ++round) {
      const QpProblem q = node_lp(node);
      QpOptions qo;
      qo.tol = o_.lp_tol;
      qo.start = &node.start;
      r = solve_active_set(q, qo);
      ++lp_solves_;
      if (r.status == SolveStatus::infeasible) return;
      if (r.status == SolveStatus::unbounded) {
        unbounded_ = true;
        return;
      }
      if (r.status != SolveStatus::optimal) {
        failed_lp_ = true;
        if (lp_message_.empty()) lp_message_ = r.message;
        return;
      }
      node.start = r.x;
      node.bound = std::max(node.bound, r.objective);
      if (have_inc_ && node.bound >= inc_value_ - gap()) return;
      if (o_.repair) {
        if (auto fixed = o_.repair(r.x); fixed && exactly_feasible(*fixed)) offer(*fixed);
        if (have_inc_ && node.bound >= inc_value_ - gap()) return;
      }
      if (round >= o_.cut_rounds) break;
      bool added = false;
      for (std::size_t li = 0; li < p_.links.size(); ++li) {
        const auto& l = p_.links[li];
        if (-l.residual(r.x) > o_.link_tol && node.upper[l.var] > node.lower[l.var])
          added = add_tangent(static_cast<int>(li), r.x[l.var]) || added;
      }
      if (!added) break;
    }
    const Eigen::VectorXd& v = r.x;

    int branch_var = -1;
    double split = 0.0;
    bool integer_branch = false;
    double worst = 1e-6;
    for (int j = 0; j < n_ && j < static_cast<int>(p_.integral.size()); ++j) {
      if (!p_.integral[j]) continue;
      const double frac = std::abs(v[j] - std::round(v[j]));
      if (frac > worst) {
        worst = frac;
        branch_var = j;
        split = std::floor(v[j]);
        integer_branch = true;
      }
    }
    if (branch_var < 0) {
      double viol = o_.link_tol;
      for (const auto& l : p_.links) {
        const double res = std::abs(l.residual(v));
        const double lo = node.lower[l.var];
        const double hi = node.upper[l.var];
        if (res > viol && hi - lo > 1e-12 * (1.0 + std::abs(hi))) {
          viol = res;
          branch_var = l.var;
          double s = v[l.var];
          const double margin = 1e-3 * (hi - lo);
          if (s - lo < margin || hi - s < margin) s = 0.5 * (lo + hi);
          split = s;
        }
      }
    }
    if (branch_var < 0) {
      Eigen::VectorXd cand = v;
      for (int j = 0; j < n_ && j < static_cast<int>(p_.integral.size()); ++j)
        if (p_.integral[j]) cand[j] = std::round(cand[j]);
      if (exactly_feasible(cand)) {
        offer(cand);
      } else {
        // Residuals below the branching threshold but not within link_tol
        // after rounding: accept the relaxation point as it is.
        offer(v);
      }
      return;
    }
    Node left = node;
    Node right = node;
    left.id = next_id_++;
    right.id = next_id_++;
    if (integer_branch) {
      left.upper[branch_var] = split;
      right.lower[branch_var] = split + 1.0;
    } else {
      left.upper[branch_var] = split;
      right.lower[branch_var] = split;
    }
    open.push(std::move(left));
    open.push(std::move(right));
  }

  const SquareLinkProblem& p_;
  const SbbOptions& o_;
  int n_;
  std::vector<Tangent> tangents_;
  std::vector<std::vector<double>> per_link_;
  bool have_inc_ = false;
  Eigen::VectorXd inc_;
  double inc_value_ = 0.0;
  bool failed_lp_ = false;
  std::string lp_message_;
  bool unbounded_ = false;
  long next_id_ = 0;
  int lp_solves_ = 0;
};

}  // namespace

SbbResult solve_square_link(const SquareLinkProblem& problem, const SbbOptions& options) {
  problem.validate();
  Engine e(problem, options);
  return e.run();
}

}  // namespace gnep
