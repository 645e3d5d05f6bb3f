#include "gnep/expression.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace gnep {

struct Expression::Node {
  Kind kind = Kind::constant;
  double value = 0.0;
  VarRef var;
  std::vector<Expression> children;
};

Expression::Expression() : Expression(constant(0.0)) {}

Expression::Expression(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expression Expression::constant(double value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::constant;
  n->value = value;
  return Expression(std::move(n));
}

Expression Expression::shared_var(int k) {
  if (k < 0) throw std::invalid_argument("shared variable index must be nonnegative");
  auto n = std::make_shared<Node>();
  n->kind = Kind::shared_var;
  n->var = VarRef::shared(k);
  return Expression(std::move(n));
}

Expression Expression::player_var(int player, int j) {
  if (player < 0 || j < 0) throw std::invalid_argument("player variable indices must be nonnegative");
  auto n = std::make_shared<Node>();
  n->kind = Kind::player_var;
  n->var = VarRef::of_player(player, j);
  return Expression(std::move(n));
}

Expression Expression::add(std::vector<Expression> children) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::add;
  n->children = std::move(children);
  return Expression(std::move(n));
}

Expression Expression::mul(std::vector<Expression> children) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::mul;
  n->children = std::move(children);
  return Expression(std::move(n));
}

Expression Expression::square(Expression child) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::square;
  n->children.push_back(std::move(child));
  return Expression(std::move(n));
}

Expression::Kind Expression::kind() const { return node_->kind; }

double Expression::constant_value() const {
  if (node_->kind != Kind::constant) throw std::logic_error("not a constant node");
  return node_->value;
}

VarRef Expression::var() const {
  if (node_->kind != Kind::shared_var && node_->kind != Kind::player_var)
    throw std::logic_error("not a variable node");
  return node_->var;
}

const std::vector<Expression>& Expression::children() const { return node_->children; }

namespace {

template <class Lookup>
double eval_node(const Expression& e, const Lookup& lookup) {
  using K = Expression::Kind;
  switch (e.kind()) {
    case K::constant:
      return e.constant_value();
    case K::shared_var:
    case K::player_var:
      return lookup(e.var());
    case K::add: {
      double s = 0.0;
      for (const auto& c : e.children()) s += eval_node(c, lookup);
      return s;
    }
    case K::mul: {
      double p = 1.0;
      for (const auto& c : e.children()) p *= eval_node(c, lookup);
      return p;
    }
    case K::square: {
      const double v = eval_node(e.children().front(), lookup);
      return v * v;
    }
  }
  return 0.0;
}

}  // namespace

double Expression::evaluate(std::span<const double> shared,
                            std::span<const std::vector<double>> players) const {
  return eval_node(*this, [&](VarRef v) -> double {
    if (v.is_shared()) {
      if (static_cast<std::size_t>(v.index) >= shared.size())
        throw std::out_of_range("shared variable index out of range");
      return shared[v.index];
    }
    if (static_cast<std::size_t>(v.player) >= players.size() ||
        static_cast<std::size_t>(v.index) >= players[v.player].size())
      throw std::out_of_range("player variable index out of range");
    return players[v.player][v.index];
  });
}

double Expression::evaluate_local(std::span<const double> shared, int player,
                                  std::span<const double> block) const {
  return eval_node(*this, [&](VarRef v) -> double {
    if (v.is_shared()) {
      if (static_cast<std::size_t>(v.index) >= shared.size())
        throw std::out_of_range("shared variable index out of range");
      return shared[v.index];
    }
    if (v.player != player) throw std::invalid_argument("expression references another player's variable");
    if (static_cast<std::size_t>(v.index) >= block.size())
      throw std::out_of_range("player variable index out of range");
    return block[v.index];
  });
}

Polynomial Expression::expand(std::size_t max_terms) const {
  switch (kind()) {
    case Kind::constant:
      return Polynomial::constant(constant_value());
    case Kind::shared_var:
    case Kind::player_var:
      return Polynomial::variable(var());
    case Kind::add: {
      Polynomial p;
      for (const auto& c : children()) p += c.expand(max_terms);
      return p;
    }
    case Kind::mul: {
      Polynomial p = Polynomial::constant(1.0);
      for (const auto& c : children()) p = p.times(c.expand(max_terms), max_terms);
      return p;
    }
    case Kind::square: {
      const Polynomial c = children().front().expand(max_terms);
      return c.times(c, max_terms);
    }
  }
  return {};
}

void Expression::collect_extents(int& shared_extent, std::map<int, int>& player_extent) const {
  switch (kind()) {
    case Kind::constant:
      return;
    case Kind::shared_var:
      shared_extent = std::max(shared_extent, var().index + 1);
      return;
    case Kind::player_var: {
      int& e = player_extent[var().player];
      e = std::max(e, var().index + 1);
      return;
    }
    default:
      for (const auto& c : children()) c.collect_extents(shared_extent, player_extent);
  }
}

bool Expression::references_shared() const {
  if (kind() == Kind::shared_var) return true;
  for (const auto& c : children())
    if (c.references_shared()) return true;
  return false;
}

bool Expression::references_other_player(int player) const {
  if (kind() == Kind::player_var) return var().player != player;
  for (const auto& c : children())
    if (c.references_other_player(player)) return true;
  return false;
}

Expression Expression::rebind_player(int from, int to) const {
  switch (kind()) {
    case Kind::constant:
    case Kind::shared_var:
      return *this;
    case Kind::player_var:
      return var().player == from ? player_var(to, var().index) : *this;
    default: {
      std::vector<Expression> kids;
      kids.reserve(children().size());
      for (const auto& c : children()) kids.push_back(c.rebind_player(from, to));
      if (kind() == Kind::add) return add(std::move(kids));
      if (kind() == Kind::mul) return mul(std::move(kids));
      return square(std::move(kids.front()));
    }
  }
}

Expression Expression::remap(const std::function<Expression(VarRef)>& map) const {
  switch (kind()) {
    case Kind::constant:
      return *this;
    case Kind::shared_var:
    case Kind::player_var:
      return map(var());
    default: {
      std::vector<Expression> kids;
      kids.reserve(children().size());
      for (const auto& c : children()) kids.push_back(c.remap(map));
      if (kind() == Kind::add) return add(std::move(kids));
      if (kind() == Kind::mul) return mul(std::move(kids));
      return square(std::move(kids.front()));
    }
  }
}

Expression operator+(const Expression& a, const Expression& b) { return Expression::add({a, b}); }
Expression operator-(const Expression& a, const Expression& b) {
  return Expression::add({a, Expression::mul({Expression::constant(-1.0), b})});
}
Expression operator*(const Expression& a, const Expression& b) { return Expression::mul({a, b}); }
Expression operator*(double c, const Expression& e) { return Expression::mul({Expression::constant(c), e}); }
Expression operator-(const Expression& e) { return Expression::mul({Expression::constant(-1.0), e}); }

// ---------------------------------------------------------------------------
// Polynomial

Polynomial Polynomial::constant(double c) {
  Polynomial p;
  p.add_term({}, c);
  return p;
}

Polynomial Polynomial::variable(VarRef v) {
  Polynomial p;
  p.add_term({v}, 1.0);
  return p;
}

void Polynomial::add_term(Monomial m, double coef) {
  if (coef == 0.0) return;
  std::sort(m.begin(), m.end());
  auto [it, inserted] = terms_.try_emplace(std::move(m), coef);
  if (!inserted) {
    it->second += coef;
    if (it->second == 0.0) terms_.erase(it);
  }
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  for (const auto& [m, c] : other.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator*=(double c) {
  if (c == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, v] : terms_) v *= c;
  return *this;
}

Polynomial Polynomial::times(const Polynomial& other, std::size_t max_terms) const {
  Polynomial out;
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : other.terms_) {
      Monomial m = ma;
      m.insert(m.end(), mb.begin(), mb.end());
      out.add_term(std::move(m), ca * cb);
      if (out.terms_.size() > max_terms) throw std::length_error("polynomial expansion exceeds term cap");
    }
  }
  return out;
}

double Polynomial::evaluate(std::span<const double> shared,
                            std::span<const std::vector<double>> players) const {
  double s = 0.0;
  for (const auto& [m, c] : terms_) {
    double v = c;
    for (const auto& r : m) v *= r.is_shared() ? shared[r.index] : players[r.player][r.index];
    s += v;
  }
  return s;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, static_cast<int>(m.size()));
  return d;
}

int Polynomial::degree_in_shared() const {
  int d = 0;
  for (const auto& [m, c] : terms_)
    d = std::max(d, static_cast<int>(std::count_if(m.begin(), m.end(), [](VarRef v) { return v.is_shared(); })));
  return d;
}

int Polynomial::degree_in_players() const {
  int d = 0;
  for (const auto& [m, c] : terms_)
    d = std::max(d, static_cast<int>(std::count_if(m.begin(), m.end(), [](VarRef v) { return !v.is_shared(); })));
  return d;
}

namespace {
Degree to_degree(int d) { return d >= 3 ? Degree::general : static_cast<Degree>(d); }
}  // namespace

Classification Polynomial::classify() const {
  return {to_degree(degree_in_shared()), to_degree(degree_in_players())};
}

double Polynomial::constant_term() const { return coefficient({}); }

double Polynomial::coefficient(const Monomial& m) const {
  Monomial key = m;
  std::sort(key.begin(), key.end());
  auto it = terms_.find(key);
  return it == terms_.end() ? 0.0 : it->second;
}

std::optional<AffineInShared> Polynomial::split_affine_in_shared() const {
  AffineInShared out;
  for (const auto& [m, c] : terms_) {
    Monomial rest;
    int shared_index = -1;
    int shared_count = 0;
    for (const auto& v : m) {
      if (v.is_shared()) {
        ++shared_count;
        shared_index = v.index;
      } else {
        rest.push_back(v);
      }
    }
    if (shared_count >= 2) return std::nullopt;
    if (shared_count == 0)
      out.base.add_term(std::move(rest), c);
    else
      out.slopes[shared_index].add_term(std::move(rest), c);
  }
  return out;
}

Polynomial Polynomial::substitute(const std::map<VarRef, double>& values) const {
  Polynomial out;
  for (const auto& [m, c] : terms_) {
    Monomial rest;
    double coef = c;
    for (const auto& v : m) {
      auto it = values.find(v);
      if (it == values.end())
        rest.push_back(v);
      else
        coef *= it->second;
    }
    out.add_term(std::move(rest), coef);
  }
  return out;
}

Polynomial Polynomial::substitute_block(int player, std::span<const double> values) const {
  Polynomial out;
  for (const auto& [m, c] : terms_) {
    Monomial rest;
    double coef = c;
    for (const auto& v : m) {
      const bool hit = player < 0 ? v.is_shared() : v.player == player;
      if (!hit) {
        rest.push_back(v);
        continue;
      }
      if (v.index >= static_cast<int>(values.size())) throw std::out_of_range("substitute_block: index past block");
      coef *= values[v.index];
    }
    out.add_term(std::move(rest), coef);
  }
  return out;
}

Expression Polynomial::to_expression() const {
  std::vector<Expression> sum;
  for (const auto& [m, c] : terms_) {
    std::vector<Expression> factors{Expression::constant(c)};
    for (const auto& v : m)
      factors.push_back(v.is_shared() ? Expression::shared_var(v.index) : Expression::player_var(v.player, v.index));
    sum.push_back(factors.size() == 1 ? factors.front() : Expression::mul(std::move(factors)));
  }
  if (sum.empty()) return Expression::constant(0.0);
  if (sum.size() == 1) return sum.front();
  return Expression::add(std::move(sum));
}

bool Polynomial::is_zero(double tol) const {
  for (const auto& [m, c] : terms_)
    if (std::abs(c) > tol) return false;
  return true;
}

double Polynomial::distance(const Polynomial& other) const {
  Polynomial diff = *this;
  Polynomial neg = other;
  neg *= -1.0;
  diff += neg;
  double d = 0.0;
  for (const auto& [m, c] : diff.terms_) d = std::max(d, std::abs(c));
  return d;
}

Classification classify(const Expression& e) { return e.expand().classify(); }

}  // namespace gnep
