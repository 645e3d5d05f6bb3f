#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gnep {

/// Reference to one scalar decision variable. `player < 0` denotes the shared
/// block x; otherwise the variable is y_player[index].
struct VarRef {
  int player = -1;
  int index = 0;

  static VarRef shared(int k) { return {-1, k}; }
  static VarRef of_player(int i, int j) { return {i, j}; }
  bool is_shared() const { return player < 0; }

  friend auto operator<=>(const VarRef&, const VarRef&) = default;
};

/// A product of variables; sorted, repeated entries denote powers.
using Monomial = std::vector<VarRef>;

class Polynomial;
struct AffineInShared;

/// Closed algebraic tree over constants, shared variables, player variables,
/// sums, products and squares. Immutable and cheap to copy (shared nodes).
class Expression {
 public:
  enum class Kind { constant, shared_var, player_var, add, mul, square };

  Expression();  // constant zero

  static Expression constant(double value);
  static Expression shared_var(int k);
  static Expression player_var(int player, int j);
  static Expression add(std::vector<Expression> children);
  static Expression mul(std::vector<Expression> children);
  static Expression square(Expression child);

  Kind kind() const;
  double constant_value() const;           // Kind::constant only
  VarRef var() const;                      // variable kinds only
  const std::vector<Expression>& children() const;

  /// Evaluates with x = shared and y_i = players[i].
  double evaluate(std::span<const double> shared,
                  std::span<const std::vector<double>> players) const;

  /// Evaluates an expression that only references player `player`'s block
  /// (and possibly x). Throws if another player's variable appears.
  double evaluate_local(std::span<const double> shared, int player,
                        std::span<const double> block) const;

  /// Exact polynomial expansion. Throws std::length_error past `max_terms`.
  Polynomial expand(std::size_t max_terms = 20000) const;

  /// Largest shared index + 1 and, per player, largest local index + 1.
  void collect_extents(int& shared_extent, std::map<int, int>& player_extent) const;

  bool references_shared() const;
  bool references_other_player(int player) const;

  /// Re-targets every player_var(from, j) to player_var(to, j).
  Expression rebind_player(int from, int to) const;

  /// Replaces every variable leaf by `map(leaf)`.
  Expression remap(const std::function<Expression(VarRef)>& map) const;

  friend Expression operator+(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a, const Expression& b);
  friend Expression operator*(const Expression& a, const Expression& b);
  friend Expression operator*(double c, const Expression& e);
  friend Expression operator-(const Expression& e);

 private:
  struct Node;
  explicit Expression(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

/// Degree class of an expression in one group of variables.
enum class Degree { constant = 0, affine = 1, quadratic = 2, general = 3 };

struct Classification {
  Degree in_shared = Degree::constant;
  Degree in_players = Degree::constant;
};

/// Sparse polynomial with real coefficients; the exact normal form used for
/// classification and structure extraction.
class Polynomial {
 public:
  Polynomial() = default;
  static Polynomial constant(double c);
  static Polynomial variable(VarRef v);

  const std::map<Monomial, double>& terms() const { return terms_; }
  void add_term(Monomial m, double coef);

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator*=(double c);
  Polynomial times(const Polynomial& other, std::size_t max_terms) const;

  double evaluate(std::span<const double> shared,
                  std::span<const std::vector<double>> players) const;

  int degree() const;
  int degree_in_shared() const;
  int degree_in_players() const;
  Classification classify() const;

  double constant_term() const;
  /// Coefficient of the monomial exactly equal to `m` (0 when absent).
  double coefficient(const Monomial& m) const;

  /// Splits p(x, y) = a(y) + sum_k x_k b_k(y). Returns nullopt when some
  /// monomial has degree >= 2 in x.
  std::optional<AffineInShared> split_affine_in_shared() const;

  /// Substitutes constants for selected variables.
  Polynomial substitute(const std::map<VarRef, double>& values) const;
  /// Substitutes a whole block: x when `player < 0`, else y_player.
  Polynomial substitute_block(int player, std::span<const double> values) const;

  Expression to_expression() const;

  bool is_zero(double tol = 0.0) const;
  /// Max absolute coefficient difference.
  double distance(const Polynomial& other) const;

 private:
  std::map<Monomial, double> terms_;
};

struct AffineInShared {
  Polynomial base;
  std::map<int, Polynomial> slopes;
};

Classification classify(const Expression& e);

}  // namespace gnep
