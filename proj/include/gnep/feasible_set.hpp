#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "gnep/expression.hpp"

namespace gnep {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { le, eq };

/// sum_j coefs[j] * v[j]  (sense)  rhs
struct LinearConstraint {
  std::vector<double> coefs;
  Sense sense = Sense::le;
  double rhs = 0.0;
  std::string name;
};

/// lhs(v)  (sense)  rhs
struct NonlinearConstraint {
  Expression lhs;
  Sense sense = Sense::le;
  double rhs = 0.0;
  std::string name;
};

/// Instance-level feasibility tolerances (absolute).
struct Tolerances {
  double linear = 1e-8;     // bounds, integrality, linear rows
  double nonlinear = 1e-6;  // nonlinear rows
};

struct Violation {
  std::string what;
  double residual = 0.0;
};

/// Box + integrality + linear + nonlinear constraints over one variable block.
///
/// `owner` fixes how nonlinear expressions bind: -1 means the block is the
/// shared vector x (expressions use shared_var), otherwise the block is
/// y_owner (expressions use player_var(owner, j), and may also reference x,
/// which makes the set x-dependent).
struct FeasibleSet {
  int owner = -1;
  int n = 0;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<bool> integral;
  std::vector<LinearConstraint> linear;
  std::vector<NonlinearConstraint> nonlinear;

  static FeasibleSet free(int owner, int n);
  static FeasibleSet box(int owner, std::vector<double> lower, std::vector<double> upper);

  /// Throws std::invalid_argument on inconsistent data (widths, infinite
  /// bounds on integral variables, inverted bounds).
  void validate() const;

  /// True when some nonlinear constraint of a player block references x.
  bool depends_on_shared() const;
  bool all_integral() const;
  bool any_integral() const;
  bool has_finite_bounds() const;

  /// Lists every violated bound or constraint. `shared` is only read when
  /// the set is x-dependent or is the shared set itself.
  std::vector<Violation> violations(std::span<const double> v, std::span<const double> shared,
                                    const Tolerances& tol) const;
  bool contains(std::span<const double> v, std::span<const double> shared, const Tolerances& tol) const {
    return violations(v, shared, tol).empty();
  }
};

double row_activity(std::span<const double> coefs, std::span<const double> v);

}  // namespace gnep
