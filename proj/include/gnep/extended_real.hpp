#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace gnep {

/// Real number extended with +inf / -inf as tagged states. Optimal values of
/// infeasible (+inf) and unbounded (-inf) problems are carried this way rather
/// than through sentinel floats.
class ExtendedReal {
 public:
  enum class Kind { finite, plus_infinity, minus_infinity };

  constexpr ExtendedReal() = default;
  static constexpr ExtendedReal finite(double v) { return ExtendedReal(Kind::finite, v); }
  static constexpr ExtendedReal plus_infinity() { return ExtendedReal(Kind::plus_infinity, 0.0); }
  static constexpr ExtendedReal minus_infinity() { return ExtendedReal(Kind::minus_infinity, 0.0); }

  constexpr Kind kind() const { return kind_; }
  constexpr bool is_finite() const { return kind_ == Kind::finite; }
  constexpr bool is_plus_infinity() const { return kind_ == Kind::plus_infinity; }
  constexpr bool is_minus_infinity() const { return kind_ == Kind::minus_infinity; }

  double value() const {
    if (kind_ != Kind::finite) throw std::domain_error("extended real is not finite: " + to_string());
    return value_;
  }

  /// IEEE view, for reporting only.
  double to_double() const {
    switch (kind_) {
      case Kind::plus_infinity: return INFINITY;
      case Kind::minus_infinity: return -INFINITY;
      default: return value_;
    }
  }

  std::string to_string() const {
    switch (kind_) {
      case Kind::plus_infinity: return "+inf";
      case Kind::minus_infinity: return "-inf";
      default: return std::to_string(value_);
    }
  }

  friend constexpr bool operator<(const ExtendedReal& a, const ExtendedReal& b) {
    if (a.kind_ == b.kind_) return a.kind_ == Kind::finite && a.value_ < b.value_;
    return a.kind_ == Kind::minus_infinity || b.kind_ == Kind::plus_infinity;
  }
  friend constexpr bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
    return a.kind_ == b.kind_ && (a.kind_ != Kind::finite || a.value_ == b.value_);
  }

 private:
  constexpr ExtendedReal(Kind k, double v) : kind_(k), value_(v) {}
  Kind kind_ = Kind::finite;
  double value_ = 0.0;
};

}  // namespace gnep
