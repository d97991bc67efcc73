#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "gmsfp/rational.hpp"

namespace gmsfp {

template <class T>
struct scalar_traits;

/// Floating point distances. Comparisons carry a 1e-12 tolerance scaled by
/// the magnitude of the operands (never below an absolute 1e-12).
template <>
struct scalar_traits<double> {
  static constexpr bool exact = false;
  static constexpr double tolerance = 1e-12;

  static double zero() { return 0.0; }
  static double one() { return 1.0; }
  static double from_double(double x) { return x; }
  static double to_double(double x) { return x; }
  /// Shortest representation that round-trips.
  static std::string to_string(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
  }

  static double slack_tolerance(double a, double b) {
    return tolerance * std::max({1.0, std::abs(a), std::abs(b)});
  }
  /// a <= b, ties and near-ties count as satisfied.
  static bool leq(double a, double b) { return a <= b + slack_tolerance(a, b); }
  static bool is_zero(double a) { return std::abs(a) <= tolerance; }
};

/// Exact rational distances; comparisons are exact.
template <>
struct scalar_traits<Rational> {
  static constexpr bool exact = true;

  static Rational zero() { return Rational(0); }
  static Rational one() { return Rational(1); }
  /// Rounds to the nearest multiple of 1e-9. Used for sampling grids and for
  /// decimal parameters that arrive as JSON numbers.
  static Rational from_double(double x) {
    constexpr std::int64_t scale = 1'000'000'000;
    return Rational(static_cast<std::int64_t>(std::llround(x * static_cast<double>(scale))), scale);
  }
  static double to_double(const Rational& x) { return x.to_double(); }
  static std::string to_string(const Rational& x) { return x.to_string(); }
  static bool leq(const Rational& a, const Rational& b) { return a <= b; }
  static bool is_zero(const Rational& a) { return a.num() == 0; }
};

}  // namespace gmsfp
