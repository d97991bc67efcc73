#pragma once

#include <compare>
#include <concepts>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gmsfp {

__extension__ typedef __int128 wide_int;

/// Exact rational number over 64-bit integers.
///
/// Kept in lowest terms with a positive denominator. Intermediate products are
/// formed in 128 bits; a result that does not fit back into 64 bits throws
/// std::overflow_error instead of wrapping.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t n) : num_(n) {}  // NOLINT(google-explicit-constructor)
  Rational(std::int64_t n, std::int64_t d) { assign(n, d); }
  template <std::floating_point F>
  Rational(F) = delete;  // use parse() or a ratio

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  std::string to_string() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  /// Parses "p/q", an integer, or a finite decimal such as "-0.125" or "3e-2".
  static Rational parse(std::string_view text);

  friend Rational operator+(const Rational& a, const Rational& b) {
    using i128 = wide_int;
    return from_wide(i128(a.num_) * b.den_ + i128(b.num_) * a.den_, i128(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    using i128 = wide_int;
    return from_wide(i128(a.num_) * b.den_ - i128(b.num_) * a.den_, i128(a.den_) * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    using i128 = wide_int;
    return from_wide(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("rational division by zero");
    using i128 = wide_int;
    return from_wide(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
  }
  Rational operator-() const {
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    using i128 = wide_int;
    const i128 lhs = i128(a.num_) * b.den_;
    const i128 rhs = i128(b.num_) * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  friend Rational abs(const Rational& r) { return r.num_ < 0 ? -r : r; }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
    return os << r.to_string();
  }

 private:
  static wide_int gcd_wide(wide_int a, wide_int b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
      const wide_int t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  static Rational from_wide(wide_int n, wide_int d) {
    if (d == 0) throw std::domain_error("rational with zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    const wide_int g = gcd_wide(n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    constexpr wide_int lo = INT64_MIN;
    constexpr wide_int hi = INT64_MAX;
    if (n < lo || n > hi || d > hi) throw std::overflow_error("rational overflow");
    Rational r;
    r.num_ = static_cast<std::int64_t>(n);
    r.den_ = static_cast<std::int64_t>(d);
    return r;
  }

  void assign(std::int64_t n, std::int64_t d) { *this = from_wide(n, d); }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

inline Rational Rational::parse(std::string_view text) {
  auto fail = [&]() -> Rational {
    throw std::invalid_argument("not a rational literal: '" + std::string(text) + "'");
  };
  auto trim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  if (text.empty()) return fail();

  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    if (text.find('/', slash + 1) != std::string_view::npos) return fail();
    const Rational p = parse(text.substr(0, slash));
    const Rational q = parse(text.substr(slash + 1));
    if (q.num() == 0) return fail();
    return p / q;
  }

  std::size_t i = 0;
  bool negative = false;
  if (text[i] == '+' || text[i] == '-') {
    negative = text[i] == '-';
    ++i;
  }
  wide_int mantissa = 0;
  int frac_digits = 0;
  bool any_digit = false;
  bool in_fraction = false;
  constexpr wide_int limit = wide_int(1) << 100;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '.') {
      if (in_fraction) return fail();
      in_fraction = true;
      continue;
    }
    if (c < '0' || c > '9') break;
    any_digit = true;
    mantissa = mantissa * 10 + (c - '0');
    if (mantissa > limit) throw std::overflow_error("rational literal too long");
    if (in_fraction) ++frac_digits;
  }
  if (!any_digit) return fail();
  int exponent = 0;
  if (i < text.size()) {
    if (text[i] != 'e' && text[i] != 'E') return fail();
    const std::string rest(text.substr(i + 1));
    if (rest.empty()) return fail();
    std::size_t used = 0;
    try {
      exponent = std::stoi(rest, &used);
    } catch (const std::exception&) {
      return fail();
    }
    if (used != rest.size()) return fail();
  }
  exponent -= frac_digits;
  if (exponent > 30 || exponent < -30) throw std::overflow_error("rational literal exponent out of range");
  wide_int scale = 1;
  for (int k = 0; k < (exponent < 0 ? -exponent : exponent); ++k) scale *= 10;
  if (exponent > 0 && mantissa > wide_int(INT64_MAX) / scale) throw std::overflow_error("rational overflow");
  if (negative) mantissa = -mantissa;
  return exponent >= 0 ? from_wide(mantissa * scale, 1) : from_wide(mantissa, scale);
}

}  // namespace gmsfp
