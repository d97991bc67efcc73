#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <type_traits>
#include <string>
#include <utility>
#include <vector>

#include "gmsfp/errors.hpp"
#include "gmsfp/scalar.hpp"

namespace gmsfp {

enum class ControlKind { scale, saturating, capped, table };

/// Comparison function t -> phi(t) on [0, inf), drawn from a small catalog:
///
///   scale      k * t
///   saturating t / (1 + t)
///   capped     min(k * t, c)
///   table      piecewise-linear through (t_i, v_i), flat past the last knot
///
/// Every member is continuous and built from field operations, so it
/// evaluates exactly on rationals.
template <class Scalar>
class ControlFunction {
 public:
  static ControlFunction scale(Scalar k) {
    if (k < Scalar(0)) throw MalformedInput("scale factor must be nonnegative");
    ControlFunction f(ControlKind::scale);
    f.k_ = k;
    return f;
  }
  static ControlFunction saturating() { return ControlFunction(ControlKind::saturating); }
  static ControlFunction capped(Scalar k, Scalar cap) {
    if (k < Scalar(0) || cap < Scalar(0)) throw MalformedInput("capped control needs k, c >= 0");
    ControlFunction f(ControlKind::capped);
    f.k_ = k;
    f.cap_ = cap;
    return f;
  }
  static ControlFunction table(std::vector<Scalar> knots, std::vector<Scalar> values) {
    if (knots.size() != values.size() || knots.size() < 2)
      throw MalformedInput("lookup table needs matching knot/value lists of length >= 2");
    if (!(knots.front() == Scalar(0))) throw MalformedInput("lookup table must start at t = 0");
    for (std::size_t i = 1; i < knots.size(); ++i)
      if (!(knots[i - 1] < knots[i])) throw MalformedInput("lookup table knots must increase strictly");
    for (std::size_t i = 1; i < values.size(); ++i)
      if (values[i] < values[i - 1]) throw MalformedInput("lookup table values must be monotone");
    ControlFunction f(ControlKind::table);
    f.knots_ = std::move(knots);
    f.values_ = std::move(values);
    return f;
  }

  Scalar operator()(const Scalar& t) const {
    switch (kind_) {
      case ControlKind::scale:
        return k_ * t;
      case ControlKind::saturating:
        return t / (Scalar(1) + t);
      case ControlKind::capped: {
        const Scalar v = k_ * t;
        return v < cap_ ? v : cap_;
      }
      case ControlKind::table:
        break;
    }
    if (t <= knots_.front()) return values_.front();
    for (std::size_t i = 1; i < knots_.size(); ++i)
      if (t <= knots_[i]) {
        const Scalar w = (t - knots_[i - 1]) / (knots_[i] - knots_[i - 1]);
        return values_[i - 1] + w * (values_[i] - values_[i - 1]);
      }
    return values_.back();
  }

  ControlKind kind() const { return kind_; }
  const Scalar& k() const { return k_; }
  const Scalar& cap() const { return cap_; }
  const std::vector<Scalar>& knots() const { return knots_; }
  const std::vector<Scalar>& values() const { return values_; }

  std::string describe() const {
    using T = scalar_traits<Scalar>;
    switch (kind_) {
      case ControlKind::scale:
        return T::to_string(k_) + "*t";
      case ControlKind::saturating:
        return "t/(1+t)";
      case ControlKind::capped:
        return "min(" + T::to_string(k_) + "*t, " + T::to_string(cap_) + ")";
      case ControlKind::table:
        return "table(" + std::to_string(knots_.size()) + " knots)";
    }
    return {};
  }

 private:
  explicit ControlFunction(ControlKind kind) : kind_(kind) {}

  ControlKind kind_;
  Scalar k_{};
  Scalar cap_{};
  std::vector<Scalar> knots_;
  std::vector<Scalar> values_;
};

/// Which hypotheses a control function has to meet.
enum class ControlRole {
  /// phi for the rational contraction: nondecreasing, phi(t) = 0 iff t = 0,
  /// and phi(t) < t for t > 0.
  phi_contraction,
  /// phi in the (phi, psi, beta) contraction: nondecreasing, phi(t) = 0 iff t = 0.
  phi_weighted,
  /// psi: psi(t) = 0 iff t = 0.
  psi,
};

struct ControlValidation {
  bool ok = true;
  std::vector<std::string> issues;
};

/// Logarithmic sample grid, `count` points from lo to hi inclusive.
inline std::vector<double> log_grid(std::size_t count = 64, double lo = 1e-9, double hi = 1e3) {
  std::vector<double> g;
  g.reserve(count);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < count; ++i)
    g.push_back(count == 1 ? lo : std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1)));
  return g;
}

/// Numeric check of the role's hypotheses on a logarithmic grid; symbolic
/// properties (continuity, semicontinuity) hold for every catalog member.
template <class Scalar>
ControlValidation validate_control(const ControlFunction<Scalar>& f, ControlRole role,
                                   const std::vector<double>& grid = log_grid()) {
  using T = scalar_traits<Scalar>;
  ControlValidation v;
  auto issue = [&](std::string s) {
    v.ok = false;
    v.issues.push_back(std::move(s));
  };
  if (!T::is_zero(f(T::zero()))) issue("f(0) = " + T::to_string(f(T::zero())) + ", expected 0");
  std::optional<Scalar> prev;
  for (double td : grid) {
    const Scalar t = T::from_double(td);
    const Scalar ft = f(t);
    if (!(T::zero() < ft)) {
      issue("f(" + T::to_string(t) + ") = " + T::to_string(ft) + ", expected > 0");
      break;
    }
    if (role != ControlRole::psi && prev && ft < *prev) {
      issue("f decreases at t = " + T::to_string(t));
      break;
    }
    if (role == ControlRole::phi_contraction && !(ft < t)) {
      issue("f(" + T::to_string(t) + ") = " + T::to_string(ft) + " is not below t");
      break;
    }
    prev = ft;
  }
  return v;
}

/// Weight beta on ordered point pairs. Only its comparison against 1 matters
/// to the hypotheses that use it.
template <class Point, class Scalar>
class PairWeight {
 public:
  using Fn = std::function<Scalar(const Point&, const Point&)>;

  PairWeight(Fn fn, std::string description) : fn_(std::move(fn)), description_(std::move(description)) {}

  static PairWeight constant(Scalar value) {
    return PairWeight([value](const Point&, const Point&) { return value; },
                      "constant " + scalar_traits<Scalar>::to_string(value));
  }

  /// beta(x, y) = if_geq when x >= y, otherwise `otherwise`. Needs ordered points.
  static PairWeight order(Scalar if_geq, Scalar otherwise) {
    return PairWeight([=](const Point& x, const Point& y) { return y <= x ? if_geq : otherwise; },
                      "order rule");
  }

  /// Dense table over point indices.
  static PairWeight table(std::vector<std::vector<Scalar>> values)
    requires std::is_same_v<Point, std::size_t>
  {
    auto shared = std::make_shared<const std::vector<std::vector<Scalar>>>(std::move(values));
    return PairWeight(
        [shared](const std::size_t& x, const std::size_t& y) {
          if (x >= shared->size() || y >= (*shared)[x].size()) throw UnknownPoint("beta table too small");
          return (*shared)[x][y];
        },
        "table");
  }

  /// Same weight, except beta(x, y) = value for the one ordered pair given.
  PairWeight with_override(Point x, Point y, Scalar value) const {
    auto base = fn_;
    return PairWeight(
        [base, x, y, value](const Point& p, const Point& q) { return (p == x && q == y) ? value : base(p, q); },
        description_ + " with override");
  }

  Scalar operator()(const Point& x, const Point& y) const { return fn_(x, y); }
  const std::string& describe() const { return description_; }

 private:
  Fn fn_;
  std::string description_;
};

/// Constants of the contraction conditions.
template <class Scalar>
struct ContractionConstants {
  Scalar C{};   // weight of the min term in the phi condition
  Scalar L{};   // weight of the min term in the three-coefficient condition
  Scalar a1{};
  Scalar a2{};
  Scalar a3{};
};

template <class Point, class Scalar>
struct ControlFunctions {
  ControlFunction<Scalar> phi = ControlFunction<Scalar>::scale(Scalar(1) / Scalar(2));
  std::optional<ControlFunction<Scalar>> psi;
  std::optional<PairWeight<Point, Scalar>> beta;
  ContractionConstants<Scalar> constants;
};

}  // namespace gmsfp
