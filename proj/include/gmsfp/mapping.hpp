#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gmsfp/errors.hpp"
#include "gmsfp/space.hpp"

namespace gmsfp {

template <class Point>
using PointMap = std::function<Point(const Point&)>;

/// Right inverse of B: given y in the range of B, a point x with B x = y.
/// `current` is the pre-image the iteration is stepping from; most selectors
/// ignore it, but it lets a selector pick a branch when B is not injective.
template <class Point>
using Selector = std::function<std::optional<Point>(const Point& y, const Point& current)>;

/// The two self-maps of the coincidence problem plus the chosen right
/// inverse of B.
template <class Point>
struct MappingPair {
  PointMap<Point> A;
  PointMap<Point> B;
  Selector<Point> b_selector;
  std::string a_name = "A";
  std::string b_name = "B";
};

// ---------------------------------------------------------------------------
// Finite spaces: maps are index tables.

/// Pair on a finite space from index tables. When B is injective its inverse
/// is derived; otherwise `selector` (y -> x with B x = y) is required.
template <class Scalar>
MappingPair<std::size_t> make_finite_pair(const FiniteGMS<Scalar>& space, std::vector<std::size_t> a_table,
                                          std::vector<std::size_t> b_table,
                                          std::optional<std::map<std::size_t, std::size_t>> selector = std::nullopt) {
  const std::size_t n = space.size();
  if (a_table.size() != n || b_table.size() != n) throw MalformedInput("map tables must list one image per point");
  for (std::size_t i = 0; i < n; ++i)
    if (a_table[i] >= n || b_table[i] >= n) throw MalformedInput("map table image out of range");

  std::map<std::size_t, std::size_t> inverse;
  if (selector) {
    for (const auto& [y, x] : *selector) {
      if (x >= n || y >= n) throw MalformedInput("selector entry out of range");
      if (b_table[x] != y)
        throw MalformedInput("selector maps " + space.label(y) + " to " + space.label(x) + " but B(" +
                             space.label(x) + ") = " + space.label(b_table[x]));
    }
    inverse = std::move(*selector);
  } else {
    for (std::size_t x = 0; x < n; ++x)
      if (!inverse.emplace(b_table[x], x).second)
        throw MalformedInput("B is not injective (" + space.label(b_table[x]) +
                             " has two pre-images); supply an explicit selector");
  }

  MappingPair<std::size_t> pair;
  pair.A = [t = std::move(a_table)](const std::size_t& x) { return t.at(x); };
  pair.B = [t = std::move(b_table)](const std::size_t& x) { return t.at(x); };
  pair.b_selector = [inv = std::move(inverse)](const std::size_t& y, const std::size_t&) -> std::optional<std::size_t> {
    if (auto it = inv.find(y); it != inv.end()) return it->second;
    return std::nullopt;
  };
  return pair;
}

/// Catalog of maps usable on both finite (via value annotations) and interval
/// spaces.
struct CatalogMap {
  enum class Kind { identity, halving, constant, affine };
  Kind kind = Kind::identity;
  double a = 1.0;  // affine slope
  double b = 0.0;  // affine offset, or the constant value
  std::optional<std::string> point_label;  // constant(p) on finite spaces

  static CatalogMap identity() { return {}; }
  static CatalogMap halving() { return {Kind::halving, 0.5, 0.0, std::nullopt}; }
  static CatalogMap constant(double c) { return {Kind::constant, 0.0, c, std::nullopt}; }
  static CatalogMap constant_point(std::string label) { return {Kind::constant, 0.0, 0.0, std::move(label)}; }
  static CatalogMap affine(double a, double b) { return {Kind::affine, a, b, std::nullopt}; }

  bool injective() const { return kind == Kind::identity || kind == Kind::halving || (kind == Kind::affine && a != 0.0); }

  double operator()(double x) const {
    switch (kind) {
      case Kind::identity:
        return x;
      case Kind::halving:
        return x / 2;
      case Kind::constant:
        return b;
      case Kind::affine:
        return a * x + b;
    }
    return x;
  }

  std::optional<double> inverse(double y) const {
    switch (kind) {
      case Kind::identity:
        return y;
      case Kind::halving:
        return 2 * y;
      case Kind::affine:
        if (a != 0.0) return (y - b) / a;
        return std::nullopt;
      case Kind::constant:
        return std::nullopt;
    }
    return std::nullopt;
  }

  std::string describe() const {
    switch (kind) {
      case Kind::identity:
        return "identity";
      case Kind::halving:
        return "halving";
      case Kind::constant:
        return point_label ? "constant(" + *point_label + ")" : "constant(" + scalar_traits<double>::to_string(b) + ")";
      case Kind::affine:
        return "affine(" + scalar_traits<double>::to_string(a) + ", " + scalar_traits<double>::to_string(b) + ")";
    }
    return {};
  }
};

/// Index table of a catalog map on a finite space. Value-based maps use the
/// points' rational annotations and throw MalformedInput if an image is not a
/// point of the space.
template <class Scalar>
std::vector<std::size_t> catalog_table(const FiniteGMS<Scalar>& space, const CatalogMap& m) {
  std::vector<std::size_t> t(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    switch (m.kind) {
      case CatalogMap::Kind::identity:
        t[i] = i;
        continue;
      case CatalogMap::Kind::constant:
        if (m.point_label) {
          t[i] = space.find(*m.point_label);
          continue;
        }
        break;
      default:
        break;
    }
    const auto& v = space.value(i);
    if (!v) throw MalformedInput(m.describe() + " needs numeric point labels; '" + space.label(i) + "' is not one");
    Rational image;
    switch (m.kind) {
      case CatalogMap::Kind::halving:
        image = *v / Rational(2);
        break;
      case CatalogMap::Kind::constant:
        image = scalar_traits<Rational>::from_double(m.b);
        break;
      case CatalogMap::Kind::affine:
        image = scalar_traits<Rational>::from_double(m.a) * *v + scalar_traits<Rational>::from_double(m.b);
        break;
      case CatalogMap::Kind::identity:
        break;
    }
    const auto idx = space.find_value(image);
    if (!idx)
      throw MalformedInput(m.describe() + " maps " + space.label(i) + " to " + image.to_string() +
                           ", which is not a point of the space");
    t[i] = *idx;
  }
  return t;
}

/// Pair on an interval space from catalog maps. The selector inverts B; for a
/// constant B it keeps the current point (every point is a pre-image).
inline MappingPair<double> make_interval_pair(const SampledIntervalSpace& space, CatalogMap a, CatalogMap b) {
  MappingPair<double> pair;
  pair.a_name = a.describe();
  pair.b_name = b.describe();
  pair.A = [a](const double& x) { return a(x); };
  pair.B = [b](const double& x) { return b(x); };
  pair.b_selector = [b, space](const double& y, const double& current) -> std::optional<double> {
    if (b.kind == CatalogMap::Kind::constant || (b.kind == CatalogMap::Kind::affine && b.a == 0.0)) {
      if (std::abs(y - b(current)) <= 1e-12) return current;
      return std::nullopt;
    }
    const auto x = b.inverse(y);
    if (!x || !space.contains(*x)) return std::nullopt;
    return x;
  };
  return pair;
}

/// B on the same space as the identity: the convenience mode where a
/// coincidence point is a fixed point of A.
template <class Point>
MappingPair<Point> with_identity_b(PointMap<Point> a, std::string a_name = "A") {
  MappingPair<Point> pair;
  pair.A = std::move(a);
  pair.B = [](const Point& x) { return x; };
  pair.b_selector = [](const Point& y, const Point&) -> std::optional<Point> { return y; };
  pair.a_name = std::move(a_name);
  pair.b_name = "identity";
  return pair;
}

template <class Point>
struct RangeInclusionReport {
  bool holds = true;
  std::uint64_t points_checked = 0;
  /// Points x for which A x has no pre-image under the selector, or the
  /// selector's answer does not map back onto A x.
  std::vector<Point> failures;
};

/// Checks AX subset of BX on the sample points, through the selector: for
/// every x, sel(A x) exists, lies in the space, and B(sel(A x)) = A x.
template <EnumerableSpace S>
RangeInclusionReport<typename S::point_type> check_range_inclusion(const S& space,
                                                                   const MappingPair<typename S::point_type>& pair) {
  using T = scalar_traits<typename S::scalar_type>;
  RangeInclusionReport<typename S::point_type> rep;
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto x = space.point(i);
    const auto y = pair.A(x);
    ++rep.points_checked;
    const auto pre = pair.b_selector(y, x);
    if (!space.contains(y) || !pre || !space.contains(*pre) || !T::is_zero(space.distance(pair.B(*pre), y))) {
      rep.holds = false;
      if (rep.failures.size() < 1000) rep.failures.push_back(x);
    }
  }
  return rep;
}

}  // namespace gmsfp
