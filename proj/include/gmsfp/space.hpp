#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gmsfp/errors.hpp"
#include "gmsfp/rational.hpp"
#include "gmsfp/scalar.hpp"

namespace gmsfp {

/// Anything with a distance between points. The iteration engine only needs
/// this much.
template <class S>
concept Space = requires(const S& s, const typename S::point_type& p) {
  typename S::scalar_type;
  typename S::point_type;
  { s.distance(p, p) } -> std::convertible_to<typename S::scalar_type>;
  { s.contains(p) } -> std::convertible_to<bool>;
  { s.snap(p) } -> std::convertible_to<typename S::point_type>;
  { s.describe(p) } -> std::convertible_to<std::string>;
};

/// A space with a finite, indexed set of sample points. Exhaustive checks and
/// brute-force scans run over these.
template <class S>
concept EnumerableSpace = Space<S> && requires(const S& s, const typename S::point_type& p, std::size_t i) {
  { s.size() } -> std::convertible_to<std::size_t>;
  { s.point(i) } -> std::convertible_to<typename S::point_type>;
  { s.index_of(p) } -> std::same_as<std::optional<std::size_t>>;
};

/// Finite point set with a symmetric distance table. Points are addressed by
/// index; labels are opaque, but a label that parses as a rational number
/// carries that value as an annotation.
///
/// Construction rejects structurally unusable tables (non-square, negative,
/// NaN, duplicate labels) with MalformedTable. Axiom violations are left for
/// validate_gms to report.
template <class Scalar>
class FiniteGMS {
 public:
  using scalar_type = Scalar;
  using point_type = std::size_t;

  FiniteGMS(std::vector<std::string> labels, std::vector<std::vector<Scalar>> dist)
      : labels_(std::move(labels)), dist_(std::move(dist)) {
    if (labels_.empty()) throw MalformedTable("space has no points");
    if (dist_.size() != labels_.size())
      throw MalformedTable("distance table has " + std::to_string(dist_.size()) + " rows for " +
                           std::to_string(labels_.size()) + " points");
    for (std::size_t i = 0; i < dist_.size(); ++i) {
      if (dist_[i].size() != labels_.size())
        throw MalformedTable("distance table row " + std::to_string(i) + " is not square");
      for (std::size_t j = 0; j < dist_[i].size(); ++j) {
        const double v = scalar_traits<Scalar>::to_double(dist_[i][j]);
        if (std::isnan(v)) throw MalformedTable("NaN distance at (" + labels_[i] + ", " + labels_[j] + ")");
        if (dist_[i][j] < scalar_traits<Scalar>::zero())
          throw MalformedTable("negative distance at (" + labels_[i] + ", " + labels_[j] + ")");
      }
    }
    values_.reserve(labels_.size());
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (!by_label_.emplace(labels_[i], i).second) throw MalformedTable("duplicate point label '" + labels_[i] + "'");
      try {
        values_.push_back(Rational::parse(labels_[i]));
      } catch (const std::exception&) {
        values_.push_back(std::nullopt);
      }
    }
  }

  std::size_t size() const { return labels_.size(); }
  std::size_t point(std::size_t i) const { return i; }
  bool contains(std::size_t p) const { return p < labels_.size(); }
  std::size_t snap(std::size_t p) const { return p; }
  std::optional<std::size_t> index_of(std::size_t p) const {
    if (!contains(p)) return std::nullopt;
    return p;
  }

  const Scalar& distance(std::size_t a, std::size_t b) const {
    require(a);
    require(b);
    return dist_[a][b];
  }

  const std::string& label(std::size_t p) const {
    require(p);
    return labels_[p];
  }
  std::string describe(std::size_t p) const { return label(p); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<std::vector<Scalar>>& table() const { return dist_; }

  /// Rational value annotation of a point, when its label is a number.
  const std::optional<Rational>& value(std::size_t p) const {
    require(p);
    return values_[p];
  }

  std::size_t find(std::string_view label) const {
    if (auto it = by_label_.find(std::string(label)); it != by_label_.end()) return it->second;
    // Fall back to numeric identity so "0.5" finds the point labelled "1/2".
    try {
      if (auto idx = find_value(Rational::parse(label))) return *idx;
    } catch (const std::exception&) {
    }
    throw UnknownPoint("unknown point '" + std::string(label) + "'");
  }

  std::optional<std::size_t> find_value(const Rational& v) const {
    for (std::size_t i = 0; i < values_.size(); ++i)
      if (values_[i] && *values_[i] == v) return i;
    return std::nullopt;
  }

  /// Copy with d(a, b) = d(b, a) = value.
  FiniteGMS with_distance(std::size_t a, std::size_t b, const Scalar& value) const {
    require(a);
    require(b);
    auto dist = dist_;
    dist[a][b] = value;
    dist[b][a] = value;
    return FiniteGMS(labels_, std::move(dist));
  }

  /// Point i of the result is point perm[i] of this space.
  FiniteGMS permuted(const std::vector<std::size_t>& perm) const {
    if (perm.size() != size()) throw MalformedInput("permutation size mismatch");
    std::vector<std::string> labels(size());
    std::vector<std::vector<Scalar>> dist(size(), std::vector<Scalar>(size()));
    for (std::size_t i = 0; i < size(); ++i) {
      labels[i] = labels_[perm[i]];
      for (std::size_t j = 0; j < size(); ++j) dist[i][j] = dist_[perm[i]][perm[j]];
    }
    return FiniteGMS(std::move(labels), std::move(dist));
  }

 private:
  void require(std::size_t p) const {
    if (p >= labels_.size()) throw UnknownPoint("point index " + std::to_string(p) + " out of range");
  }

  std::vector<std::string> labels_;
  std::vector<std::vector<Scalar>> dist_;
  std::vector<std::optional<Rational>> values_;
  std::unordered_map<std::string, std::size_t> by_label_;
};

/// The interval [lower, upper] with the usual distance, sampled on a uniform
/// grid of grid_count points (both endpoints included).
///
/// Points are real numbers in the interval; maps evaluated on it are exact.
/// snap() rounds to the nearest grid point, ties going to the lower point, so
/// that iteration stays on a finite set.
class SampledIntervalSpace {
 public:
  using scalar_type = double;
  using point_type = double;

  SampledIntervalSpace(double lower, double upper, std::size_t grid_count)
      : lower_(lower), upper_(upper), count_(grid_count) {
    if (!(std::isfinite(lower) && std::isfinite(upper)) || !(lower < upper))
      throw MalformedInput("interval space needs finite lower < upper");
    if (grid_count < 2) throw MalformedInput("interval space needs grid_count >= 2");
  }

  double lower() const { return lower_; }
  double upper() const { return upper_; }
  std::size_t size() const { return count_; }
  double pitch() const { return (upper_ - lower_) / static_cast<double>(count_ - 1); }

  double point(std::size_t i) const {
    if (i >= count_) throw UnknownPoint("grid index " + std::to_string(i) + " out of range");
    if (i == count_ - 1) return upper_;
    return lower_ + (upper_ - lower_) * static_cast<double>(i) / static_cast<double>(count_ - 1);
  }

  double distance(double a, double b) const { return std::abs(a - b); }

  bool contains(double x) const {
    const double slack = 1e-12 * std::max({1.0, std::abs(lower_), std::abs(upper_)});
    return std::isfinite(x) && x >= lower_ - slack && x <= upper_ + slack;
  }

  std::size_t snap_index(double x) const {
    const double t = (x - lower_) * static_cast<double>(count_ - 1) / (upper_ - lower_);
    if (!(t > 0)) return 0;
    if (t >= static_cast<double>(count_ - 1)) return count_ - 1;
    const double base = std::floor(t);
    // Near-ties resolve downward; the 1e-9 band absorbs rounding in t.
    const double idx = (t - base > 0.5 + 1e-9) ? base + 1 : base;
    return static_cast<std::size_t>(idx);
  }

  double snap(double x) const { return point(snap_index(x)); }

  std::optional<std::size_t> index_of(double x) const {
    if (!contains(x)) return std::nullopt;
    const std::size_t i = snap_index(x);
    if (std::abs(point(i) - x) <= 1e-9 * pitch()) return i;
    return std::nullopt;
  }

  std::string describe(double x) const { return scalar_traits<double>::to_string(x); }

  /// The induced finite table; only sensible for small grids.
  FiniteGMS<double> to_finite() const {
    std::vector<std::string> labels(count_);
    std::vector<std::vector<double>> dist(count_, std::vector<double>(count_));
    for (std::size_t i = 0; i < count_; ++i) {
      labels[i] = describe(point(i));
      for (std::size_t j = 0; j < count_; ++j) dist[i][j] = distance(point(i), point(j));
    }
    return FiniteGMS<double>(std::move(labels), std::move(dist));
  }

 private:
  double lower_;
  double upper_;
  std::size_t count_;
};

/// An ordered list of points, optionally with a candidate limit.
template <class Point>
struct SequenceRecord {
  std::vector<Point> points;
  std::optional<Point> limit;
};

template <Space S>
void require_members(const S& space, const SequenceRecord<typename S::point_type>& seq) {
  if (seq.points.empty()) throw MalformedInput("sequence is empty");
  for (const auto& p : seq.points)
    if (!space.contains(p)) throw UnknownPoint("sequence member " + space.describe(p) + " is not in the space");
  if (seq.limit && !space.contains(*seq.limit)) throw UnknownPoint("candidate limit is not in the space");
}

}  // namespace gmsfp
