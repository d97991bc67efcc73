#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gmsfp/scalar.hpp"
#include "gmsfp/space.hpp"

namespace gmsfp {

/// One failed instance of an axiom. For the quadrilateral inequality the
/// witness is (w, x, y, z) with lhs = d(w,x) and rhs = d(x,y)+d(y,z)+d(z,w);
/// for the triangle inequality it is (x, y, z) with lhs = d(x,z) and
/// rhs = d(x,y)+d(y,z).
template <class Scalar>
struct AxiomViolation {
  std::string axiom;  // "identity", "symmetry", "quadrilateral", "triangle"
  std::vector<std::size_t> witness;
  Scalar lhs;
  Scalar rhs;
};

template <class Scalar>
struct ValidationReport {
  bool valid_gms = true;
  bool exhaustive = true;
  std::uint64_t quadruples_checked = 0;
  std::uint64_t triples_checked = 0;
  std::uint64_t violation_count = 0;
  std::uint64_t triangle_violation_count = 0;
  std::vector<AxiomViolation<Scalar>> violations;
  std::vector<AxiomViolation<Scalar>> triangle_violations;

  bool is_metric() const { return valid_gms && triangle_violation_count == 0; }
};

struct ValidationOptions {
  /// Spaces up to this many points get the full O(n^4) quadruple scan.
  std::size_t exhaustive_cap = 64;
  /// Quadruples drawn above the cap.
  std::uint64_t sample_count = 100'000;
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
  /// Witnesses kept per list; counts are always complete.
  std::size_t max_witnesses = 10'000;
  /// Triangle scan is exhaustive up to this many points, sampled above.
  std::size_t triangle_exhaustive_cap = 256;
};

namespace detail {

template <class Scalar>
void record(std::vector<AxiomViolation<Scalar>>& list, std::uint64_t& count, std::size_t cap,
            AxiomViolation<Scalar> v) {
  ++count;
  if (list.size() < cap) list.push_back(std::move(v));
}

inline std::array<std::size_t, 4> draw_distinct4(std::mt19937_64& rng, std::size_t n) {
  std::array<std::size_t, 4> q{};
  for (std::size_t k = 0; k < 4; ++k) {
    bool fresh = false;
    while (!fresh) {
      q[k] = static_cast<std::size_t>(rng() % n);
      fresh = true;
      for (std::size_t m = 0; m < k; ++m) fresh = fresh && q[m] != q[k];
    }
  }
  return q;
}

}  // namespace detail

/// Checks the three generalized-metric axioms: d(x,y) = 0 iff x = y,
/// symmetry, and the quadrilateral inequality over pairwise distinct
/// quadruples. Triangle-inequality failures are collected separately so a
/// caller can certify a space that is a G.M.S. but not a metric.
template <class Scalar>
ValidationReport<Scalar> validate_gms(const FiniteGMS<Scalar>& space, const ValidationOptions& opt = {}) {
  using T = scalar_traits<Scalar>;
  ValidationReport<Scalar> rep;
  const std::size_t n = space.size();
  const auto& d = space.table();

  for (std::size_t i = 0; i < n; ++i) {
    if (!T::is_zero(d[i][i]))
      detail::record(rep.violations, rep.violation_count, opt.max_witnesses,
                     {"identity", {i, i}, d[i][i], T::zero()});
    for (std::size_t j = i + 1; j < n; ++j) {
      if (T::is_zero(d[i][j]) || T::is_zero(d[j][i]))
        detail::record(rep.violations, rep.violation_count, opt.max_witnesses,
                       {"identity", {i, j}, d[i][j], T::zero()});
      const bool symmetric = T::exact ? d[i][j] == d[j][i] : T::leq(d[i][j], d[j][i]) && T::leq(d[j][i], d[i][j]);
      if (!symmetric)
        detail::record(rep.violations, rep.violation_count, opt.max_witnesses,
                       {"symmetry", {i, j}, d[i][j], d[j][i]});
    }
  }

  auto check_quad = [&](std::size_t w, std::size_t x, std::size_t y, std::size_t z) {
    ++rep.quadruples_checked;
    const Scalar lhs = d[w][x];
    const Scalar rhs = d[x][y] + d[y][z] + d[z][w];
    if (!T::leq(lhs, rhs))
      detail::record(rep.violations, rep.violation_count, opt.max_witnesses,
                     {"quadrilateral", {w, x, y, z}, lhs, rhs});
  };

  if (n <= opt.exhaustive_cap) {
    for (std::size_t w = 0; w < n; ++w)
      for (std::size_t x = 0; x < n; ++x) {
        if (x == w) continue;
        for (std::size_t y = 0; y < n; ++y) {
          if (y == w || y == x) continue;
          for (std::size_t z = 0; z < n; ++z) {
            if (z == w || z == x || z == y) continue;
            check_quad(w, x, y, z);
          }
        }
      }
  } else {
    rep.exhaustive = false;
    std::mt19937_64 rng(opt.seed);
    for (std::uint64_t s = 0; s < opt.sample_count; ++s) {
      const auto q = detail::draw_distinct4(rng, n);
      check_quad(q[0], q[1], q[2], q[3]);
    }
  }

  auto check_triangle = [&](std::size_t x, std::size_t y, std::size_t z) {
    ++rep.triples_checked;
    const Scalar lhs = d[x][z];
    const Scalar rhs = d[x][y] + d[y][z];
    if (!T::leq(lhs, rhs))
      detail::record(rep.triangle_violations, rep.triangle_violation_count, opt.max_witnesses,
                     {"triangle", {x, y, z}, lhs, rhs});
  };
  if (n <= opt.triangle_exhaustive_cap) {
    // Endpoints unordered (x < z); the middle point ranges over the rest.
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t z = x + 1; z < n; ++z)
        for (std::size_t y = 0; y < n; ++y)
          if (y != x && y != z) check_triangle(x, y, z);
  } else {
    rep.exhaustive = false;
    std::mt19937_64 rng(opt.seed ^ 0x5bd1e995ULL);
    for (std::uint64_t s = 0; s < opt.sample_count; ++s) {
      const auto q = detail::draw_distinct4(rng, n);
      check_triangle(std::min(q[0], q[2]), q[1], std::max(q[0], q[2]));
    }
  }

  rep.valid_gms = rep.violation_count == 0;
  return rep;
}

// ---------------------------------------------------------------------------
// Sequences

/// First index of the tail used as a finite stand-in for "n -> infinity".
/// Defaults to the last quarter of the sequence.
inline std::size_t tail_start(std::size_t length, std::optional<std::size_t> burn_in) {
  if (length == 0) return 0;
  const std::size_t start = burn_in ? *burn_in : (3 * length) / 4;
  return std::min(start, length - 1);
}

/// d(seq_n, x) < tol for every n past the burn-in.
template <Space S>
bool converges_to(const S& space, const SequenceRecord<typename S::point_type>& seq,
                  const typename S::point_type& x, const typename S::scalar_type& tol,
                  std::optional<std::size_t> burn_in = std::nullopt) {
  require_members(space, seq);
  if (!space.contains(x)) throw UnknownPoint("candidate limit " + space.describe(x) + " is not in the space");
  for (std::size_t n = tail_start(seq.points.size(), burn_in); n < seq.points.size(); ++n) {
    const auto dn = space.distance(seq.points[n], x);
    // tol = 0 accepts exact hits only.
    if (!(dn < tol) && !(tol == typename S::scalar_type{} && dn == tol)) return false;
  }
  return true;
}

template <class Scalar>
struct CauchyResult {
  bool cauchy = true;
  std::size_t K = 0;
  /// Pair (r, s), r > s >= K, of largest distance in the tail; set when not Cauchy.
  std::optional<std::pair<std::size_t, std::size_t>> witness;
  Scalar witness_distance{};
};

/// Finite surrogate for the G.M.S. Cauchy property: all pairwise distances
/// past K are below eps, with K the burn-in index (the most favourable K that
/// still leaves at least two members).
template <Space S>
CauchyResult<typename S::scalar_type> is_gms_cauchy(const S& space,
                                                    const SequenceRecord<typename S::point_type>& seq,
                                                    const typename S::scalar_type& eps,
                                                    std::optional<std::size_t> burn_in = std::nullopt) {
  require_members(space, seq);
  const std::size_t len = seq.points.size();
  if (len < 2) throw MalformedInput("Cauchy check needs at least two members");
  CauchyResult<typename S::scalar_type> res;
  res.K = std::min(tail_start(len, burn_in), len - 2);
  bool have_max = false;
  for (std::size_t s = res.K; s < len; ++s)
    for (std::size_t r = s + 1; r < len; ++r) {
      const auto drs = space.distance(seq.points[r], seq.points[s]);
      if (!(drs < eps)) res.cauchy = false;
      if (!have_max || res.witness_distance < drs) {
        have_max = true;
        res.witness_distance = drs;
        res.witness = std::make_pair(r, s);
      }
    }
  if (res.cauchy) res.witness.reset();
  return res;
}

template <class Point, class Scalar>
struct DiscontinuityWitness {
  Point limit;
  Point probe;
  Scalar limit_distance;  // d(x, y)
  Scalar min_gap;         // min over the tail of |d(x_n, y) - d(x, y)|
};

template <class Point, class Scalar>
struct PathologyFinding {
  std::vector<Point> limits;
  CauchyResult<Scalar> cauchy;
  bool convergent_not_cauchy = false;
  bool multiple_limits = false;
  std::optional<DiscontinuityWitness<Point, Scalar>> discontinuity;

  bool any() const { return convergent_not_cauchy || multiple_limits || discontinuity.has_value(); }
};

struct PathologyOptions {
  double tol = 0.05;
  std::optional<std::size_t> burn_in;
};

/// Per probe sequence: (a) convergent but not Cauchy, (b) two limits further
/// apart than 2*tol, (c) a convergent x_n -> x and a point y with
/// |d(x_n, y) - d(x, y)| > tol along the whole tail. None of these can happen
/// under the triangle inequality.
template <EnumerableSpace S>
std::vector<PathologyFinding<typename S::point_type, typename S::scalar_type>> detect_pathologies(
    const S& space, const std::vector<SequenceRecord<typename S::point_type>>& probes,
    const PathologyOptions& opt = {}) {
  using Point = typename S::point_type;
  using Scalar = typename S::scalar_type;
  using T = scalar_traits<Scalar>;
  using std::abs;
  const Scalar tol = T::from_double(opt.tol);
  std::vector<PathologyFinding<Point, Scalar>> out;
  for (const auto& seq : probes) {
    require_members(space, seq);
    PathologyFinding<Point, Scalar> f;
    std::vector<Point> candidates;
    for (std::size_t i = 0; i < space.size(); ++i) candidates.push_back(space.point(i));
    if (seq.limit && !space.index_of(*seq.limit)) candidates.push_back(*seq.limit);
    for (const auto& c : candidates)
      if (converges_to(space, seq, c, tol, opt.burn_in)) f.limits.push_back(c);

    if (seq.points.size() >= 2) {
      f.cauchy = is_gms_cauchy(space, seq, tol, opt.burn_in);
      f.convergent_not_cauchy = !f.limits.empty() && !f.cauchy.cauchy;
    }
    const Scalar two_tol = tol + tol;
    for (std::size_t i = 0; i < f.limits.size() && !f.multiple_limits; ++i)
      for (std::size_t j = i + 1; j < f.limits.size(); ++j)
        if (two_tol < space.distance(f.limits[i], f.limits[j])) {
          f.multiple_limits = true;
          break;
        }

    const std::size_t start = tail_start(seq.points.size(), opt.burn_in);
    for (const auto& x : f.limits) {
      for (const auto& y : candidates) {
        const Scalar dxy = space.distance(x, y);
        bool first = true;
        Scalar min_gap{};
        for (std::size_t n = start; n < seq.points.size(); ++n) {
          const Scalar gap = abs(space.distance(seq.points[n], y) - dxy);
          if (first || gap < min_gap) min_gap = gap;
          first = false;
        }
        if (tol < min_gap) {
          f.discontinuity = DiscontinuityWitness<Point, Scalar>{x, y, dxy, min_gap};
          break;
        }
      }
      if (f.discontinuity) break;
    }
    out.push_back(std::move(f));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fixtures

/// Four-point space that satisfies the quadrilateral inequality but not the
/// triangle inequality: d(5/6,7/12) = 8/9 > d(5/6,2/3) + d(2/3,7/12) = 7/9.
inline FiniteGMS<Rational> example_gms_not_metric() {
  const Rational z(0), a(4, 9), b(1, 3), c(8, 9);
  // order: 5/6, 2/3, 7/12, 8/15
  return FiniteGMS<Rational>({"5/6", "2/3", "7/12", "8/15"}, {
                                                                 {z, a, c, b},
                                                                 {a, z, b, c},
                                                                 {c, b, z, a},
                                                                 {b, c, a, z},
                                                             });
}

/// X = E u D with E = {1/n : 1 <= n <= n_max}, D = {0, 2}. Distinct members of
/// the same part are at distance 1; d(u, v) = v for u in D, v in E.
/// E is listed first (1, 1/2, ..., 1/n_max), then 0 and 2.
inline FiniteGMS<Rational> example_discontinuous_gms(std::int64_t n_max = 64) {
  if (n_max < 2) throw MalformedInput("n_max must be at least 2");
  const std::size_t ne = static_cast<std::size_t>(n_max);
  const std::size_t n = ne + 2;
  std::vector<std::string> labels;
  std::vector<Rational> values;
  for (std::int64_t k = 1; k <= n_max; ++k) {
    values.emplace_back(1, k);
    labels.push_back(values.back().to_string());
  }
  labels.emplace_back("0");
  labels.emplace_back("2");
  values.emplace_back(0);
  values.emplace_back(2);
  std::vector<std::vector<Rational>> dist(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const bool ie = i < ne;
      const bool je = j < ne;
      if (ie == je)
        dist[i][j] = Rational(1);
      else
        dist[i][j] = ie ? values[i] : values[j];
    }
  return FiniteGMS<Rational>(std::move(labels), std::move(dist));
}

/// The sequence (1/n), n = 1..n_max, in example_discontinuous_gms(n_max),
/// with candidate limit 0.
inline SequenceRecord<std::size_t> example_discontinuous_sequence(std::int64_t n_max = 64) {
  SequenceRecord<std::size_t> seq;
  for (std::size_t i = 0; i < static_cast<std::size_t>(n_max); ++i) seq.points.push_back(i);
  seq.limit = static_cast<std::size_t>(n_max);  // the point 0
  return seq;
}

}  // namespace gmsfp
