#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "gmsfp/control.hpp"
#include "gmsfp/errors.hpp"
#include "gmsfp/gms.hpp"
#include "gmsfp/mapping.hpp"
#include "gmsfp/space.hpp"

namespace gmsfp {

template <class Point, class Scalar>
struct PairViolation {
  Point x;
  Point y;
  Scalar lhs;
  Scalar rhs;
  Scalar slack;  // rhs - lhs, negative on every listed violation
};

template <class Point, class Scalar>
struct ConditionReport {
  std::string condition;
  std::uint64_t pairs_checked = 0;
  std::uint64_t violation_count = 0;
  bool exhaustive = true;
  /// Sorted by point index; at most PairScan::max_listed entries.
  std::vector<PairViolation<Point, Scalar>> violations;

  bool holds() const { return violation_count == 0; }
};

/// How ordered pairs are enumerated.
struct PairScan {
  enum class Mode { automatic, exhaustive, sampled };
  Mode mode = Mode::automatic;
  /// automatic: exhaustive while size^2 stays under this, sampled above.
  std::uint64_t exhaustive_limit = 4'000'000;
  std::uint64_t sample_count = 1'000'000;
  std::uint64_t seed = 0x2545f4914f6cdd1dULL;
  std::size_t max_listed = 1000;

  static PairScan exhaustive() { return {Mode::exhaustive}; }
  static PairScan sampled(std::uint64_t count, std::uint64_t seed) {
    PairScan s;
    s.mode = Mode::sampled;
    s.sample_count = count;
    s.seed = seed;
    return s;
  }
};

template <class Scalar>
struct PairEval {
  Scalar lhs;
  Scalar rhs;
  bool violated;
};

/// lhs <= rhs with the scalar's tie rule.
template <class Scalar>
PairEval<Scalar> leq_eval(Scalar lhs, Scalar rhs) {
  const bool ok = scalar_traits<Scalar>::leq(lhs, rhs);
  return {std::move(lhs), std::move(rhs), !ok};
}

namespace detail {

template <EnumerableSpace S, class Eval>
ConditionReport<typename S::point_type, typename S::scalar_type> scan_pairs(const S& space, std::string condition,
                                                                            const PairScan& scan, Eval&& eval) {
  using Point = typename S::point_type;
  using Scalar = typename S::scalar_type;
  ConditionReport<Point, Scalar> rep;
  rep.condition = std::move(condition);
  const std::uint64_t n = space.size();
  const bool exhaustive = scan.mode == PairScan::Mode::exhaustive ||
                          (scan.mode == PairScan::Mode::automatic && n * n <= scan.exhaustive_limit);
  rep.exhaustive = exhaustive;

  std::vector<std::tuple<std::size_t, std::size_t, PairEval<Scalar>>> found;
  auto visit = [&](std::size_t i, std::size_t j) {
    ++rep.pairs_checked;
    auto e = eval(space.point(i), space.point(j));
    if (e.violated) {
      ++rep.violation_count;
      if (!exhaustive || found.size() < scan.max_listed) found.emplace_back(i, j, std::move(e));
    }
  };
  if (exhaustive) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) visit(i, j);
  } else {
    std::mt19937_64 rng(scan.seed);
    for (std::uint64_t s = 0; s < scan.sample_count; ++s) {
      const auto i = static_cast<std::size_t>(rng() % n);
      const auto j = static_cast<std::size_t>(rng() % n);
      visit(i, j);
    }
    std::stable_sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
      return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
    });
    if (found.size() > scan.max_listed) found.resize(scan.max_listed);
  }
  for (auto& [i, j, e] : found) {
    Scalar slack = e.rhs - e.lhs;
    rep.violations.push_back({space.point(i), space.point(j), std::move(e.lhs), std::move(e.rhs), std::move(slack)});
  }
  return rep;
}

template <Space S>
void require_point(const S& space, const typename S::point_type& p) {
  if (!space.contains(p)) throw UnknownPoint("point " + space.describe(p) + " is not in the space");
}

}  // namespace detail

/// Images of x and y under both maps, computed once.
template <class Point>
struct PairImages {
  Point ax, ay, bx, by;
};

template <class Point>
PairImages<Point> images(const MappingPair<Point>& pair, const Point& x, const Point& y) {
  return {pair.A(x), pair.A(y), pair.B(x), pair.B(y)};
}

/// The three candidates of the rational comparison term:
///   d(Bx,By),
///   d(Bx,Ax) (d(By,Ay) + 1) / (1 + d(Bx,By)),
///   d(By,Ay) (d(Bx,Ax) + 1) / (1 + d(Bx,By)).
template <Space S>
std::array<typename S::scalar_type, 3> rational_terms(const S& space, const PairImages<typename S::point_type>& im) {
  using Scalar = typename S::scalar_type;
  const Scalar one = scalar_traits<Scalar>::one();
  const Scalar dbb = space.distance(im.bx, im.by);
  const Scalar dx = space.distance(im.bx, im.ax);
  const Scalar dy = space.distance(im.by, im.ay);
  const Scalar denom = one + dbb;
  return {dbb, dx * (dy + one) / denom, dy * (dx + one) / denom};
}

template <Space S>
std::array<typename S::scalar_type, 3> rational_terms(const S& space, const MappingPair<typename S::point_type>& pair,
                                                      const typename S::point_type& x,
                                                      const typename S::point_type& y) {
  detail::require_point(space, x);
  detail::require_point(space, y);
  return rational_terms(space, images(pair, x, y));
}

template <Space S>
typename S::scalar_type rational_bound(const S& space, const PairImages<typename S::point_type>& im) {
  const auto t = rational_terms(space, im);
  return std::max({t[0], t[1], t[2]});
}

/// The comparison term M(x, y): the largest of rational_terms.
template <Space S>
typename S::scalar_type rational_bound(const S& space, const MappingPair<typename S::point_type>& pair,
                                       const typename S::point_type& x, const typename S::point_type& y) {
  const auto t = rational_terms(space, pair, x, y);
  return std::max({t[0], t[1], t[2]});
}

template <Space S>
typename S::scalar_type cross_min(const S& space, const PairImages<typename S::point_type>& im) {
  return std::min({space.distance(im.bx, im.ax), space.distance(im.by, im.ay), space.distance(im.bx, im.ay),
                   space.distance(im.by, im.ax)});
}

/// min{d(Bx,Ax), d(By,Ay), d(Bx,Ay), d(By,Ax)}, the factor multiplying C.
template <Space S>
typename S::scalar_type cross_min(const S& space, const MappingPair<typename S::point_type>& pair,
                                  const typename S::point_type& x, const typename S::point_type& y) {
  detail::require_point(space, x);
  detail::require_point(space, y);
  return cross_min(space, images(pair, x, y));
}

/// Both sides of d(Ax,Ay) <= phi(M(x,y)) + C * cross_min(x,y).
template <Space S>
PairEval<typename S::scalar_type> phi_contraction_sides(
    const S& space, const MappingPair<typename S::point_type>& pair,
    const ControlFunctions<typename S::point_type, typename S::scalar_type>& ctrl, const typename S::point_type& x,
    const typename S::point_type& y) {
  const auto im = images(pair, x, y);
  return leq_eval(space.distance(im.ax, im.ay),
                  ctrl.phi(rational_bound(space, im)) + ctrl.constants.C * cross_min(space, im));
}

/// d(Ax,Ay) <= phi(M(x,y)) + C * min{d(Bx,Ax), d(By,Ay), d(Bx,Ay), d(By,Ax)}
/// for every ordered pair.
template <EnumerableSpace S>
ConditionReport<typename S::point_type, typename S::scalar_type> check_phi_contraction(
    const S& space, const MappingPair<typename S::point_type>& pair,
    const ControlFunctions<typename S::point_type, typename S::scalar_type>& ctrl, const PairScan& scan = {}) {
  if (ctrl.constants.C < typename S::scalar_type{}) throw CoefficientError("C must be nonnegative");
  return detail::scan_pairs(space, "phi", scan,
                            [&](const auto& x, const auto& y) { return phi_contraction_sides(space, pair, ctrl, x, y); });
}

/// The same inequality on an explicit list of pairs, for spaces without a
/// finite sample set.
template <Space S>
ConditionReport<typename S::point_type, typename S::scalar_type> check_phi_contraction_on(
    const S& space, const MappingPair<typename S::point_type>& pair,
    const ControlFunctions<typename S::point_type, typename S::scalar_type>& ctrl,
    const std::vector<std::pair<typename S::point_type, typename S::point_type>>& pairs, std::size_t max_listed = 1000) {
  ConditionReport<typename S::point_type, typename S::scalar_type> rep;
  rep.condition = "phi";
  rep.exhaustive = false;
  for (const auto& [x, y] : pairs) {
    ++rep.pairs_checked;
    auto e = phi_contraction_sides(space, pair, ctrl, x, y);
    if (e.violated) {
      ++rep.violation_count;
      if (rep.violations.size() < max_listed) {
        auto slack = e.rhs - e.lhs;
        rep.violations.push_back({x, y, e.lhs, e.rhs, slack});
      }
    }
  }
  return rep;
}

template <class Scalar>
void require_linear_coefficients(const ContractionConstants<Scalar>& c) {
  const Scalar zero{};
  if (c.a1 < zero || c.a2 < zero || c.a3 < zero || c.L < zero)
    throw CoefficientError("coefficients a1, a2, a3, L must be nonnegative");
  if (!(c.a1 + c.a2 + c.a3 < scalar_traits<Scalar>::one()))
    throw CoefficientError("a1 + a2 + a3 = " + scalar_traits<Scalar>::to_string(c.a1 + c.a2 + c.a3) +
                           " must be below 1");
}

/// d(Ax,Ay) <= a1 d(Bx,By) + a2 d(Bx,Ax)(d(By,Ay)+1)/(1+d(Bx,By))
///             + a3 d(By,Ay)(d(Bx,Ax)+1)/(1+d(Bx,By)) + L * cross_min(x,y).
/// Throws CoefficientError unless a1 + a2 + a3 < 1 with all coefficients >= 0.
template <EnumerableSpace S>
ConditionReport<typename S::point_type, typename S::scalar_type> check_linear_contraction(
    const S& space, const MappingPair<typename S::point_type>& pair,
    const ControlFunctions<typename S::point_type, typename S::scalar_type>& ctrl, const PairScan& scan = {}) {
  const auto& c = ctrl.constants;
  require_linear_coefficients(c);
  return detail::scan_pairs(space, "linear", scan, [&](const auto& x, const auto& y) {
    const auto im = images(pair, x, y);
    const auto t = rational_terms(space, im);
    return leq_eval(space.distance(im.ax, im.ay), c.a1 * t[0] + c.a2 * t[1] + c.a3 * t[2] + c.L * cross_min(space, im));
  });
}

/// phi(beta(Bx,By) d(Ax,Ay)) <= phi(M(x,y)) - psi(M(x,y)).
template <EnumerableSpace S>
ConditionReport<typename S::point_type, typename S::scalar_type> check_weighted_contraction(
    const S& space, const MappingPair<typename S::point_type>& pair,
    const ControlFunctions<typename S::point_type, typename S::scalar_type>& ctrl, const PairScan& scan = {}) {
  if (!ctrl.psi) throw MalformedInput("the weighted condition needs psi");
  if (!ctrl.beta) throw MalformedInput("the weighted condition needs beta");
  return detail::scan_pairs(space, "weighted", scan, [&](const auto& x, const auto& y) {
    const auto im = images(pair, x, y);
    const auto m = rational_bound(space, im);
    return leq_eval(ctrl.phi((*ctrl.beta)(im.bx, im.by) * space.distance(im.ax, im.ay)), ctrl.phi(m) - (*ctrl.psi)(m));
  });
}

/// beta(Bx,By) > 1 implies beta(Ax,Ay) > 1. A violation lists
/// lhs = beta(Bx,By), rhs = beta(Ax,Ay).
template <EnumerableSpace S>
ConditionReport<typename S::point_type, typename S::scalar_type> check_admissible(
    const S& space, const MappingPair<typename S::point_type>& pair,
    const PairWeight<typename S::point_type, typename S::scalar_type>& beta, const PairScan& scan = {}) {
  using Scalar = typename S::scalar_type;
  const Scalar one = scalar_traits<Scalar>::one();
  return detail::scan_pairs(space, "admissible", scan, [&](const auto& x, const auto& y) {
    const Scalar before = beta(pair.B(x), pair.B(y));
    const Scalar after = beta(pair.A(x), pair.A(y));
    return PairEval<Scalar>{before, after, one < before && !(one < after)};
  });
}

/// Regularity of one recorded orbit with limit `limit`:
///   beta(x_n, x_{n+1}) >= 1 along the orbit,
///   beta(x_m, x_n) >= 1 for every recorded m < n,
///   beta(x_n, limit) >= 1 for at least one n in the tail.
/// Violations list lhs = beta value, rhs = 1.
template <Space S>
ConditionReport<typename S::point_type, typename S::scalar_type> check_orbit_regularity(
    const S& space, const SequenceRecord<typename S::point_type>& orbit, const typename S::point_type& limit,
    const PairWeight<typename S::point_type, typename S::scalar_type>& beta,
    std::optional<std::size_t> burn_in = std::nullopt, std::size_t max_listed = 1000) {
  using Scalar = typename S::scalar_type;
  require_members(space, orbit);
  detail::require_point(space, limit);
  const Scalar one = scalar_traits<Scalar>::one();
  ConditionReport<typename S::point_type, Scalar> rep;
  rep.condition = "regularity";
  auto check = [&](const auto& p, const auto& q) {
    ++rep.pairs_checked;
    const Scalar b = beta(p, q);
    if (b < one) {
      ++rep.violation_count;
      if (rep.violations.size() < max_listed) rep.violations.push_back({p, q, b, one, b - one});
    }
  };
  const auto& xs = orbit.points;
  // Consecutive pairs are among the m < n pairs; they are scanned once.
  for (std::size_t m = 0; m < xs.size(); ++m)
    for (std::size_t n = m + 1; n < xs.size(); ++n) check(xs[m], xs[n]);

  bool linked = false;
  for (std::size_t n = tail_start(xs.size(), burn_in); n < xs.size(); ++n) {
    ++rep.pairs_checked;
    if (!(beta(xs[n], limit) < one)) linked = true;
  }
  if (!linked) {
    ++rep.violation_count;
    const Scalar b = beta(xs.back(), limit);
    rep.violations.push_back({xs.back(), limit, b, one, b - one});
  }
  return rep;
}

/// Optional hypothesis on pairs of coincidence points u, v (Au = Bu, Av = Bv):
/// beta(Bu,Bv) >= 1 or beta(Bv,Bu) >= 1. Reported separately from the main
/// condition.
template <EnumerableSpace S>
ConditionReport<typename S::point_type, typename S::scalar_type> check_coincidence_linking(
    const S& space, const MappingPair<typename S::point_type>& pair,
    const PairWeight<typename S::point_type, typename S::scalar_type>& beta) {
  using Scalar = typename S::scalar_type;
  const Scalar one = scalar_traits<Scalar>::one();
  std::vector<typename S::point_type> coincidences;
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto x = space.point(i);
    if (scalar_traits<Scalar>::is_zero(space.distance(pair.A(x), pair.B(x)))) coincidences.push_back(x);
  }
  ConditionReport<typename S::point_type, Scalar> rep;
  rep.condition = "coincidence_linking";
  for (const auto& u : coincidences)
    for (const auto& v : coincidences) {
      ++rep.pairs_checked;
      const Scalar forward = beta(pair.B(u), pair.B(v));
      const Scalar backward = beta(pair.B(v), pair.B(u));
      if (forward < one && backward < one) {
        ++rep.violation_count;
        if (rep.violations.size() < 1000) rep.violations.push_back({u, v, std::max(forward, backward), one, std::max(forward, backward) - one});
      }
    }
  return rep;
}

}  // namespace gmsfp
