#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "gmsfp/contractions.hpp"
#include "gmsfp/control.hpp"
#include "gmsfp/errors.hpp"
#include "gmsfp/mapping.hpp"
#include "gmsfp/space.hpp"

namespace gmsfp {

enum class IterationStatus { converged, coincidence_found_early, max_iter, cycle_detected, selector_failure };

inline std::string to_string(IterationStatus s) {
  switch (s) {
    case IterationStatus::converged:
      return "converged";
    case IterationStatus::coincidence_found_early:
      return "coincidence_found_early";
    case IterationStatus::max_iter:
      return "max_iter";
    case IterationStatus::cycle_detected:
      return "cycle_detected";
    case IterationStatus::selector_failure:
      return "selector_failure";
  }
  return "unknown";
}

/// Orbit of z_n = A x_n = B x_{n+1}.
///
/// x holds x_0, x_1, ...; z holds z_0, z_1, .... Every z[n] has a
/// pre-image x[n+1] recorded, except after a selector failure.
/// step_dist[k] = d(z_k, z_{k+1}) and skip_dist[k] = d(z_k, z_{k+2}).
template <class Point, class Scalar>
struct IterationTrace {
  std::vector<Point> z;
  std::vector<Point> x;
  std::vector<Scalar> step_dist;
  std::vector<Scalar> skip_dist;
  IterationStatus status = IterationStatus::max_iter;

  std::size_t iterations() const { return step_dist.size(); }
};

template <class Point>
struct IterationOptions {
  double tol = 1e-9;
  std::size_t max_iter = 100'000;
  /// Round A's outputs to the space's sample grid (a no-op on finite spaces).
  bool snap = true;
  /// Replaces the d(z_n, z_{n+1}) < tol test when set; called with
  /// (x_{n+1}, z_n).
  std::function<bool(const Point&, const Point&)> converged;
  /// Invoked after every step with (n, x_{n+1}, z_n).
  std::function<void(std::size_t, const Point&, const Point&)> on_step;
};

/// Jungck iteration from x0: z_n = A x_n, x_{n+1} = selector(z_n).
///
/// Stops with
///   coincidence_found_early  z_1 = z_0 exactly (x_1 is already a coincidence
///                            point), or a later exact repeat when tol = 0;
///   converged                d(z_{n-1}, z_n) < tol (or the custom test);
///   cycle_detected           a z value recurs with nonzero step (sampled
///                            spaces only);
///   selector_failure         A x_n has no pre-image under B's selector;
///   max_iter                 otherwise after max_iter steps.
template <Space S>
IterationTrace<typename S::point_type, typename S::scalar_type> jungck_iterate(
    const S& space, const MappingPair<typename S::point_type>& pair, const typename S::point_type& x0,
    const IterationOptions<typename S::point_type>& opt = {}) {
  using Point = typename S::point_type;
  using Scalar = typename S::scalar_type;
  using T = scalar_traits<Scalar>;
  if (!space.contains(x0)) throw UnknownPoint("starting point " + space.describe(x0) + " is not in the space");
  if (opt.tol < 0) throw MalformedInput("tol must be nonnegative");
  if (opt.max_iter < 1) throw MalformedInput("max_iter must be at least 1");
  const Scalar tol = T::from_double(opt.tol);

  IterationTrace<Point, Scalar> trace;
  auto apply_a = [&](const Point& x) { return opt.snap ? space.snap(pair.A(x)) : pair.A(x); };
  auto select = [&](const Point& z, const Point& current) -> bool {
    auto pre = pair.b_selector(z, current);
    if (!pre || !space.contains(*pre)) {
      trace.status = IterationStatus::selector_failure;
      return false;
    }
    trace.x.push_back(std::move(*pre));
    return true;
  };

  [[maybe_unused]] std::unordered_set<std::size_t> seen;
  auto remember = [&](const Point& z) {
    if constexpr (EnumerableSpace<S>) {
      if (auto idx = space.index_of(z)) return !seen.insert(*idx).second;
    }
    return false;
  };

  trace.x.push_back(x0);
  trace.z.push_back(apply_a(x0));
  remember(trace.z.back());
  if (!select(trace.z.back(), x0)) return trace;

  for (std::size_t n = 1; n <= opt.max_iter; ++n) {
    const Point& xn = trace.x[n];
    trace.z.push_back(apply_a(xn));
    const Point& zn = trace.z[n];
    const Point& zp = trace.z[n - 1];
    const Scalar step = space.distance(zp, zn);
    trace.step_dist.push_back(step);
    if (n >= 2) trace.skip_dist.push_back(space.distance(trace.z[n - 2], zn));
    if (!select(zn, xn)) return trace;
    if (opt.on_step) opt.on_step(n, trace.x.back(), zn);

    const bool repeat = zn == zp;
    const bool revisited = remember(zn);
    if (n == 1 && repeat) {
      trace.status = IterationStatus::coincidence_found_early;
      return trace;
    }
    const bool close = opt.converged ? opt.converged(trace.x.back(), zn) : step < tol;
    if (close) {
      trace.status = IterationStatus::converged;
      return trace;
    }
    if (repeat) {
      trace.status = IterationStatus::coincidence_found_early;
      return trace;
    }
    if (revisited) {
      trace.status = IterationStatus::cycle_detected;
      return trace;
    }
  }
  trace.status = IterationStatus::max_iter;
  return trace;
}

/// Largest grid the brute-force scans accept.
inline constexpr std::size_t kBruteForceCap = std::size_t{1} << 21;

/// Every sample point x with d(Ax, Bx) <= tol, in index order.
template <EnumerableSpace S>
std::vector<typename S::point_type> bruteforce_coincidences(const S& space,
                                                            const MappingPair<typename S::point_type>& pair,
                                                            double tol) {
  using T = scalar_traits<typename S::scalar_type>;
  if (space.size() > kBruteForceCap)
    throw MalformedInput("space too large for a brute-force scan (" + std::to_string(space.size()) + " points)");
  const auto t = T::from_double(tol);
  std::vector<typename S::point_type> out;
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto x = space.point(i);
    if (T::leq(space.distance(pair.A(x), pair.B(x)), t)) out.push_back(x);
  }
  return out;
}

template <class Point>
struct WeakCompatibilityReport {
  bool compatible = true;
  std::uint64_t coincidences_checked = 0;
  /// Coincidence points p with d(A B p, B A p) > tol.
  std::vector<Point> witnesses;
};

/// A and B commute at every coincidence point: d(Ax, Bx) <= tol implies
/// d(ABx, BAx) <= tol.
template <EnumerableSpace S>
WeakCompatibilityReport<typename S::point_type> check_weak_compatibility(const S& space,
                                                                         const MappingPair<typename S::point_type>& pair,
                                                                         double tol) {
  using T = scalar_traits<typename S::scalar_type>;
  const auto t = T::from_double(tol);
  WeakCompatibilityReport<typename S::point_type> rep;
  for (const auto& p : bruteforce_coincidences(space, pair, tol)) {
    ++rep.coincidences_checked;
    if (!T::leq(space.distance(pair.A(pair.B(p)), pair.B(pair.A(p))), t)) {
      rep.compatible = false;
      rep.witnesses.push_back(p);
    }
  }
  return rep;
}

/// Which contraction hypothesis gates the solver.
enum class ContractionKind { phi, linear, weighted };

inline std::string to_string(ContractionKind k) {
  switch (k) {
    case ContractionKind::phi:
      return "phi";
    case ContractionKind::linear:
      return "linear";
    case ContractionKind::weighted:
      return "weighted";
  }
  return "unknown";
}

template <class Point>
struct CoincidenceOptions {
  ContractionKind condition = ContractionKind::phi;
  /// Run even when a hypothesis check fails.
  bool override_hypotheses = false;
  PairScan scan;
  IterationOptions<Point> iteration;
};

template <class Point, class Scalar>
struct CoincidenceResult {
  Point u;
  Point value;  // A u = B u
  Scalar residual{};  // d(A u, B u)
  bool weakly_compatible = false;
  bool is_common_fixed_point = false;
  /// Known only when the whole sample set was scanned.
  std::optional<bool> unique_within_space;
  std::vector<Point> coincidences;
  IterationTrace<Point, Scalar> trace;
  ConditionReport<Point, Scalar> hypothesis;
  ControlValidation controls;
  std::optional<ConditionReport<Point, Scalar>> admissibility;
  std::optional<ConditionReport<Point, Scalar>> regularity;
};

/// Gate on the chosen contraction hypothesis, run the Jungck iteration, and
/// certify the limit:
///   u = selected pre-image of the limit with d(Au, Bu) <= tol;
///   uniqueness of the point of coincidence by brute-force scan;
///   common fixed point when A, B are weakly compatible and A z = B z = z.
///
/// Throws HypothesisViolated (gate failed, no override), SelectorFailure, or
/// NoConvergence.
template <EnumerableSpace S>
CoincidenceResult<typename S::point_type, typename S::scalar_type> find_coincidence(
    const S& space, const MappingPair<typename S::point_type>& pair,
    const ControlFunctions<typename S::point_type, typename S::scalar_type>& ctrl, const typename S::point_type& x0,
    const CoincidenceOptions<typename S::point_type>& opt = {}) {
  using Point = typename S::point_type;
  using Scalar = typename S::scalar_type;
  using T = scalar_traits<Scalar>;
  CoincidenceResult<Point, Scalar> res;
  const double tol = opt.iteration.tol;
  const Scalar t = T::from_double(tol);
  const Scalar one = T::one();

  auto gate = [&](bool ok, const std::string& what) {
    if (!ok && !opt.override_hypotheses) throw HypothesisViolated(what);
  };

  switch (opt.condition) {
    case ContractionKind::phi:
      res.controls = validate_control(ctrl.phi, ControlRole::phi_contraction);
      gate(res.controls.ok, "phi is not an admissible comparison function");
      res.hypothesis = check_phi_contraction(space, pair, ctrl, opt.scan);
      break;
    case ContractionKind::linear:
      res.hypothesis = check_linear_contraction(space, pair, ctrl, opt.scan);
      break;
    case ContractionKind::weighted: {
      if (!ctrl.psi || !ctrl.beta) throw MalformedInput("the weighted condition needs psi and beta");
      res.controls = validate_control(ctrl.phi, ControlRole::phi_weighted);
      const auto psi_check = validate_control(*ctrl.psi, ControlRole::psi);
      res.controls.ok = res.controls.ok && psi_check.ok;
      for (const auto& s : psi_check.issues) res.controls.issues.push_back("psi: " + s);
      gate(res.controls.ok, "phi/psi do not meet their hypotheses");
      res.hypothesis = check_weighted_contraction(space, pair, ctrl, opt.scan);
      res.admissibility = check_admissible(space, pair, *ctrl.beta, opt.scan);
      gate(res.admissibility->holds(), "A is not B-beta-admissible");
      gate(!((*ctrl.beta)(pair.B(x0), pair.A(x0)) < one), "beta(B x0, A x0) < 1 at the starting point");
      break;
    }
  }
  gate(res.hypothesis.holds(), "contraction condition '" + res.hypothesis.condition + "' fails on " +
                                   std::to_string(res.hypothesis.violation_count) + " pair(s)");

  res.trace = jungck_iterate(space, pair, x0, opt.iteration);
  switch (res.trace.status) {
    case IterationStatus::selector_failure:
      throw SelectorFailure("A x_n = " + space.describe(res.trace.z.back()) + " has no pre-image under B");
    case IterationStatus::max_iter:
      throw NoConvergence("no convergence within " + std::to_string(opt.iteration.max_iter) + " steps");
    case IterationStatus::cycle_detected:
      throw NoConvergence("orbit entered a cycle at " + space.describe(res.trace.z.back()));
    case IterationStatus::converged:
      res.u = res.trace.x.back();
      break;
    case IterationStatus::coincidence_found_early:
      res.u = res.trace.x[res.trace.z.size() - 1];
      break;
  }
  res.value = pair.B(res.u);
  res.residual = space.distance(pair.A(res.u), pair.B(res.u));
  if (!T::leq(res.residual, t))
    throw NoConvergence("limit " + space.describe(res.value) + " is not a coincidence value: d(Au, Bu) = " +
                        T::to_string(res.residual));

  if (space.size() <= kBruteForceCap) {
    res.coincidences = bruteforce_coincidences(space, pair, tol);
    bool unique = true;
    for (const auto& p : res.coincidences)
      if (!T::leq(space.distance(pair.A(p), res.value), t)) unique = false;
    res.unique_within_space = unique;
    res.weakly_compatible = check_weak_compatibility(space, pair, tol).compatible;
  }
  res.is_common_fixed_point = res.weakly_compatible && space.contains(res.value) &&
                              T::leq(space.distance(pair.A(res.value), res.value), t) &&
                              T::leq(space.distance(pair.B(res.value), res.value), t);

  if (opt.condition == ContractionKind::weighted) {
    SequenceRecord<Point> orbit{res.trace.z, std::nullopt};
    res.regularity = check_orbit_regularity(space, orbit, res.value, *ctrl.beta);
  }
  return res;
}

}  // namespace gmsfp
