#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gmsfp/contractions.hpp"
#include "gmsfp/control.hpp"
#include "gmsfp/errors.hpp"
#include "gmsfp/iteration.hpp"
#include "gmsfp/mapping.hpp"
#include "gmsfp/random.hpp"
#include "gmsfp/scalar.hpp"

namespace gmsfp {

/// A real-valued function on the state set, stored densely by state index.
struct BoundedFunctional {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  bool operator==(const BoundedFunctional&) const = default;

  static BoundedFunctional constant(std::size_t n, double v) { return {std::vector<double>(n, v)}; }

  bool finite() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
  }

  double sup_abs() const {
    double m = 0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }
};

inline void require_same_states(const BoundedFunctional& u, const BoundedFunctional& v) {
  if (u.size() != v.size())
    throw StateSetMismatch("functionals are defined on " + std::to_string(u.size()) + " and " +
                           std::to_string(v.size()) + " states");
}

/// max over states of |u(a) - v(a)|.
inline double sup_norm_distance(const BoundedFunctional& u, const BoundedFunctional& v) {
  require_same_states(u, v);
  double d = 0;
  for (std::size_t i = 0; i < u.size(); ++i) d = std::max(d, std::abs(u[i] - v[i]));
  return d;
}

/// (|sup F1 - sup F2|, sup |F1 - F2|). The first never exceeds the second.
inline std::pair<double, double> sup_difference_gap(const BoundedFunctional& f1, const BoundedFunctional& f2) {
  require_same_states(f1, f2);
  if (f1.size() == 0) return {0.0, 0.0};
  const double s1 = *std::max_element(f1.values.begin(), f1.values.end());
  const double s2 = *std::max_element(f2.values.begin(), f2.values.end());
  return {std::abs(s1 - s2), sup_norm_distance(f1, f2)};
}

/// Bounded functionals on a fixed number of states under the sup norm.
class FunctionalSpace {
 public:
  using scalar_type = double;
  using point_type = BoundedFunctional;

  explicit FunctionalSpace(std::size_t states) : states_(states) {}

  double distance(const BoundedFunctional& u, const BoundedFunctional& v) const { return sup_norm_distance(u, v); }
  bool contains(const BoundedFunctional& u) const { return u.size() == states_ && u.finite(); }
  BoundedFunctional snap(const BoundedFunctional& u) const { return u; }
  std::string describe(const BoundedFunctional& u) const {
    std::string s = "[";
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (i) s += ", ";
      s += scalar_traits<double>::to_string(u[i]);
    }
    return s + "]";
  }
  std::size_t states() const { return states_; }

 private:
  std::size_t states_;
};

/// How the continuation value enters the reward:
///   affine   F(a, b, t) = c t + r(a, b)
///   clipped  F(a, b, t) = clamp(c t + r(a, b), lo, hi)
/// Both are Lipschitz in t with constant |c|.
struct RewardRule {
  enum class Kind { affine, clipped };
  Kind kind = Kind::affine;
  double c = 0.0;
  std::vector<std::vector<double>> r;  // empty means r = 0
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  static RewardRule affine(double c, std::vector<std::vector<double>> r = {}) {
    return {Kind::affine, c, std::move(r), -std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity()};
  }
  static RewardRule clipped(double c, double lo, double hi, std::vector<std::vector<double>> r = {}) {
    return {Kind::clipped, c, std::move(r), lo, hi};
  }

  double offset(std::size_t a, std::size_t b) const { return r.empty() ? 0.0 : r[a][b]; }

  double operator()(std::size_t a, std::size_t b, double t) const {
    const double v = c * t + offset(a, b);
    return kind == Kind::clipped ? std::clamp(v, lo, hi) : v;
  }
};

/// Finite states S, finite decisions E, reward h(a, b), transition
/// G(a, b) in S, and continuation rule F with declared Lipschitz constant.
struct DPProblem {
  std::vector<std::string> states;
  std::vector<std::string> decisions;
  std::vector<std::vector<double>> h;         // [state][decision]
  std::vector<std::vector<std::size_t>> G;    // [state][decision] -> state
  RewardRule F;
  double lipschitz_C = 0.0;

  std::size_t state_count() const { return states.size(); }
  std::size_t decision_count() const { return decisions.size(); }

  /// Throws MalformedInput on structural problems.
  void validate() const {
    const std::size_t n = states.size(), m = decisions.size();
    if (n == 0) throw MalformedInput("problem has no states");
    if (m == 0) throw MalformedInput("problem has no decisions");
    auto shape = [&](const auto& t, const char* name) {
      if (t.size() != n) throw MalformedInput(std::string(name) + " must have one row per state");
      for (const auto& row : t)
        if (row.size() != m) throw MalformedInput(std::string(name) + " must have one column per decision");
    };
    shape(h, "h");
    shape(G, "G");
    if (!F.r.empty()) shape(F.r, "F.r");
    for (const auto& row : h)
      for (double v : row)
        if (!std::isfinite(v)) throw MalformedInput("h must be finite");
    for (const auto& row : F.r)
      for (double v : row)
        if (!std::isfinite(v)) throw MalformedInput("F.r must be finite");
    for (const auto& row : G)
      for (std::size_t s : row)
        if (s >= n) throw MalformedInput("G refers to state " + std::to_string(s) + ", which does not exist");
    if (!std::isfinite(F.c)) throw MalformedInput("F.c must be finite");
    if (F.kind == RewardRule::Kind::clipped && !(F.lo <= F.hi)) throw MalformedInput("F clip range is empty");
    if (!(lipschitz_C >= 0) || !std::isfinite(lipschitz_C)) throw MalformedInput("lipschitz_C must be finite and >= 0");
  }

  double sup_abs_h() const {
    double s = 0;
    for (const auto& row : h)
      for (double v : row) s = std::max(s, std::abs(v));
    return s;
  }

  /// sup over (a, b) of |F(a, b, 1)|.
  double sup_abs_f_at_one() const {
    double s = 0;
    for (std::size_t a = 0; a < state_count(); ++a)
      for (std::size_t b = 0; b < decision_count(); ++b) s = std::max(s, std::abs(F(a, b, 1.0)));
    return s;
  }
};

/// (T v)(a) = max over b of h(a, b) + F(a, b, v(G(a, b))).
inline BoundedFunctional bellman(const DPProblem& p, const BoundedFunctional& v) {
  if (v.size() != p.state_count())
    throw StateSetMismatch("functional has " + std::to_string(v.size()) + " values for " +
                           std::to_string(p.state_count()) + " states");
  BoundedFunctional out;
  out.values.resize(p.state_count());
  for (std::size_t a = 0; a < p.state_count(); ++a) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < p.decision_count(); ++b)
      best = std::max(best, p.h[a][b] + p.F(a, b, v[p.G[a][b]]));
    out.values[a] = best;
  }
  return out;
}

/// Magnitude bound on T(T w): 2 sup|h| + sup|w| + 2 + 2 sup|F(., ., 1)|.
/// Valid whenever lipschitz_C <= 1.
inline double double_step_bound(const DPProblem& p, const BoundedFunctional& w) {
  return 2 * p.sup_abs_h() + w.sup_abs() + 2 + 2 * p.sup_abs_f_at_one();
}

/// O w = T(T w). When lipschitz_C <= 1 the result is checked against
/// double_step_bound and BoundednessViolation is thrown if it escapes.
inline BoundedFunctional bellman_twice(const DPProblem& p, const BoundedFunctional& w) {
  BoundedFunctional out = bellman(p, bellman(p, w));
  if (p.lipschitz_C <= 1.0) {
    const double bound = double_step_bound(p, w);
    const double got = out.sup_abs();
    if (got > bound * (1 + 1e-12))
      throw BoundednessViolation("|T(T w)| reached " + scalar_traits<double>::to_string(got) + ", above the bound " +
                                 scalar_traits<double>::to_string(bound));
  }
  return out;
}

struct LipschitzViolation {
  std::size_t state, decision;
  double t1, t2, lhs, rhs;
};

struct LipschitzReport {
  std::uint64_t checks = 0;
  std::uint64_t violation_count = 0;
  std::vector<LipschitzViolation> violations;
  bool holds() const { return violation_count == 0; }
};

inline std::vector<std::pair<double, double>> default_lipschitz_samples() {
  const double ts[] = {-100, -10, -1, -0.5, 0, 0.5, 1, 10, 100};
  std::vector<std::pair<double, double>> out;
  for (double a : ts)
    for (double b : ts)
      if (a < b) out.emplace_back(a, b);
  return out;
}

/// |F(a,b,t1) - F(a,b,t2)| <= lipschitz_C |t1 - t2| for every (a, b) and sample.
inline LipschitzReport check_lipschitz(const DPProblem& p,
                                       const std::vector<std::pair<double, double>>& samples = default_lipschitz_samples(),
                                       std::size_t max_listed = 1000) {
  if (samples.empty()) throw MalformedInput("no Lipschitz samples");
  using T = scalar_traits<double>;
  LipschitzReport rep;
  for (std::size_t a = 0; a < p.state_count(); ++a)
    for (std::size_t b = 0; b < p.decision_count(); ++b)
      for (const auto& [t1, t2] : samples) {
        ++rep.checks;
        const double lhs = std::abs(p.F(a, b, t1) - p.F(a, b, t2));
        const double rhs = p.lipschitz_C * std::abs(t1 - t2);
        if (!T::leq(lhs, rhs)) {
          ++rep.violation_count;
          if (rep.violations.size() < max_listed) rep.violations.push_back({a, b, t1, t2, lhs, rhs});
        }
      }
  return rep;
}

/// The pair (A, B) = (T∘T, T) on functionals. The selector answers
/// "x with T x = T(T current)" by x = T current.
inline MappingPair<BoundedFunctional> dp_pair(const DPProblem& p) {
  MappingPair<BoundedFunctional> pair;
  pair.A = [&p](const BoundedFunctional& w) { return bellman_twice(p, w); };
  pair.B = [&p](const BoundedFunctional& w) { return bellman(p, w); };
  pair.b_selector = [&p](const BoundedFunctional&, const BoundedFunctional& current) -> std::optional<BoundedFunctional> {
    return bellman(p, current);
  };
  pair.a_name = "TT";
  pair.b_name = "T";
  return pair;
}

/// Probe functionals: the constants 0, 1, -1, 100, the pointwise max and min
/// of h over decisions, and `random_count` seeded functionals in [-10, 10].
inline std::vector<BoundedFunctional> default_probes(const DPProblem& p, std::uint64_t seed = 0,
                                                     std::size_t random_count = 8) {
  const std::size_t n = p.state_count();
  std::vector<BoundedFunctional> out;
  for (double c : {0.0, 1.0, -1.0, 100.0}) out.push_back(BoundedFunctional::constant(n, c));
  BoundedFunctional hi, lo;
  for (const auto& row : p.h) {
    hi.values.push_back(*std::max_element(row.begin(), row.end()));
    lo.values.push_back(*std::min_element(row.begin(), row.end()));
  }
  out.push_back(std::move(hi));
  out.push_back(std::move(lo));
  Prng rng(seed);
  for (std::size_t k = 0; k < random_count; ++k) {
    BoundedFunctional f;
    for (std::size_t i = 0; i < n; ++i) f.values.push_back(rng.uniform(-10, 10));
    out.push_back(std::move(f));
  }
  return out;
}

inline std::vector<std::pair<BoundedFunctional, BoundedFunctional>> all_probe_pairs(
    const std::vector<BoundedFunctional>& probes) {
  std::vector<std::pair<BoundedFunctional, BoundedFunctional>> out;
  for (const auto& u : probes)
    for (const auto& v : probes) out.emplace_back(u, v);
  return out;
}

/// d(T T w1, T T w2) <= phi(M) + C_min * cross_min on each probe pair, with the
/// comparison terms formed from A = T∘T and B = T. A passing report is a
/// partial certificate: only the probes are checked.
inline ConditionReport<BoundedFunctional, double> check_sup_contraction(
    const DPProblem& p, const ControlFunction<double>& phi, double c_min,
    const std::vector<std::pair<BoundedFunctional, BoundedFunctional>>& probe_pairs) {
  if (probe_pairs.empty()) throw MalformedInput("no probe pairs");
  if (c_min < 0) throw CoefficientError("C must be nonnegative");
  FunctionalSpace space(p.state_count());
  ControlFunctions<BoundedFunctional, double> ctrl;
  ctrl.phi = phi;
  ctrl.constants.C = c_min;
  return check_phi_contraction_on(space, dp_pair(p), ctrl, probe_pairs);
}

/// A phi certificate for the double step, used when lipschitz_C >= 1.
struct SupContractionCertificate {
  ControlFunction<double> phi = ControlFunction<double>::scale(0.5);
  double c_min = 0.0;
};

struct DPSolveOptions {
  double tol = 1e-9;
  std::size_t max_iter = 10'000;
  std::optional<BoundedFunctional> w0;  // defaults to w = 0
  std::optional<SupContractionCertificate> certificate;
  std::uint64_t probe_seed = 0;
  bool override_hypotheses = false;
};

struct DPSolution {
  BoundedFunctional w;
  BoundedFunctional z;
  /// max(d(w, T z), d(z, T w)).
  double residual = 0;
  std::size_t iterations = 0;
  /// d(w_k, w_{k+1}) for each step of the iteration.
  std::vector<double> steps;
};

/// max(d(w, T z), d(z, T w)).
inline double system_residual(const DPProblem& p, const BoundedFunctional& w, const BoundedFunctional& z) {
  return std::max(sup_norm_distance(w, bellman(p, z)), sup_norm_distance(z, bellman(p, w)));
}

/// Solves w = T z, z = T w by Jungck iteration with A = T∘T and B = T from w0.
///
/// Gate: F must satisfy its declared Lipschitz constant, and either
/// lipschitz_C < 1 or a phi certificate must pass on the default probes.
/// Throws HypothesisViolated, or NoConvergence after max_iter steps.
inline DPSolution solve_system(const DPProblem& p, const DPSolveOptions& opt = {}) {
  p.validate();
  if (!(opt.tol > 0)) throw MalformedInput("tol must be positive");
  const std::size_t n = p.state_count();
  if (!opt.override_hypotheses) {
    const auto lip = check_lipschitz(p);
    if (!lip.holds())
      throw HypothesisViolated("F is not Lipschitz with the declared constant " +
                               scalar_traits<double>::to_string(p.lipschitz_C));
    if (opt.certificate) {
      const auto rep = check_sup_contraction(p, opt.certificate->phi, opt.certificate->c_min,
                                             all_probe_pairs(default_probes(p, opt.probe_seed)));
      if (!rep.holds())
        throw HypothesisViolated("phi certificate fails on " + std::to_string(rep.violation_count) + " probe pair(s)");
    } else if (!(p.lipschitz_C < 1)) {
      throw HypothesisViolated("lipschitz_C >= 1 and no phi certificate supplied");
    }
  }

  FunctionalSpace space(n);
  const auto pair = dp_pair(p);
  const BoundedFunctional w0 = opt.w0 ? *opt.w0 : BoundedFunctional::constant(n, 0.0);
  if (!space.contains(w0)) throw MalformedInput("starting functional does not match the state set");

  IterationOptions<BoundedFunctional> it;
  it.tol = opt.tol;
  it.max_iter = opt.max_iter;
  it.snap = false;
  // x_{n+1} = w and z_n = T w, so only d(w, T z) can be nonzero.
  it.converged = [&](const BoundedFunctional& w, const BoundedFunctional& z) {
    return sup_norm_distance(w, bellman(p, z)) <= opt.tol;
  };
  const auto trace = jungck_iterate(space, pair, w0, it);

  DPSolution sol;
  sol.w = trace.x.back();
  sol.z = bellman(p, sol.w);
  sol.residual = system_residual(p, sol.w, sol.z);
  sol.iterations = trace.iterations();
  for (std::size_t k = 0; k + 1 < trace.x.size(); ++k) sol.steps.push_back(sup_norm_distance(trace.x[k], trace.x[k + 1]));
  const bool stopped = trace.status == IterationStatus::converged ||
                       trace.status == IterationStatus::coincidence_found_early;
  if (!stopped || sol.residual > opt.tol)
    throw NoConvergence("system residual " + scalar_traits<double>::to_string(sol.residual) + " after " +
                        std::to_string(sol.iterations) + " steps");
  return sol;
}

}  // namespace gmsfp
