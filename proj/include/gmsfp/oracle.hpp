#pragma once

// Brute-force reference implementations. Nothing here calls into the
// iteration or dynprog engines: the point is a second, naive code path to
// compare them against.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "gmsfp/control.hpp"
#include "gmsfp/dynprog.hpp"
#include "gmsfp/errors.hpp"
#include "gmsfp/gms.hpp"
#include "gmsfp/random.hpp"
#include "gmsfp/rational.hpp"
#include "gmsfp/space.hpp"

namespace gmsfp::oracle {

enum class TableKind { metric, gms_only, arbitrary_symmetric };

inline std::string to_string(TableKind k) {
  switch (k) {
    case TableKind::metric:
      return "metric";
    case TableKind::gms_only:
      return "gms_only";
    case TableKind::arbitrary_symmetric:
      return "arbitrary_symmetric";
  }
  return "unknown";
}

/// Off-diagonal entries are drawn from lower + (upper - lower) k / denominator,
/// k uniform in [0, denominator], so tables are exact rationals.
struct RandomInstanceSpec {
  std::uint64_t seed = 1;
  std::size_t point_count = 4;
  TableKind kind = TableKind::metric;
  Rational lower{1};
  Rational upper{3};
  std::int64_t denominator = 100;
  std::uint64_t max_attempts = 100'000;
};

namespace detail {

inline std::vector<std::vector<Rational>> random_symmetric(Prng& rng, const RandomInstanceSpec& s) {
  const std::size_t n = s.point_count;
  std::vector<std::vector<Rational>> d(n, std::vector<Rational>(n, Rational(0)));
  const Rational width = s.upper - s.lower;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      d[i][j] = d[j][i] = s.lower + width * Rational(rng.between(0, s.denominator), s.denominator);
  return d;
}

inline std::vector<std::string> point_labels(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("p" + std::to_string(i));
  return out;
}

}  // namespace detail

/// Random finite table of the requested kind.
///
///   metric               shortest-path closure of random positive weights
///   gms_only             rejection sampling: accepted once validate_gms passes
///                        and (for 3+ points) some triangle fails
///   arbitrary_symmetric  random symmetric entries, zero diagonal
inline FiniteGMS<Rational> generate_space(const RandomInstanceSpec& s) {
  if (s.point_count < 2 || s.point_count > 64) throw MalformedInput("point_count must be in [2, 64]");
  if (s.denominator < 1) throw MalformedInput("denominator must be positive");
  if (s.upper < s.lower) throw MalformedInput("value range is empty");
  if (s.kind != TableKind::arbitrary_symmetric && !(Rational(0) < s.lower))
    throw MalformedInput("metric and gms_only tables need a positive lower bound");
  Prng rng(s.seed);
  const std::size_t n = s.point_count;

  switch (s.kind) {
    case TableKind::arbitrary_symmetric:
      return FiniteGMS<Rational>(detail::point_labels(n), detail::random_symmetric(rng, s));
    case TableKind::metric: {
      auto d = detail::random_symmetric(rng, s);
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j)
            if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
      return FiniteGMS<Rational>(detail::point_labels(n), std::move(d));
    }
    case TableKind::gms_only:
      break;
  }
  ValidationOptions vopt;
  vopt.max_witnesses = 1;
  for (std::uint64_t attempt = 0; attempt < s.max_attempts; ++attempt) {
    FiniteGMS<Rational> space(detail::point_labels(n), detail::random_symmetric(rng, s));
    const auto rep = validate_gms(space, vopt);
    if (rep.valid_gms && (n < 3 || rep.triangle_violation_count > 0)) return space;
  }
  throw GenerationExhausted("no gms_only table accepted after " + std::to_string(s.max_attempts) + " attempts");
}

/// Random DP problem: 1..max_states states, 1..max_decisions decisions,
/// h in [-5, 5], F = affine(c, r) with r in [-1, 1], lipschitz_C = |c|.
inline DPProblem random_dp_problem(std::uint64_t seed, double c, std::size_t max_states = 5,
                                   std::size_t max_decisions = 4) {
  Prng rng(seed);
  DPProblem p;
  const auto n = static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(max_states)));
  const auto m = static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(max_decisions)));
  for (std::size_t i = 0; i < n; ++i) p.states.push_back("s" + std::to_string(i));
  for (std::size_t j = 0; j < m; ++j) p.decisions.push_back("e" + std::to_string(j));
  p.h.assign(n, std::vector<double>(m));
  p.G.assign(n, std::vector<std::size_t>(m));
  std::vector<std::vector<double>> r(n, std::vector<double>(m));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < m; ++b) {
      p.h[a][b] = rng.uniform(-5, 5);
      p.G[a][b] = static_cast<std::size_t>(rng.below(n));
      r[a][b] = rng.uniform(-1, 1);
    }
  p.F = RewardRule::affine(c, std::move(r));
  p.lipschitz_C = std::abs(c);
  return p;
}

/// Plain synchronous iteration (w, z) <- (T z, T w) from (0, 0), with the max
/// over decisions written out here rather than shared with dynprog.
inline DPSolution coupled_value_iteration(const DPProblem& p, double tol = 1e-9, std::size_t max_iter = 100'000) {
  p.validate();
  if (!(p.lipschitz_C < 1)) throw HypothesisViolated("coupled value iteration needs lipschitz_C < 1");
  const std::size_t n = p.states.size(), m = p.decisions.size();
  auto apply = [&](const std::vector<double>& v) {
    std::vector<double> out(n);
    for (std::size_t a = 0; a < n; ++a) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t b = 0; b < m; ++b) {
        double cont = p.F.c * v[p.G[a][b]] + (p.F.r.empty() ? 0.0 : p.F.r[a][b]);
        if (p.F.kind == RewardRule::Kind::clipped) cont = std::min(std::max(cont, p.F.lo), p.F.hi);
        const double val = p.h[a][b] + cont;
        if (val > best) best = val;
      }
      out[a] = best;
    }
    return out;
  };
  auto gap = [&](const std::vector<double>& u, const std::vector<double>& v) {
    double g = 0;
    for (std::size_t i = 0; i < n; ++i) g = std::max(g, std::abs(u[i] - v[i]));
    return g;
  };

  std::vector<double> w(n, 0.0), z(n, 0.0);
  DPSolution sol;
  for (std::size_t it = 0; it <= max_iter; ++it) {
    const auto tz = apply(z);
    const auto tw = apply(w);
    const double residual = std::max(gap(w, tz), gap(z, tw));
    if (residual <= tol) {
      sol.w.values = w;
      sol.z.values = z;
      sol.residual = residual;
      sol.iterations = it;
      return sol;
    }
    sol.steps.push_back(gap(w, tz));
    w = tz;
    z = tw;
  }
  throw NoConvergence("coupled value iteration did not reach tol within " + std::to_string(max_iter) + " sweeps");
}

/// Every index x with A x = B x on a finite space, read straight off the tables.
inline std::vector<std::size_t> scan_coincidences(const std::vector<std::size_t>& a_table,
                                                  const std::vector<std::size_t>& b_table) {
  if (a_table.size() != b_table.size()) throw MalformedInput("map tables differ in length");
  std::vector<std::size_t> out;
  for (std::size_t x = 0; x < a_table.size(); ++x)
    if (a_table[x] == b_table[x]) out.push_back(x);
  return out;
}

/// Finite instance for the three-coefficient condition: a random table, a
/// random A with a small image, a random permutation B, and coefficients
/// a1 + a2 + a3 < 1, L >= 0 drawn in hundredths.
struct ContractionInstance {
  FiniteGMS<Rational> space;
  std::vector<std::size_t> a_table;
  std::vector<std::size_t> b_table;
  ContractionConstants<Rational> constants;
};

inline ContractionInstance random_contraction_instance(std::uint64_t seed, std::size_t max_points = 8) {
  Prng rng(seed);
  RandomInstanceSpec spec;
  spec.seed = rng.next();
  spec.point_count = static_cast<std::size_t>(rng.between(2, static_cast<std::int64_t>(max_points)));
  spec.kind = rng.below(2) == 0 ? TableKind::metric : TableKind::gms_only;
  const std::size_t n = spec.point_count;

  std::vector<std::size_t> a(n), b(n);
  const auto image = static_cast<std::size_t>(rng.between(1, std::min<std::int64_t>(2, static_cast<std::int64_t>(n))));
  std::vector<std::size_t> targets;
  for (std::size_t k = 0; k < image; ++k) targets.push_back(static_cast<std::size_t>(rng.below(n)));
  for (auto& v : a) v = targets[rng.below(targets.size())];
  for (std::size_t i = 0; i < n; ++i) b[i] = i;
  for (std::size_t i = n; i > 1; --i) std::swap(b[i - 1], b[rng.below(i)]);

  // Split a total below 1 into three hundredths.
  const std::int64_t total = rng.between(0, 99);
  const std::int64_t c1 = rng.between(0, total);
  const std::int64_t c2 = rng.between(0, total - c1);
  ContractionConstants<Rational> k;
  k.a1 = Rational(c1, 100);
  k.a2 = Rational(c2, 100);
  k.a3 = Rational(total - c1 - c2, 100);
  k.L = Rational(rng.between(0, 300), 100);
  return {generate_space(spec), std::move(a), std::move(b), k};
}

}  // namespace gmsfp::oracle
