#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "gmsfp/contractions.hpp"
#include "gmsfp/dynprog.hpp"
#include "gmsfp/gms.hpp"
#include "gmsfp/iteration.hpp"
#include "gmsfp/oracle.hpp"

using namespace gmsfp;

namespace {

using Ctrl = ControlFunctions<std::size_t, Rational>;

Ctrl linear_ctrl(const ContractionConstants<Rational>& k) {
  Ctrl c;
  c.constants = k;
  return c;
}

std::vector<std::size_t> identity_table(std::size_t n) {
  std::vector<std::size_t> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = i;
  return t;
}

BoundedFunctional random_functional(Prng& rng, std::size_t n, double span) {
  BoundedFunctional f;
  for (std::size_t i = 0; i < n; ++i) f.values.push_back(rng.uniform(-span, span));
  return f;
}

/// Instances whose three-coefficient condition holds, drawn from seed 1 up.
std::vector<oracle::ContractionInstance> linear_instances(std::size_t want) {
  std::vector<oracle::ContractionInstance> out;
  for (std::uint64_t seed = 1; out.size() < want && seed < 20'000; ++seed) {
    auto inst = oracle::random_contraction_instance(seed);
    const auto pair = make_finite_pair(inst.space, inst.a_table, inst.b_table);
    if (check_linear_contraction(inst.space, pair, linear_ctrl(inst.constants)).holds()) out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace

TEST(RationalBound, DominatesAndIsSymmetric) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const auto inst = oracle::random_contraction_instance(seed);
    const auto& s = inst.space;
    const auto pair = make_finite_pair(s, inst.a_table, inst.b_table);
    for (std::size_t x = 0; x < s.size(); ++x)
      for (std::size_t y = 0; y < s.size(); ++y) {
        const auto t = rational_terms(s, pair, x, y);
        const auto u = rational_terms(s, pair, y, x);
        EXPECT_GE(rational_bound(s, pair, x, y), s.distance(pair.B(x), pair.B(y)));
        EXPECT_EQ(t[0], u[0]);
        EXPECT_EQ(t[1], u[2]);
        EXPECT_EQ(t[2], u[1]);
        EXPECT_EQ(rational_bound(s, pair, x, y), rational_bound(s, pair, y, x));
        EXPECT_EQ(cross_min(s, pair, x, y), cross_min(s, pair, y, x));
      }
  }
}

TEST(RationalBound, CrossMinVanishesAtCoincidences) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const auto inst = oracle::random_contraction_instance(seed);
    const auto pair = make_finite_pair(inst.space, inst.a_table, inst.b_table);
    for (std::size_t x : oracle::scan_coincidences(inst.a_table, inst.b_table))
      for (std::size_t y = 0; y < inst.space.size(); ++y) EXPECT_EQ(cross_min(inst.space, pair, x, y), Rational(0));
  }
}

TEST(RationalBound, IdentityBMatchesTheDirectFormula) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto inst = oracle::random_contraction_instance(seed);
    const auto& s = inst.space;
    const auto pair = make_finite_pair(s, inst.a_table, identity_table(s.size()));
    for (std::size_t x = 0; x < s.size(); ++x)
      for (std::size_t y = 0; y < s.size(); ++y) {
        const Rational one(1), dxy = s.distance(x, y);
        const Rational dx = s.distance(x, inst.a_table[x]), dy = s.distance(y, inst.a_table[y]);
        const Rational direct = std::max({dxy, dx * (one + dy) / (one + dxy), dy * (one + dx) / (one + dxy)});
        EXPECT_EQ(rational_bound(s, pair, x, y), direct);
      }
  }
}

TEST(PhiCondition, MonotoneInC) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const auto inst = oracle::random_contraction_instance(seed);
    const auto pair = make_finite_pair(inst.space, inst.a_table, inst.b_table);
    Ctrl c;
    c.constants.C = inst.constants.L;
    if (!check_phi_contraction(inst.space, pair, c).holds()) continue;
    c.constants.C = c.constants.C + Rational(1);
    EXPECT_TRUE(check_phi_contraction(inst.space, pair, c).holds()) << seed;
  }
}

TEST(LinearCondition, ImpliesThePhiCondition) {
  const auto insts = linear_instances(50);
  ASSERT_EQ(insts.size(), 50u);
  for (const auto& inst : insts) {
    const auto pair = make_finite_pair(inst.space, inst.a_table, inst.b_table);
    const auto& k = inst.constants;
    Ctrl c;
    c.phi = ControlFunction<Rational>::scale(k.a1 + k.a2 + k.a3);
    c.constants.C = k.L;
    EXPECT_TRUE(check_phi_contraction(inst.space, pair, c).holds());
  }
}

TEST(Iteration, TraceIsConsistent) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const auto inst = oracle::random_contraction_instance(seed);
    const auto& s = inst.space;
    const auto pair = make_finite_pair(s, inst.a_table, inst.b_table);
    IterationOptions<std::size_t> opt;
    opt.tol = 0;
    opt.max_iter = 50;
    const auto t = jungck_iterate(s, pair, 0, opt);
    ASSERT_EQ(t.x.size(), t.z.size() + 1);  // the pre-image of the last z is kept
    for (std::size_t n = 0; n < t.z.size(); ++n) EXPECT_EQ(t.z[n], pair.A(t.x[n]));
    for (std::size_t n = 0; n + 1 < t.x.size(); ++n) EXPECT_EQ(pair.B(t.x[n + 1]), t.z[n]);
    ASSERT_EQ(t.step_dist.size() + 1, t.z.size());
    for (std::size_t k = 0; k < t.step_dist.size(); ++k) EXPECT_EQ(t.step_dist[k], s.distance(t.z[k], t.z[k + 1]));
    for (std::size_t k = 0; k < t.skip_dist.size(); ++k) EXPECT_EQ(t.skip_dist[k], s.distance(t.z[k], t.z[k + 2]));
  }
}

TEST(Iteration, StepsShrinkWhenTheConditionHolds) {
  for (const auto& inst : linear_instances(50)) {
    const auto pair = make_finite_pair(inst.space, inst.a_table, inst.b_table);
    IterationOptions<std::size_t> opt;
    opt.tol = 0;
    for (std::size_t x0 = 0; x0 < inst.space.size(); ++x0) {
      const auto t = jungck_iterate(inst.space, pair, x0, opt);
      EXPECT_EQ(t.status, IterationStatus::coincidence_found_early);
      for (std::size_t k = 1; k < t.step_dist.size(); ++k)
        if (t.step_dist[k - 1] > Rational(0)) {
          EXPECT_LT(t.step_dist[k], t.step_dist[k - 1]);
        }
    }
  }
}

TEST(Iteration, UniqueValueIndependentOfTheStart) {
  for (const auto& inst : linear_instances(50)) {
    const auto& s = inst.space;
    const auto pair = make_finite_pair(s, inst.a_table, inst.b_table);
    const auto ctrl = linear_ctrl(inst.constants);
    CoincidenceOptions<std::size_t> opt;
    opt.condition = ContractionKind::linear;
    opt.iteration.tol = 0;
    const auto first = find_coincidence(s, pair, ctrl, 0, opt);
    EXPECT_EQ(first.unique_within_space, true);
    EXPECT_EQ(first.residual, Rational(0));
    for (std::size_t p : bruteforce_coincidences(s, pair, 0)) EXPECT_EQ(pair.A(p), first.value);
    for (std::size_t x0 = 1; x0 < s.size(); ++x0) EXPECT_EQ(find_coincidence(s, pair, ctrl, x0, opt).value, first.value);
  }
}

TEST(Iteration, IdentityBFindsTheUniqueFixedPoint) {
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 400; ++seed) {
    const auto inst = oracle::random_contraction_instance(seed);
    const auto& s = inst.space;
    const auto ident = identity_table(s.size());
    const auto pair = make_finite_pair(s, inst.a_table, ident);
    Ctrl c;
    c.phi = ControlFunction<Rational>::scale(Rational(9, 10));
    c.constants.C = inst.constants.L;
    if (!check_phi_contraction(s, pair, c).holds()) continue;
    ++checked;
    CoincidenceOptions<std::size_t> opt;
    opt.iteration.tol = 0;
    const auto r = find_coincidence(s, pair, c, 0, opt);
    const auto fixed = oracle::scan_coincidences(inst.a_table, ident);
    ASSERT_EQ(fixed.size(), 1u) << seed;
    EXPECT_EQ(r.value, fixed[0]);
    EXPECT_TRUE(r.is_common_fixed_point);
  }
  EXPECT_GT(checked, 20);
}

TEST(DynProg, SupGapNeverExceedsSupDistance) {
  Prng rng(2024);
  for (int k = 0; k < 10'000; ++k) {
    const auto n = static_cast<std::size_t>(rng.between(1, 8));
    const auto f1 = random_functional(rng, n, 100), f2 = random_functional(rng, n, 100);
    const auto [gap, dist] = sup_difference_gap(f1, f2);
    EXPECT_LE(gap, dist);
    EXPECT_DOUBLE_EQ(dist, sup_norm_distance(f1, f2));
  }
}

TEST(DynProg, BellmanInheritsTheLipschitzConstant) {
  Prng rng(77);
  for (std::uint64_t seed = 1; seed <= 150; ++seed) {
    const double c = (seed % 3 == 0) ? 0.3 : (seed % 3 == 1 ? 0.5 : 0.9);
    const auto p = oracle::random_dp_problem(seed, c);
    for (int k = 0; k < 10; ++k) {
      const auto u = random_functional(rng, p.state_count(), 50), v = random_functional(rng, p.state_count(), 50);
      EXPECT_LE(sup_norm_distance(bellman(p, u), bellman(p, v)), c * sup_norm_distance(u, v) + 1e-12);
    }
  }
}

TEST(DynProg, DoubleStepStaysWithinItsBound) {
  Prng rng(78);
  for (std::uint64_t seed = 1; seed <= 150; ++seed) {
    const auto p = oracle::random_dp_problem(seed, seed % 2 == 0 ? 0.9 : 1.0);
    for (int k = 0; k < 10; ++k) {
      const auto w = random_functional(rng, p.state_count(), 1000);
      BoundedFunctional ow;
      ASSERT_NO_THROW(ow = bellman_twice(p, w));
      EXPECT_LE(ow.sup_abs(), double_step_bound(p, w));
    }
  }
}

TEST(DynProg, SolutionsSatisfyTheSystem) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const double c = (seed % 3 == 0) ? 0.3 : (seed % 3 == 1 ? 0.5 : 0.9);
    const auto p = oracle::random_dp_problem(seed, c);
    const auto sol = solve_system(p);
    EXPECT_LE(sol.residual, 1e-9);
    EXPECT_LE(system_residual(p, sol.w, sol.z), 1e-9);
    // Both equations share h, F, G, so w = z at the fixed point.
    EXPECT_LE(sup_norm_distance(sol.w, sol.z), 10 * 1e-9);
  }
}

TEST(DynProg, RestartsReachTheSamePair) {
  const double tol = 1e-9;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const double c = (seed % 3 == 0) ? 0.3 : (seed % 3 == 1 ? 0.5 : 0.9);
    const auto p = oracle::random_dp_problem(seed, c);
    Prng rng(seed);
    const auto base = solve_system(p);
    // Residual <= tol places each solve within tol / (1 - c^2) of the fixed point.
    const double bound = 2 * tol / (1 - c * c);
    for (const auto& w0 : {BoundedFunctional::constant(p.state_count(), 100), random_functional(rng, p.state_count(), 10)}) {
      DPSolveOptions opt;
      opt.w0 = w0;
      const auto other = solve_system(p, opt);
      EXPECT_LE(sup_norm_distance(other.w, base.w), bound) << seed;
      EXPECT_LE(sup_norm_distance(other.z, base.z), bound) << seed;
      if (c * c <= 0.8) {
        EXPECT_LE(sup_norm_distance(other.w, base.w), 10 * tol) << seed;
      }
    }
  }
}

TEST(DynProg, OracleAgreesWithTheEngine) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const double c = (seed % 3 == 0) ? 0.3 : (seed % 3 == 1 ? 0.5 : 0.9);
    const auto p = oracle::random_dp_problem(seed, c);
    const auto sol = solve_system(p);
    const auto ref = oracle::coupled_value_iteration(p, 1e-12);
    EXPECT_LE(sup_norm_distance(sol.w, ref.w), 1e-8) << seed;
    EXPECT_LE(sup_norm_distance(sol.z, ref.z), 1e-8) << seed;
  }
}

TEST(Generator, TablesMeetTheirAxioms) {
  for (std::uint64_t seed = 1; seed <= 150; ++seed) {
    oracle::RandomInstanceSpec spec;
    spec.seed = seed;
    spec.point_count = 3 + seed % 6;
    spec.kind = seed % 2 == 0 ? oracle::TableKind::metric : oracle::TableKind::gms_only;
    const auto s = oracle::generate_space(spec);
    const std::size_t n = s.size();
    bool triangle = true, quad = true;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        EXPECT_EQ(s.distance(a, b), s.distance(b, a));
        EXPECT_EQ(s.distance(a, b) == Rational(0), a == b);
        for (std::size_t c = 0; c < n; ++c) {
          if (s.distance(a, c) + s.distance(c, b) < s.distance(a, b)) triangle = false;
          for (std::size_t d = 0; d < n; ++d) {
            const bool distinct = a != b && a != c && a != d && b != c && b != d && c != d;
            if (distinct && s.distance(a, c) + s.distance(c, d) + s.distance(d, b) < s.distance(a, b)) quad = false;
          }
        }
      }
    EXPECT_TRUE(quad) << seed;
    EXPECT_EQ(triangle, spec.kind == oracle::TableKind::metric) << seed;
  }
}
