#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "gmsfp/contractions.hpp"
#include "gmsfp/gms.hpp"
#include "gmsfp/mapping.hpp"

using namespace gmsfp;

namespace {

const SampledIntervalSpace kGrid(0, 1, 101);

MappingPair<double> halving() { return make_interval_pair(kGrid, CatalogMap::halving(), CatalogMap::identity()); }

ControlFunctions<double, double> phi_scale(double k, double C = 0) {
  ControlFunctions<double, double> c;
  c.phi = ControlFunction<double>::scale(k);
  c.constants.C = C;
  return c;
}

ControlFunctions<double, double> weighted(double beta) {
  ControlFunctions<double, double> c;
  c.phi = ControlFunction<double>::scale(1);
  c.psi = ControlFunction<double>::scale(0.5);
  c.beta = PairWeight<double, double>::constant(beta);
  return c;
}

// A constant at 8/15, B = identity, on the four-point space.
MappingPair<std::size_t> constant_pair(const FiniteGMS<Rational>& s) {
  return make_finite_pair(s, catalog_table(s, CatalogMap::constant_point("8/15")),
                          catalog_table(s, CatalogMap::identity()));
}

}  // namespace

TEST(RationalBound, HalvingAtOneAndZero) {
  const auto p = halving();
  const auto t = rational_terms(kGrid, p, 1.0, 0.0);
  EXPECT_DOUBLE_EQ(t[0], 1.0);
  EXPECT_DOUBLE_EQ(t[1], 0.25);  // 0.5 (0 + 1) / (1 + 1)
  EXPECT_DOUBLE_EQ(t[2], 0.0);
  EXPECT_DOUBLE_EQ(rational_bound(kGrid, p, 1.0, 0.0), 1.0);
}

TEST(RationalBound, VanishesAtACoincidencePointWithItself) {
  EXPECT_DOUBLE_EQ(rational_bound(kGrid, halving(), 0.0, 0.0), 0.0);
}

TEST(RationalBound, ExactTermsOnTheFourPointSpace) {
  const auto s = example_gms_not_metric();
  const auto p = constant_pair(s);
  const std::size_t x = s.find("5/6"), y = s.find("2/3"), c = s.find("8/15");
  // Independent evaluation straight off the table.
  const Rational dbb = s.distance(x, y), dx = s.distance(x, c), dy = s.distance(y, c);
  const Rational one(1);
  const Rational t1 = dx * (dy + one) / (one + dbb), t2 = dy * (dx + one) / (one + dbb);
  const auto t = rational_terms(s, p, x, y);
  EXPECT_EQ(t[0], dbb);
  EXPECT_EQ(t[1], t1);
  EXPECT_EQ(t[2], t2);
  // Frozen values.
  EXPECT_EQ(t[0], Rational(4, 9));
  EXPECT_EQ(t[1], Rational(17, 39));
  EXPECT_EQ(t[2], Rational(32, 39));
  EXPECT_EQ(rational_bound(s, p, x, y), Rational(32, 39));
}

TEST(RationalBound, UnknownPointThrows) {
  const auto s = example_gms_not_metric();
  EXPECT_THROW(rational_bound(s, constant_pair(s), std::size_t{0}, std::size_t{9}), UnknownPoint);
  EXPECT_THROW(cross_min(kGrid, halving(), 2.0, 0.0), UnknownPoint);
}

TEST(CrossMin, Cases) {
  const auto p = halving();
  EXPECT_DOUBLE_EQ(cross_min(kGrid, p, 0.0, 0.7), 0.0);  // 0 is a coincidence point
  EXPECT_DOUBLE_EQ(cross_min(kGrid, p, 1.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(cross_min(kGrid, p, 1.0, 0.5), 0.0);  // d(By, Ax) = |0.5 - 0.5|
  EXPECT_DOUBLE_EQ(cross_min(kGrid, p, 1.0, 0.8), 0.3);  // d(By, Ax) = |0.8 - 0.5|
}

TEST(PhiCondition, HalvingHoldsExhaustivelyOnTheGrid) {
  const auto r = check_phi_contraction(kGrid, halving(), phi_scale(0.5));
  EXPECT_TRUE(r.holds());
  EXPECT_TRUE(r.exhaustive);
  EXPECT_EQ(r.pairs_checked, 101u * 101u);
}

TEST(PhiCondition, IdentityIsViolatedOffTheDiagonal) {
  const auto p = make_interval_pair(kGrid, CatalogMap::identity(), CatalogMap::identity());
  const auto r = check_phi_contraction(kGrid, p, phi_scale(0.5));
  EXPECT_FALSE(r.holds());
  EXPECT_EQ(r.violation_count, 101u * 100u);
  for (const auto& v : r.violations) {
    EXPECT_NE(v.x, v.y);
    EXPECT_LT(v.slack, 0.0);
    EXPECT_DOUBLE_EQ(v.slack, v.rhs - v.lhs);
  }
}

TEST(PhiCondition, ConstantMapHolds) {
  const auto s = example_gms_not_metric();
  ControlFunctions<std::size_t, Rational> c;
  c.phi = ControlFunction<Rational>::saturating();
  EXPECT_TRUE(check_phi_contraction(s, constant_pair(s), c).holds());
  const auto p = make_interval_pair(kGrid, CatalogMap::constant(0.3), CatalogMap::identity());
  EXPECT_TRUE(check_phi_contraction(kGrid, p, phi_scale(0.1)).holds());
}

TEST(PhiCondition, NegativeCRejected) {
  EXPECT_THROW(check_phi_contraction(kGrid, halving(), phi_scale(0.5, -1)), CoefficientError);
}

TEST(PhiCondition, SampledScanIsSortedAndBounded) {
  const auto p = make_interval_pair(kGrid, CatalogMap::identity(), CatalogMap::identity());
  PairScan scan = PairScan::sampled(5000, 7);
  scan.max_listed = 50;
  const auto r = check_phi_contraction(kGrid, p, phi_scale(0.5), scan);
  EXPECT_FALSE(r.exhaustive);
  EXPECT_EQ(r.pairs_checked, 5000u);
  EXPECT_EQ(r.violations.size(), 50u);
  for (std::size_t i = 1; i < r.violations.size(); ++i)
    EXPECT_LE(std::make_pair(r.violations[i - 1].x, r.violations[i - 1].y),
              std::make_pair(r.violations[i].x, r.violations[i].y));
}

TEST(LinearCondition, Cases) {
  ControlFunctions<double, double> c;
  c.constants.a1 = 0.5;
  EXPECT_TRUE(check_linear_contraction(kGrid, halving(), c).holds());

  c.constants.a1 = c.constants.a2 = c.constants.a3 = 0.4;
  EXPECT_THROW(check_linear_contraction(kGrid, halving(), c), CoefficientError);
  c.constants = {};
  c.constants.a1 = -0.1;
  EXPECT_THROW(check_linear_contraction(kGrid, halving(), c), CoefficientError);

  const FiniteGMS<Rational> two({"a", "b"}, {{Rational(0), Rational(1)}, {Rational(1), Rational(0)}});
  const auto id = make_finite_pair(two, {0, 1}, {0, 1});
  ControlFunctions<std::size_t, Rational> k;
  k.constants.a1 = Rational(9, 10);
  const auto r = check_linear_contraction(two, id, k);
  EXPECT_FALSE(r.holds());
  EXPECT_EQ(r.violation_count, 2u);
  EXPECT_EQ(r.violations[0].lhs, Rational(1));
  EXPECT_EQ(r.violations[0].rhs, Rational(9, 10));
}

TEST(WeightedCondition, Cases) {
  EXPECT_TRUE(check_weighted_contraction(kGrid, halving(), weighted(1)).holds());

  auto all = PairScan::exhaustive();
  all.max_listed = 101 * 101;
  const auto r = check_weighted_contraction(kGrid, halving(), weighted(3), all);
  EXPECT_FALSE(r.holds());
  EXPECT_EQ(r.violations.size(), r.violation_count);
  const auto it = std::find_if(r.violations.begin(), r.violations.end(),
                               [](const auto& v) { return v.x == 1.0 && v.y == 0.0; });
  ASSERT_NE(it, r.violations.end());
  EXPECT_DOUBLE_EQ(it->lhs, 1.5);
  EXPECT_DOUBLE_EQ(it->rhs, 0.5);
  for (const auto& v : r.violations) EXPECT_FALSE(v.x == v.y && v.x == 0.0);

  ControlFunctions<double, double> missing;
  EXPECT_THROW(check_weighted_contraction(kGrid, halving(), missing), MalformedInput);
}

TEST(Admissibility, Cases) {
  const auto p = halving();
  EXPECT_TRUE(check_admissible(kGrid, p, PairWeight<double, double>::constant(1)).holds());
  EXPECT_TRUE(check_admissible(kGrid, p, PairWeight<double, double>::constant(2)).holds());

  // beta(B 1, B 0.5) = 2 but beta(A 1, A 0.5) = beta(0.5, 0.25) = 0.5.
  const auto beta =
      PairWeight<double, double>::constant(1).with_override(1.0, 0.5, 2.0).with_override(0.5, 0.25, 0.5);
  const auto r = check_admissible(kGrid, p, beta);
  EXPECT_FALSE(r.holds());
  ASSERT_EQ(r.violation_count, 1u);
  EXPECT_EQ(r.violations[0].x, 1.0);
  EXPECT_EQ(r.violations[0].y, 0.5);
  EXPECT_EQ(r.violations[0].lhs, 2.0);
  EXPECT_EQ(r.violations[0].rhs, 0.5);
}

TEST(OrbitRegularity, Cases) {
  SequenceRecord<double> orbit;
  for (int n = 0; n < 8; ++n) orbit.points.push_back(std::ldexp(1.0, -n));
  EXPECT_TRUE(check_orbit_regularity(kGrid, orbit, 0.0, PairWeight<double, double>::constant(1)).holds());

  const auto dented = PairWeight<double, double>::constant(1).with_override(0.5, 0.25, 0.5);
  const auto r = check_orbit_regularity(kGrid, orbit, 0.0, dented);
  EXPECT_FALSE(r.holds());
  EXPECT_EQ(r.violation_count, 1u);
  EXPECT_LT(r.violations[0].slack, 0.0);

  EXPECT_TRUE(check_orbit_regularity(kGrid, orbit, 0.0, PairWeight<double, double>::order(1, 0)).holds());
  // Increasing orbit under the same rule fails every pair.
  SequenceRecord<double> rising{{0.1, 0.2, 0.3}, std::nullopt};
  EXPECT_FALSE(check_orbit_regularity(kGrid, rising, 1.0, PairWeight<double, double>::order(1, 0)).holds());
}

TEST(CoincidenceLinking, FlagsUnlinkedCoincidences) {
  const auto p = make_interval_pair(SampledIntervalSpace(0, 1, 5), CatalogMap::identity(), CatalogMap::identity());
  const SampledIntervalSpace s(0, 1, 5);
  EXPECT_TRUE(check_coincidence_linking(s, p, PairWeight<double, double>::constant(1)).holds());
  const auto r = check_coincidence_linking(s, p, PairWeight<double, double>::constant(0.5));
  EXPECT_EQ(r.violation_count, 25u);
}

TEST(Controls, Validation) {
  using F = ControlFunction<double>;
  EXPECT_TRUE(validate_control(F::scale(0.5), ControlRole::phi_contraction).ok);
  EXPECT_FALSE(validate_control(F::scale(1), ControlRole::phi_contraction).ok);
  EXPECT_TRUE(validate_control(F::scale(1), ControlRole::phi_weighted).ok);
  EXPECT_TRUE(validate_control(F::saturating(), ControlRole::phi_contraction).ok);
  EXPECT_TRUE(validate_control(F::capped(0.9, 2), ControlRole::phi_contraction).ok);
  EXPECT_FALSE(validate_control(F::scale(0), ControlRole::psi).ok);
  EXPECT_TRUE(validate_control(F::table({0, 1, 10}, {0, 0.5, 2}), ControlRole::phi_contraction).ok);
  const auto offset = validate_control(F::table({0, 1}, {1, 1}), ControlRole::phi_weighted);
  EXPECT_FALSE(offset.ok);
  EXPECT_FALSE(offset.issues.empty());
  EXPECT_THROW(F::table({0, 1}, {1, 0}), MalformedInput);
  EXPECT_THROW(F::table({1, 2}, {0, 1}), MalformedInput);
  EXPECT_THROW(F::scale(-1), MalformedInput);
}

TEST(Controls, Evaluation) {
  using F = ControlFunction<Rational>;
  EXPECT_EQ(F::saturating()(Rational(1)), Rational(1, 2));
  EXPECT_EQ(F::capped(Rational(1, 2), Rational(1))(Rational(4)), Rational(1));
  const auto t = F::table({Rational(0), Rational(2)}, {Rational(0), Rational(1)});
  EXPECT_EQ(t(Rational(1)), Rational(1, 2));
  EXPECT_EQ(t(Rational(5)), Rational(1));
}

TEST(RangeInclusion, HalvingFitsAndShiftDoesNot) {
  EXPECT_TRUE(check_range_inclusion(kGrid, halving()).holds);
  const auto shifted = make_interval_pair(kGrid, CatalogMap::affine(1, 0.5), CatalogMap::identity());
  const auto r = check_range_inclusion(kGrid, shifted);
  EXPECT_FALSE(r.holds);
  EXPECT_EQ(r.failures.front(), kGrid.point(51));
}

TEST(FinitePair, SelectorRules) {
  const auto s = example_gms_not_metric();
  EXPECT_THROW(make_finite_pair(s, {0, 0, 0, 0}, {0, 0, 1, 2}), MalformedInput);  // B not injective
  const auto p = make_finite_pair(s, {0, 0, 0, 0}, {0, 0, 1, 2}, std::map<std::size_t, std::size_t>{{0, 1}});
  EXPECT_EQ(*p.b_selector(0, 3), 1u);
  EXPECT_FALSE(p.b_selector(3, 0).has_value());
  EXPECT_THROW(make_finite_pair(s, {0, 0, 0, 0}, {0, 0, 1, 2}, std::map<std::size_t, std::size_t>{{1, 0}}),
               MalformedInput);
  EXPECT_THROW(make_finite_pair(s, {0, 0, 0}, {0, 1, 2, 3}), MalformedInput);
  EXPECT_THROW(make_finite_pair(s, {0, 0, 0, 7}, {0, 1, 2, 3}), MalformedInput);
}
