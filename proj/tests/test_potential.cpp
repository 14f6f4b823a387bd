#include <gtest/gtest.h>

#include <cmath>

#include "oracles/oracles.hpp"
#include "partialwave/partialwave.hpp"

namespace pw = partialwave;

TEST(Potential, SquareWellInsideIsMinusDepth) {
  EXPECT_EQ(pw::eval_potential(pw::PotentialSpec::square_well(1.0, 1.0), 0.5).hartree, -1.0);
  EXPECT_EQ(pw::eval_potential(pw::PotentialSpec::square_well(1.0, 1.0), 1.5).hartree, 0.0);
}

TEST(Potential, ZeroIsZero) { EXPECT_EQ(pw::eval_potential(pw::PotentialSpec::zero(), 3.7).hartree, 0.0); }

TEST(Potential, YukawaFormula) {
  EXPECT_NEAR(pw::eval_potential(pw::PotentialSpec::yukawa(2.0, 1.0), 1.0).hartree, -2.0 * std::exp(-1.0), 1e-15);
  EXPECT_NEAR(pw::eval_potential(pw::PotentialSpec::yukawa(2.0, 1.0), 1.0).hartree, -0.7357589, 1e-7);
}

TEST(Potential, HardSphereInteriorIsForbidden) {
  const auto hs = pw::PotentialSpec::hard_sphere(1.0);
  EXPECT_TRUE(pw::eval_potential(hs, 0.5).forbidden);
  EXPECT_FALSE(pw::eval_potential(hs, 1.5).forbidden);
  EXPECT_EQ(pw::eval_potential(hs, 1.5).hartree, 0.0);
}

TEST(Potential, RejectsNonPositiveRadius) {
  EXPECT_THROW(pw::eval_potential(pw::PotentialSpec::zero(), 0.0), pw::PreconditionError);
  EXPECT_THROW(pw::eval_potential(pw::PotentialSpec::zero(), -1.0), pw::PreconditionError);
}

TEST(Potential, RejectsBadParameters) {
  EXPECT_THROW(pw::PotentialSpec::square_well(-1.0, 1.0), pw::PreconditionError);
  EXPECT_THROW(pw::PotentialSpec::square_well(1.0, 0.0), pw::PreconditionError);
  EXPECT_THROW(pw::PotentialSpec::hard_sphere(0.0), pw::PreconditionError);
  EXPECT_THROW(pw::PotentialSpec::yukawa(0.0, 1.0), pw::PreconditionError);
  EXPECT_THROW(pw::PotentialSpec::yukawa(1.0, -1.0), pw::PreconditionError);
}

TEST(Potential, YukawaRangeCertifiesShortRange) {
  for (double z : {1.0, 20.0, 112.0}) {
    for (double d : {0.25, 1.0, 5.0}) {
      const auto spec = pw::PotentialSpec::yukawa(z, d);
      const double r = spec.range_radius();
      EXPECT_LE(std::abs(pw::eval_potential(spec, r).hartree) * r * r, pw::range_epsilon * (1.0 + 1e-9));
    }
  }
}

TEST(Potential, TabulatedValidation) {
  EXPECT_THROW(pw::PotentialSpec::tabulated({1.0, 2.0}, {0.0, 0.0}), pw::PreconditionError);
  EXPECT_THROW(pw::PotentialSpec::tabulated({1.0, 1.0, 2.0, 3.0}, {-1.0, 0.0, 0.0, 0.0}), pw::PreconditionError);
  EXPECT_THROW(pw::PotentialSpec::tabulated({0.0, 1.0, 2.0, 3.0}, {-1.0, 0.0, 0.0, 0.0}), pw::PreconditionError);
  // last three points not short-ranged
  EXPECT_THROW(pw::PotentialSpec::tabulated({1.0, 2.0, 3.0, 4.0}, {-1.0, -1.0, -1.0, -1.0}), pw::PreconditionError);
}

TEST(Potential, TabulatedMonotoneInterpolation) {
  // Step-like data: monotone cubic must not overshoot below -1 or above 0.
  const auto spec = pw::PotentialSpec::tabulated({0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5}, {-1, -1, -1, 0, 0, 0, 0});
  for (double r = 0.5; r <= 3.5; r += 0.01) {
    const double v = pw::eval_potential(spec, r).hartree;
    EXPECT_GE(v, -1.0 - 1e-14);
    EXPECT_LE(v, 1e-14);
  }
  EXPECT_EQ(pw::eval_potential(spec, 10.0).hartree, 0.0);
  EXPECT_THROW(pw::eval_potential(spec, 0.25), pw::PreconditionError);
}

TEST(Potential, ClassicalTurningPoint) {
  EXPECT_DOUBLE_EQ(pw::classical_turning_point(0, 0.125), 1.0);
  EXPECT_DOUBLE_EQ(pw::classical_turning_point(2, 0.5), 2.5);
  EXPECT_NEAR(pw::classical_turning_point(1, 4.0 * 0.3), 0.5 * pw::classical_turning_point(1, 0.3), 1e-15);
  for (double s : {0.5, 2.0, 7.0}) {
    EXPECT_NEAR(pw::classical_turning_point(3, s * s * 0.2), pw::classical_turning_point(3, 0.2) / s, 1e-14);
  }
  EXPECT_THROW(pw::classical_turning_point(0, 0.0), pw::PreconditionError);
}

namespace {

pw::RadialGrid grid_for(const pw::PotentialSpec& spec, double r_max = 30.0, int n = 20000) {
  pw::GridSpec g;
  g.r_max = r_max;
  g.n_points = n;
  return pw::RadialGrid(g, spec);
}

}  // namespace

TEST(EffectiveCurve, ZeroPotentialIsPureCentrifugal) {
  const auto spec = pw::PotentialSpec::zero();
  const auto curve = pw::effective_curve(spec, 2, grid_for(spec));
  EXPECT_FALSE(curve.inner_minimum);
  EXPECT_FALSE(curve.barrier);
  for (std::size_t i = 1; i < curve.r.size(); ++i) {
    EXPECT_LT(curve.v_eff[i], curve.v_eff[i - 1]);
    EXPECT_NEAR(curve.v_eff[i], 3.0 / (curve.r[i] * curve.r[i]), 1e-12 * curve.v_eff[i]);
  }
}

TEST(EffectiveCurve, SWaveSquareWellHasNoBarrier) {
  const auto spec = pw::PotentialSpec::square_well(5.0, 1.0);
  const auto curve = pw::effective_curve(spec, 0, grid_for(spec));
  EXPECT_FALSE(curve.barrier);
  for (double v : curve.v_eff) EXPECT_LE(v, 0.0);
}

TEST(EffectiveCurve, EllZeroEqualsBarePotential) {
  const auto spec = pw::PotentialSpec::yukawa(3.0, 2.0);
  const auto curve = pw::effective_curve(spec, 0, grid_for(spec));
  for (std::size_t i = 0; i < curve.r.size(); i += 97) {
    EXPECT_EQ(curve.v_eff[i], pw::eval_potential(spec, curve.r[i]).hartree);
  }
}

TEST(EffectiveCurve, IncreasingInEll) {
  const auto spec = pw::PotentialSpec::yukawa(3.0, 2.0);
  const auto grid = grid_for(spec);
  const auto c1 = pw::effective_curve(spec, 1, grid);
  const auto c2 = pw::effective_curve(spec, 2, grid);
  for (std::size_t i = 0; i < c1.r.size(); i += 53) EXPECT_GT(c2.v_eff[i], c1.v_eff[i]);
}

// The screened l = 3 example with Z = 10, d = 1 has a monotone curve: the
// dense scan finds no extremum and the library must not invent one.
TEST(EffectiveCurve, WeakYukawaFWaveHasNoFeatures) {
  const auto spec = pw::PotentialSpec::yukawa(10.0, 1.0);
  const auto curve = pw::effective_curve(spec, 3, grid_for(spec));
  const auto dense = oracle::dense_extrema(
      [](double r) { return -10.0 * std::exp(-r) / r + 6.0 / (r * r); }, 0.01, 30.0, 400000);
  EXPECT_TRUE(dense.empty());
  EXPECT_FALSE(curve.inner_minimum);
  EXPECT_FALSE(curve.barrier);
}

TEST(EffectiveCurve, TwoValleyFeaturesMatchDenseScan) {
  const auto spec = pw::PotentialSpec::yukawa(112.0, 0.25);
  const auto curve = pw::effective_curve(spec, 3, grid_for(spec));
  ASSERT_TRUE(curve.inner_minimum);
  ASSERT_TRUE(curve.barrier);
  EXPECT_GT(curve.barrier->value, 0.0);
  EXPECT_LT(curve.inner_minimum->r, curve.barrier->r);
  const auto dense = oracle::dense_extrema(
      [](double r) { return -112.0 * std::exp(-r / 0.25) / r + 6.0 / (r * r); }, 0.01, 10.0, 2000000);
  ASSERT_EQ(dense.size(), 2u);
  EXPECT_NEAR(curve.inner_minimum->r, dense[0].r, 1e-5);
  EXPECT_NEAR(curve.inner_minimum->value, dense[0].value, 1e-6 * std::abs(dense[0].value));
  EXPECT_NEAR(curve.barrier->r, dense[1].r, 1e-5);
  EXPECT_NEAR(curve.barrier->value, dense[1].value, 1e-8);
  // barrier sample dominates its neighbours
  const auto it = std::lower_bound(curve.r.begin(), curve.r.end(), curve.barrier->r);
  const auto i = static_cast<std::size_t>(it - curve.r.begin());
  EXPECT_GE(curve.barrier->value, curve.v_eff[i - 1]);
  EXPECT_GE(curve.barrier->value, curve.v_eff[i]);
}

TEST(EffectiveCurve, RejectsNegativeEll) {
  const auto spec = pw::PotentialSpec::zero();
  EXPECT_THROW(pw::effective_curve(spec, -1, grid_for(spec)), pw::PreconditionError);
}
