#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "oracles/catalog.hpp"
#include "oracles/oracles.hpp"
#include "support.hpp"

using oracle::Frozen;

TEST(Oracle, SquareWellPhaseLimits) {
  EXPECT_NEAR(oracle::square_well_phase_s(1e-12, 1.0, 0.5), 0.0, 1e-11);
  // kappa_in a = pi: tan vanishes and only -k a remains (mod pi)
  const double depth = 0.5 * oracle::pi * oracle::pi - 0.5;
  const double d = oracle::square_well_phase_s(depth, 1.0, 0.5);
  EXPECT_NEAR(std::remainder(d + 1.0, oracle::pi), 0.0, 1e-12);
  for (int l = 0; l <= 3; ++l) {
    EXPECT_NEAR(oracle::square_well_phase(1e-12, 1.0, l, 0.7), 0.0, 1e-10) << l;
  }
  EXPECT_NEAR(oracle::square_well_phase(2.0, 1.0, 0, 0.5), oracle::square_well_phase_s(2.0, 1.0, 0.5), 1e-12);
  EXPECT_NEAR(oracle::hard_sphere_phase(1.0, 0, 0.5), -1.0, 1e-14);
}

TEST(Oracle, SquareWellBoundThreshold) {
  const double threshold = oracle::pi * oracle::pi / 8.0;
  EXPECT_TRUE(oracle::square_well_bound(0.99 * threshold, 1.0).empty());
  EXPECT_EQ(oracle::square_well_bound(1.01 * threshold, 1.0).size(), 1u);
}

TEST(Oracle, SquareWellBoundCountAndInfiniteLimit) {
  for (double depth : {2.0, 10.0, 30.0, 100.0}) {
    const auto count = static_cast<std::size_t>(std::floor(std::sqrt(2.0 * depth) / oracle::pi + 0.5));
    EXPECT_EQ(oracle::square_well_bound(depth, 1.0).size(), count) << depth;
  }
  const double depth = 1e6;
  const auto levels = oracle::square_well_bound(depth, 1.0);
  for (int n = 1; n <= 3; ++n) {
    const double infinite = 0.5 * (n * oracle::pi) * (n * oracle::pi) - depth;
    EXPECT_NEAR(levels[static_cast<std::size_t>(n - 1)], infinite, 1e-2 * (n * oracle::pi) * (n * oracle::pi)) << n;
  }
  EXPECT_NEAR(oracle::square_well_bound(2.0, 1.0).front(), Frozen::sw_bound, 1e-11);
}

TEST(Oracle, RectangularAction) {
  const auto box = [](double r) { return (r > 1.0 && r < 2.5) ? 3.0 : -1.0; };
  const double s = oracle::action_quadrature(box, 1.0, 1.7, 0.5, 200001);
  EXPECT_NEAR(s, 1.5 * std::sqrt(2.0 * 2.0), 1e-4);
  EXPECT_EQ(oracle::action_quadrature(box, 3.5, 1.7, 0.5), 0.0);
}

TEST(Oracle, ActionShrinksAtTop) {
  const double near = oracle::action_quadrature(oracle::f_barrier_langer, Frozen::f_barrier_top * (1.0 - 1e-6),
                                                Frozen::f_barrier_top_r, 0.05, 100001);
  EXPECT_LT(near, 1e-3);
}

TEST(Oracle, FrozenFBarrierValues) {
  const double e = 0.5 * Frozen::f_barrier_top;
  const double s = oracle::action_quadrature(oracle::f_barrier_langer, e, Frozen::f_barrier_top_r, 0.05);
  EXPECT_NEAR(s, Frozen::f_action, 1e-9);
  const double half = oracle::action_quadrature(oracle::f_barrier_langer, e, Frozen::f_barrier_top_r, 0.05, 500000);
  EXPECT_NEAR(half, s, 1e-7 * s);
  const double t = oracle::traversal_quadrature(oracle::f_barrier_langer, e, Frozen::f_barrier_top_r, 0.05);
  EXPECT_GT(t * 24.188843265857, 1.0);
  EXPECT_LT(t * 24.188843265857, 100.0);
  const auto top = oracle::dense_extrema(oracle::f_barrier_langer, 0.3, 3.0, 200001);
  ASSERT_FALSE(top.empty());
  EXPECT_NEAR(top.back().value, Frozen::f_barrier_top, 1e-6);
}

TEST(Oracle, TraversalRectangle) {
  const auto tent = [](double r) { return 2.0 - std::abs(r - 2.0); };  // excess linear at both ends
  // E = 1: turning points 1 and 3; integral of dr / sqrt(2 (1 - |r - 2|)) = 2 sqrt(2)
  EXPECT_NEAR(oracle::traversal_quadrature(tent, 1.0, 2.0, 0.5, 200001), 2.0 * std::sqrt(2.0), 1e-6);
}

TEST(Oracle, CoulombAction) {
  EXPECT_NEAR(oracle::coulomb_action(1.0, 1.0), oracle::pi / std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(std::exp(-2.0 * oracle::coulomb_action(1.0, 1.0)), 0.011762, 5e-7);
}

TEST(Oracle, DenseDipoleBracketShrinks) {
  const oracle::DenseDipole dense(20.0, 0.5, 1, 1, 2);
  EXPECT_NEAR(dense.bound_energy(), Frozen::cl_bound_energy, 1e-6);
  const auto coarse = dense.zero_bracket(oracle::cl_coarse_samples(), 1);
  const auto fine = dense.zero_bracket(oracle::cl_coarse_samples(), 10);
  ASSERT_TRUE(coarse && fine);
  EXPECT_NEAR((fine->hi - fine->lo) * 10.0, coarse->hi - coarse->lo, 1e-12);
  EXPECT_NEAR(fine->lo, Frozen::cl_bracket_lo, 1e-12);
  EXPECT_NEAR(fine->hi, Frozen::cl_bracket_hi, 1e-12);
  EXPECT_NEAR(fine->zero, Frozen::cl_cooper, 1e-9);
}

TEST(Oracle, DenseDipoleNeLikeNoZero) {
  const oracle::DenseDipole dense(6.0, 1.0, 1, 0, 2);
  std::vector<double> coarse;
  for (int i = 0; i <= 25; ++i) coarse.push_back(0.02 + 0.2 * i);
  EXPECT_FALSE(dense.zero_bracket(coarse, 1));
}

TEST(Oracle, YukawaPhaseAgreesWithClosedFormWhenScreeningIsTiny) {
  // Z -> 0 leaves the free particle.
  EXPECT_NEAR(oracle::yukawa_phase(1e-9, 1.0, 1, 0.5), 0.0, 1e-8);
}

TEST(Oracle, FrozenDelayPeak) {
  const double peak =
      oracle::delay_peak([](double e) { return oracle::yukawa_phase(112.0, 0.25, 3, e); }, 0.665, 0.682, 171);
  EXPECT_NEAR(peak, Frozen::f_tau_peak, 1e-8);
}

TEST(Oracle, CatalogCoversEveryDerivedExample) {
  const auto entries = oracle::catalog();
  std::set<std::string> names;
  for (const auto& e : entries) {
    EXPECT_TRUE(names.insert(e.name).second) << "duplicate " << e.name;
    EXPECT_FALSE(e.method.empty()) << e.name;
    EXPECT_FALSE(e.oracle_value.is_null()) << e.name;
  }
  for (const char* required :
       {"radialsolver.square_well_bound", "scattering.square_well_s", "photo.cooper_minimum", "wkb.f_barrier_action",
        "wkb.gamow", "timedelay.cooper_dip", "oracles.square_well_one_state_threshold"}) {
    EXPECT_TRUE(names.count(required)) << required;
  }
  EXPECT_EQ(entries.size(), 35u);
  for (const auto& e : entries) {
    if (e.name == "photo.cooper_minimum") EXPECT_NEAR(e.oracle_value.get<double>(), Frozen::cl_cooper, 1e-9);
    if (e.name == "radialsolver.yukawa_z2_d5_ground") {
      EXPECT_NEAR(e.oracle_value.get<double>(), Frozen::yukawa_z2_d5_ground, 1e-8);
    }
    if (e.name == "oracles.square_well_one_state_threshold") {
      EXPECT_NEAR(e.oracle_value.get<double>(), oracle::pi * oracle::pi / 8.0, 1e-6);
    }
    if (e.name == "potential.yukawa_z10_d1_l3_features") EXPECT_TRUE(e.oracle_value.empty());
    EXPECT_NO_THROW((void)e.to_json().dump());
  }
}
