#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles/oracles.hpp"
#include "partialwave/partialwave.hpp"
#include "support.hpp"

namespace pw = partialwave;
using testsupport::linspace;
using testsupport::logspace;

namespace {

pw::RadialGrid make_grid(const pw::PotentialSpec& spec, double r_max = 50.0, int n = 20000) {
  pw::GridSpec g;
  g.r_max = r_max;
  g.n_points = n;
  return pw::RadialGrid(g, spec);
}

double phase(const pw::PotentialSpec& spec, int ell, double e) {
  return pw::phase_shift(spec, ell, e, make_grid(spec).extended_to(pw::required_r_max(spec, e)));
}

double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}

}  // namespace

TEST(PhaseShift, ZeroPotential) {
  const auto spec = pw::PotentialSpec::zero();
  const auto grid = make_grid(spec, 50.0, 40000);  // Numerov step error is ~1e-10 at E = 10 on 20000 points
  for (int ell = 0; ell <= 4; ++ell) {
    for (double e : {0.01, 0.5, 10.0}) EXPECT_LT(std::abs(pw::phase_shift(spec, ell, e, grid.extended_to(200))), 1e-10);
  }
  const auto curve = pw::phase_scan(spec, 2, linspace(0.1, 3.0, 30), grid);
  for (double d : curve.deltas) EXPECT_LT(std::abs(d), 1e-10);
}

TEST(PhaseShift, HardSphereSWave) {
  const auto spec = pw::PotentialSpec::hard_sphere(1.0);
  EXPECT_NEAR(phase(spec, 0, 0.5), -1.0, 1e-8);
  for (double e : logspace(0.01, 1.0, 15)) EXPECT_NEAR(phase(spec, 0, e), -std::sqrt(2.0 * e), 1e-8) << e;
}

TEST(PhaseShift, HardSphereHigherWaves) {
  const auto spec = pw::PotentialSpec::hard_sphere(1.0);
  for (int ell = 1; ell <= 3; ++ell) {
    for (double e : {0.05, 0.5, 3.0}) {
      EXPECT_NEAR(phase(spec, ell, e), oracle::hard_sphere_phase(1.0, ell, e), 1e-7)
          << "l = " << ell << " E = " << e;
    }
  }
}

TEST(PhaseShift, SquareWellClosedForm) {
  const auto spec = pw::PotentialSpec::square_well(2.0, 1.0);
  EXPECT_NEAR(phase(spec, 0, 0.5), pw::principal_phase(oracle::square_well_phase_s(2.0, 1.0, 0.5)), 1e-7);
  for (double e : logspace(0.005, 0.5, 21)) {
    EXPECT_NEAR(phase(spec, 0, e), pw::principal_phase(oracle::square_well_phase_s(2.0, 1.0, e)), 1e-7) << e;
  }
  for (int ell = 1; ell <= 2; ++ell) {
    for (double e : {0.05, 0.5, 2.0}) {
      EXPECT_NEAR(phase(spec, ell, e), oracle::square_well_phase(2.0, 1.0, ell, e), 1e-7);
    }
  }
}

TEST(PhaseShift, SignConvention) {
  const auto hs = pw::PotentialSpec::hard_sphere(1.0);
  EXPECT_LT(phase(hs, 0, 0.01), 0.0);
  // shallow well, no bound state: attraction pulls the phase up
  const auto sw = pw::PotentialSpec::square_well(0.5, 1.0);
  const double d = phase(sw, 0, 0.01);
  EXPECT_GT(d, 0.0);
  EXPECT_NEAR(d, oracle::square_well_phase_s(0.5, 1.0, 0.01), 1e-7);
}

TEST(PhaseShift, MatchingRadiusIndependence) {
  const auto spec = pw::PotentialSpec::yukawa(2.0, 1.0);
  const auto grid = make_grid(spec, 80.0, 40000);
  const pw::RadialProblem problem(spec, grid);
  for (double e : {0.1, 0.7, 3.0}) {
    const double wl = 2.0 * pw::pi / std::sqrt(2.0 * e);
    const double rm = spec.range_radius() + wl;
    EXPECT_LT(std::abs(pw::phase_shift(problem, 1, e, rm) - pw::phase_shift(problem, 1, e, rm + wl)), 1e-8);
  }
}

TEST(PhaseShift, Preconditions) {
  const auto spec = pw::PotentialSpec::square_well(2.0, 1.0);
  const auto grid = make_grid(spec, 5.0, 2000);
  EXPECT_THROW(pw::phase_shift(spec, 0, 0.0, grid), pw::PreconditionError);
  EXPECT_THROW(pw::phase_shift(spec, 0, 0.001, grid), pw::PreconditionError);  // r_max too short
  EXPECT_THROW(pw::phase_shift(spec, -1, 1.0, grid), pw::PreconditionError);
  const pw::RadialProblem problem(spec, make_grid(spec));
  EXPECT_THROW(pw::phase_shift(problem, 0, 1.0, 0.5), pw::PreconditionError);
}

TEST(PhaseShift, WignerThresholdLaw) {
  // Per-wave decades where |delta| stays well above the ~1e-9 round-off floor.
  struct Case {
    int ell;
    double depth;
    double k0;
  };
  for (const Case& c : {Case{0, 1.0, 1e-3}, Case{1, 1.0, 0.02}, Case{2, 9.8, 0.02}}) {
    const auto spec = pw::PotentialSpec::square_well(c.depth, 1.0);
    const auto grid = make_grid(spec).extended_to(pw::required_r_max(spec, 0.5 * c.k0 * c.k0));
    std::vector<double> lk;
    std::vector<double> ld;
    for (double k : logspace(c.k0, 10.0 * c.k0, 11)) {
      lk.push_back(std::log(k));
      ld.push_back(std::log(std::abs(pw::phase_shift(spec, c.ell, 0.5 * k * k, grid))));
    }
    EXPECT_NEAR(fitted_slope(lk, ld), 2.0 * c.ell + 1.0, 0.05 * (2.0 * c.ell + 1.0)) << "l = " << c.ell;
  }
}

TEST(PhaseScan, LevinsonCount) {
  const auto spec = pw::PotentialSpec::square_well(2.0, 1.0);
  const auto bound = pw::find_bound_states(spec, 0, {-2.0, -1e-6}, 5);
  ASSERT_EQ(bound.size(), oracle::square_well_bound(2.0, 1.0).size());
  const auto curve = pw::phase_scan(spec, 0, logspace(1e-5, 5000.0, 60), make_grid(spec));
  const auto report = pw::levinson_diagnostic(curve, static_cast<int>(bound.size()));
  EXPECT_NEAR(report.phase_drop, pw::pi, 0.05);
  EXPECT_NEAR(report.mismatch, 0.0, 0.05);
}

TEST(PhaseScan, ContinuousAndAnchored) {
  const auto spec = pw::PotentialSpec::square_well(6.0, 1.5);
  const auto curve = pw::phase_scan(spec, 0, logspace(0.001, 20.0, 40), make_grid(spec));
  EXPECT_GT(curve.deltas.front(), -0.5 * pw::pi);
  EXPECT_LE(curve.deltas.front(), 0.5 * pw::pi);
  for (std::size_t i = 1; i < curve.size(); ++i) {
    EXPECT_GT(curve.energies[i], curve.energies[i - 1]);
    EXPECT_LE(std::abs(curve.deltas[i] - curve.deltas[i - 1]), 0.5 * pw::pi);
  }
}

TEST(PhaseScan, ShapeResonanceRiseAtDelayPeak) {
  const auto spec = pw::PotentialSpec::yukawa(112.0, 0.25);
  const auto curve = pw::phase_scan(spec, 3, linspace(0.62, 0.73, 1101), make_grid(spec, 30.0));
  double lo = curve.deltas.front();
  double rise = 0.0;
  for (double d : curve.deltas) {
    lo = std::min(lo, d);
    rise = std::max(rise, d - lo);
  }
  EXPECT_GT(rise, 0.9 * pw::pi);
  // steepest point against the brute-force delay peak
  std::size_t steep = 1;
  for (std::size_t i = 1; i + 1 < curve.size(); ++i) {
    if (curve.deltas[i + 1] - curve.deltas[i - 1] > curve.deltas[steep + 1] - curve.deltas[steep - 1]) steep = i;
  }
  const double peak = oracle::delay_peak([](double e) { return oracle::yukawa_phase(112.0, 0.25, 3, e); }, 0.665,
                                         0.682, 171);
  EXPECT_NEAR(curve.energies[steep], peak, 2e-4);
}

TEST(PhaseScan, UnresolvableJumpReported) {
  const auto spec = pw::PotentialSpec::yukawa(112.0, 0.25);
  pw::ScanOptions options;
  options.max_refinement = 0;
  EXPECT_THROW(pw::phase_scan(spec, 3, {0.62, 0.6728, 0.6742, 0.73}, make_grid(spec, 30.0), options),
               pw::NumericalError);
}

TEST(CrossSection, ClosedCases) {
  pw::PhaseShiftCurve zero{0, {0.4, 0.5, 0.6}, {0.0, 0.0, 0.0}};
  EXPECT_EQ(pw::cross_section({zero}, 0.5).sigma_total, 0.0);
  pw::PhaseShiftCurve half{0, {0.4, 0.5, 0.6}, {pw::pi / 2, pw::pi / 2, pw::pi / 2}};
  pw::PhaseShiftCurve p_zero{1, {0.4, 0.5, 0.6}, {0.0, 0.0, 0.0}};
  const auto cs = pw::cross_section({half, p_zero}, 0.5);
  EXPECT_NEAR(cs.sigma_total, 4.0 * pw::pi, 1e-12);
  EXPECT_NEAR(cs.sigma_partial[0], 12.566370614359172, 1e-12);
  EXPECT_THROW(pw::cross_section({half}, 0.7), pw::PreconditionError);
}

TEST(CrossSection, HardSphereLowEnergyLimit) {
  const auto spec = pw::PotentialSpec::hard_sphere(1.0);
  const auto grid = make_grid(spec);
  std::vector<pw::PhaseShiftCurve> curves;
  curves.push_back(pw::phase_scan(spec, 0, logspace(1e-4, 1e-3, 5), grid));
  const double k = std::sqrt(2e-4);
  const double sigma = pw::cross_section(curves, 1e-4).sigma_total;
  EXPECT_NEAR(sigma, 4.0 * pw::pi * std::pow(std::sin(k) / k, 2), 1e-6);
  EXPECT_NEAR(sigma, 4.0 * pw::pi, 1e-4 * 4.0 * pw::pi);
}

TEST(CrossSection, UnitarityAndSMatrixIdentity) {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> phase(-3.0 * pw::pi, 3.0 * pw::pi);
  std::uniform_real_distribution<double> energy(1e-3, 10.0);
  std::uniform_int_distribution<int> ell(0, 10);
  for (int n = 0; n < 10000; ++n) {
    const int l = ell(rng);
    const double e = energy(rng);
    const double d = phase(rng);
    const double k = std::sqrt(2.0 * e);
    EXPECT_LE(pw::partial_cross_section(l, k, d), pw::unitarity_limit(l, k) * (1.0 + 1e-15));
    const auto s = pw::s_matrix_from_phase(l, e, d);
    EXPECT_LT(std::abs(std::abs(s.s_value) - 1.0), 1e-12);
    EXPECT_LT(std::abs((s.s_value - 1.0) - std::complex<double>(0.0, 2.0) * s.amplitude_factor), 1e-12);
  }
}

TEST(SMatrix, SpecialPhases) {
  const auto a = pw::s_matrix_from_phase(0, 1.0, 0.0);
  EXPECT_NEAR(std::abs(a.s_value - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(a.amplitude_factor), 0.0, 1e-15);
  const auto b = pw::s_matrix_from_phase(0, 1.0, pw::pi / 2);
  EXPECT_NEAR(std::abs(b.s_value + 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(b.amplitude_factor - std::complex<double>(0.0, 1.0)), 0.0, 1e-15);
  const auto c = pw::s_matrix_from_phase(0, 1.0, pw::pi / 4);
  EXPECT_NEAR(std::abs(c.s_value - std::complex<double>(0.0, 1.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(c.amplitude_factor - std::polar(1.0 / std::sqrt(2.0), pw::pi / 4)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(c.s_value - 1.0), 2.0 * std::abs(c.amplitude_factor), 1e-15);
}

TEST(Scattering, DefaultEllMax) {
  const auto spec = pw::PotentialSpec::square_well(2.0, 1.0);
  const int lmax = pw::default_ell_max(spec, 2.0, make_grid(spec));
  EXPECT_GT(lmax, 1);
  EXPECT_LT(std::abs(pw::phase_shift(spec, lmax, 2.0, make_grid(spec))), 1e-6);
  EXPECT_GE(std::abs(pw::phase_shift(spec, lmax - 1, 2.0, make_grid(spec))), 1e-6);
}
