#include <gtest/gtest.h>

#include <chrono>
#include <cmath>

#include "partialwave/partialwave.hpp"
#include "support.hpp"

namespace pw = partialwave;
using testsupport::linspace;

namespace {

std::vector<std::pair<double, double>> sample(const pw::ResonanceParams& p, double lo, double hi, std::size_t n) {
  std::vector<std::pair<double, double>> out;
  for (double e : linspace(lo, hi, n)) out.emplace_back(e, pw::fano_eval(p, e));
  return out;
}

void expect_relative(double got, double want, double tol, const char* what) {
  EXPECT_LE(std::abs(got - want), tol * std::abs(want)) << what << ": got " << got << ", want " << want;
}

pw::PhaseShiftCurve arccot_curve(double er, double half_width, double background, std::size_t n = 801) {
  pw::PhaseShiftCurve c;
  for (double e : linspace(er - 0.2, er + 0.2, n)) {
    c.energies.push_back(e);
    c.deltas.push_back(background + 0.5 * pw::pi + std::atan((e - er) / half_width));
  }
  return c;
}

}  // namespace

TEST(Fano, EvalExamples) {
  pw::ResonanceParams p{0.5, 0.01, 1.0, 0.0, 1.0};
  EXPECT_DOUBLE_EQ(pw::fano_eval(p, 0.5 + 0.005), 2.0);
  p = {0.5, 0.01, 2.0, 1.3, 3.0};
  EXPECT_EQ(pw::fano_eval(p, p.energy - p.q * 0.5 * p.gamma), 1.3);
  p.gamma = 0.0;
  EXPECT_THROW(pw::fano_eval(p, 0.5), pw::PreconditionError);
}

TEST(Fano, BreitWignerLimit) {
  const double q = 1e4;
  const double c = 2.5;
  const pw::ResonanceParams p{1.0, 0.1, q, 0.0, c / (q * q)};
  for (double eps = -10.0; eps <= 10.0; eps += 0.05) {
    // Pointwise the relative gap is 2 eps / q, so measure against the peak height.
    EXPECT_NEAR(pw::fano_eval(p, 1.0 + eps * 0.05), c / (1.0 + eps * eps), 1e-3 * c);
  }
}

TEST(Fano, NeverBelowBackground) {
  const pw::ResonanceParams p{0.0, 2.0, -0.7, 0.4, 1.1};
  for (double e = -20.0; e <= 20.0; e += 0.01) EXPECT_GE(pw::fano_eval(p, e), p.sigma_0);
}

TEST(Fano, MaximumAtInverseQ) {
  for (double q : {-3.0, -0.5, 0.25, 1.0, 4.0}) {
    double best = -1.0;
    double where = 0.0;
    const double lo = 1.0 / q - 0.01;
    for (int i = 0; i <= 200000; ++i) {
      const double eps = lo + 0.02 * i / 200000.0;
      const double f = pw::fano_factor(q, eps);
      if (f > best) {
        best = f;
        where = eps;
      }
    }
    EXPECT_NEAR(best, q * q + 1.0, 1e-10) << "q = " << q;
    EXPECT_NEAR(pw::fano_factor(q, 1.0 / q), q * q + 1.0, 1e-10 * (q * q + 1.0));
    EXPECT_NEAR(where, 1.0 / q, 2e-7);
  }
}

TEST(FanoFit, RoundTrip) {
  const pw::ResonanceParams truth{0.5, 0.01, 2.0, 1.0, 3.0};
  const auto fit = pw::fano_fit(sample(truth, 0.45, 0.55, 200));
  expect_relative(fit.params.energy, truth.energy, 1e-3, "E_r");
  expect_relative(fit.params.gamma, truth.gamma, 1e-3, "Gamma");
  expect_relative(fit.params.q, truth.q, 1e-3, "q");
  expect_relative(fit.params.sigma_0, truth.sigma_0, 1e-3, "sigma_0");
  expect_relative(fit.params.sigma_a, truth.sigma_a, 1e-3, "sigma_a");
  EXPECT_LT(fit.rms_residual, 1e-8);
}

TEST(FanoFit, NegativeQPutsZeroAbove) {
  const pw::ResonanceParams truth{0.5, 0.01, -2.0, 1.0, 3.0};
  const auto fit = pw::fano_fit(sample(truth, 0.45, 0.55, 200));
  EXPECT_LT(fit.params.q, 0.0);
  const double zero = fit.params.energy - fit.params.q * 0.5 * fit.params.gamma;
  EXPECT_NEAR(zero, truth.energy + truth.gamma, 1e-6);
  EXPECT_GT(zero, fit.params.energy);
}

TEST(FanoFit, Grid) {
  const auto start = std::chrono::steady_clock::now();
  for (double gamma : {0.002, 0.005, 0.01, 0.02, 0.05}) {
    for (double q : {-4.0, -1.5, 0.5, 1.0, 3.0}) {
      for (double s0 : {0.1, 0.5, 1.0, 2.0, 5.0}) {
        const pw::ResonanceParams truth{0.5, gamma, q, s0, 3.0};
        const auto fit = pw::fano_fit(sample(truth, 0.5 - 5.0 * gamma, 0.5 + 5.0 * gamma, 200));
        expect_relative(fit.params.energy, truth.energy, 1e-3, "E_r");
        expect_relative(fit.params.gamma, gamma, 1e-3, "Gamma");
        expect_relative(fit.params.q, q, 1e-3, "q");
        expect_relative(fit.params.sigma_0, s0, 1e-3, "sigma_0");
        expect_relative(fit.params.sigma_a, 3.0, 1e-3, "sigma_a");
      }
    }
  }
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 10.0);
}

TEST(FanoFit, LargeQRecoversBreitWigner) {
  const pw::ResonanceParams truth{0.5, 0.01, 400.0, 0.2, 3.0 / (400.0 * 400.0)};
  const auto fit = pw::fano_fit(sample(truth, 0.45, 0.55, 200));
  EXPECT_GT(std::abs(fit.params.q), 100.0);
  expect_relative(fit.params.gamma, truth.gamma, 1e-3, "Gamma");
  expect_relative(fit.params.energy, truth.energy, 1e-3, "E_r");
}

TEST(FanoFit, Errors) {
  std::vector<std::pair<double, double>> flat;
  for (double e : linspace(0.4, 0.6, 100)) flat.emplace_back(e, 1.0);
  EXPECT_ANY_THROW(pw::fano_fit(flat));
  std::vector<std::pair<double, double>> few(flat.begin(), flat.begin() + 5);
  EXPECT_THROW(pw::fano_fit(few), pw::PreconditionError);
  auto negative = sample({0.5, 0.01, 1.0, 0.0, 1.0}, 0.45, 0.55, 50);
  negative[3].second = -1.0;
  EXPECT_THROW(pw::fano_fit(negative), pw::PreconditionError);
}

TEST(Decompose, PureArccot) {
  const auto r = pw::decompose_phase(arccot_curve(0.5, 0.005, 0.0), {0.3, 0.7});
  EXPECT_NEAR(r.energy, 0.5, 1e-5);
  EXPECT_NEAR(r.gamma, 0.01, 1e-4);
  EXPECT_LE(pw::identity_max_deviation(r.decomp), 1e-12);
}

TEST(Decompose, ConstantBackground) {
  const auto curve = arccot_curve(0.5, 0.005, 0.3);
  const auto r = pw::decompose_phase(curve, {0.3, 0.7});
  EXPECT_NEAR(r.energy, 0.5, 1e-5);
  EXPECT_NEAR(r.gamma, 0.01, 1e-4);
  for (std::size_t i = 0; i < r.decomp.energies.size(); ++i) {
    EXPECT_NEAR(r.decomp.delta_a[i], 0.3, 1e-3);
    EXPECT_NEAR(r.decomp.delta_a[i] + r.decomp.delta_b[i], curve.at(r.decomp.energies[i]), 1e-9);
  }
  EXPECT_LE(pw::identity_max_deviation(r.decomp), 1e-12);
}

TEST(Decompose, ResonantPartCrossesHalfPi) {
  const auto r = pw::decompose_phase(arccot_curve(0.42, 0.01, -0.2), {0.25, 0.6});
  double at = 0.0;
  for (std::size_t i = 0; i + 1 < r.decomp.energies.size(); ++i) {
    const auto& e = r.decomp.energies;
    if (e[i] <= r.energy && e[i + 1] > r.energy) {
      const double t = (r.energy - e[i]) / (e[i + 1] - e[i]);
      at = r.decomp.delta_b[i] + t * (r.decomp.delta_b[i + 1] - r.decomp.delta_b[i]);
    }
  }
  EXPECT_NEAR(at, 0.5 * pw::pi, 1e-3);
}

TEST(Decompose, NoRiseThrows) {
  pw::PhaseShiftCurve c;
  for (double e : linspace(0.1, 1.0, 50)) {
    c.energies.push_back(e);
    c.deltas.push_back(-0.5 * e);
  }
  try {
    pw::decompose_phase(c, {0.1, 1.0});
    FAIL() << "expected an error";
  } catch (const pw::NumericalError& err) {
    EXPECT_NE(std::string(err.what()).find("no resonant structure"), std::string::npos);
  }
}

TEST(Decompose, IdentityLimits) {
  for (double a : {0.0, 0.3, -1.2, pw::pi}) {
    for (double b : {0.0, 0.01, 1.0, 2.5, 0.5 * pw::pi}) {
      const auto [l, r] = pw::identity_sides(a, b);
      EXPECT_NEAR(l, r, 1e-12) << a << " " << b;
    }
  }
}

TEST(QReversal, Examples) {
  const auto series = [](std::vector<double> qs) {
    std::vector<pw::ResonanceParams> out;
    for (double q : qs) out.push_back({0.0, 1.0, q, 0.0, 1.0});
    return out;
  };
  EXPECT_TRUE(pw::detect_q_reversal(series({2.0, 1.5, 1.1})).empty());
  EXPECT_EQ(pw::detect_q_reversal(series({2.0, 0.4, -0.6, -1.2})), (std::vector<std::size_t>{1}));
  EXPECT_EQ(pw::detect_q_reversal(series({1.0, -1.0, 1.0})), (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(pw::detect_q_reversal(series({2.0, 0.0, -3.0})), (std::vector<std::size_t>{0}));
  EXPECT_THROW(pw::detect_q_reversal(series({1.0})), pw::PreconditionError);
}

TEST(Resonance, Lifetime) {
  const auto life = pw::resonance_lifetime(0.01);
  EXPECT_DOUBLE_EQ(life.au, 100.0);
  EXPECT_NEAR(life.attosec, 2418.884, 1e-3);
  EXPECT_THROW(pw::resonance_lifetime(0.0), pw::PreconditionError);
}

TEST(Resonance, FBarrierIsShape) {
  const auto spec = pw::PotentialSpec::yukawa(112.0, 0.25);
  pw::GridSpec g;
  g.r_max = 30.0;
  g.n_points = 20000;
  const auto curve = pw::effective_curve(spec, 3, pw::RadialGrid(g, spec));
  EXPECT_EQ(pw::classify_resonance(curve, 0.6735), "shape");
  EXPECT_EQ(pw::classify_resonance(curve, 5.0), "");
  EXPECT_EQ(pw::classify_resonance(curve, -0.5), "");
  const auto zero = pw::PotentialSpec::zero();
  EXPECT_EQ(pw::classify_resonance(pw::effective_curve(zero, 3, pw::RadialGrid(g, zero)), 0.5), "");
}

TEST(Resonance, FBarrierDecomposition) {
  const auto spec = pw::PotentialSpec::yukawa(112.0, 0.25);
  pw::GridSpec g;
  g.r_max = 30.0;
  g.n_points = 20000;
  const auto curve = pw::phase_scan(spec, 3, linspace(0.60, 0.75, 601), pw::RadialGrid(g, spec));
  const auto r = pw::decompose_phase(curve, {0.60, 0.75});
  EXPECT_NEAR(r.energy, 0.6735090, 2e-5);
  EXPECT_NEAR(r.gamma, 2.77e-3, 0.1e-3);
  EXPECT_LE(pw::identity_max_deviation(r.decomp), 1e-12);
}
