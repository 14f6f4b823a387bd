#pragma once

// Wigner time delay tau = 2 d delta / dE (or d delta / dE for half scattering),
// the causality lower bound, and peak/dip detection.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "partialwave/errors.hpp"
#include "partialwave/scattering.hpp"
#include "partialwave/units.hpp"

namespace partialwave {

enum class DelayMode { FullScattering, HalfScattering };

inline const char* mode_name(DelayMode mode) {
  return mode == DelayMode::FullScattering ? "full" : "half";
}

inline double mode_factor(DelayMode mode) { return mode == DelayMode::FullScattering ? 2.0 : 1.0; }

struct TimeDelayCurve {
  std::vector<double> energies;
  std::vector<double> tau;  // a.u. of time
  DelayMode mode = DelayMode::FullScattering;

  std::size_t size() const { return energies.size(); }
  double attoseconds(std::size_t i) const { return to_attoseconds(tau[i]); }
};

/// dy/dx on a nonuniform grid: three-point central differences inside,
/// three-point one-sided formulas at the ends.
inline std::vector<double> derivative(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 3 || y.size() != n) throw PreconditionError("timedelay", "derivative needs >= 3 points");
  std::vector<double> d(n);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h1 = x[i] - x[i - 1];
    const double h2 = x[i + 1] - x[i];
    d[i] = -h2 / (h1 * (h1 + h2)) * y[i - 1] + (h2 - h1) / (h1 * h2) * y[i] + h1 / (h2 * (h1 + h2)) * y[i + 1];
  }
  {
    const double h1 = x[1] - x[0];
    const double h2 = x[2] - x[1];
    d[0] = -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * y[0] + (h1 + h2) / (h1 * h2) * y[1] - h1 / (h2 * (h1 + h2)) * y[2];
  }
  {
    const double h1 = x[n - 2] - x[n - 3];
    const double h2 = x[n - 1] - x[n - 2];
    d[n - 1] = h2 / (h1 * (h1 + h2)) * y[n - 3] - (h1 + h2) / (h1 * h2) * y[n - 2] +
               (2.0 * h2 + h1) / (h2 * (h1 + h2)) * y[n - 1];
  }
  return d;
}

inline TimeDelayCurve time_delay(const std::vector<double>& energies, const std::vector<double>& deltas,
                                 DelayMode mode) {
  if (energies.size() < 3) throw PreconditionError("timedelay", "time delay needs >= 3 points");
  TimeDelayCurve out;
  out.energies = energies;
  out.mode = mode;
  out.tau = derivative(energies, deltas);
  const double factor = mode_factor(mode);
  for (double& t : out.tau) {
    t *= factor;
    if (!std::isfinite(t)) throw NumericalError("timedelay", "non-finite time delay");
  }
  return out;
}

inline TimeDelayCurve time_delay(const PhaseShiftCurve& curve, DelayMode mode) {
  return time_delay(curve.energies, curve.deltas, mode);
}

struct CausalityViolation {
  double energy = 0.0;
  double tau = 0.0;
  double bound = 0.0;
};

struct CausalityReport {
  std::vector<CausalityViolation> violations;
  std::size_t checked = 0;
};

inline constexpr double causality_energy_floor = 1e-6;

/// Lower bound -2R/v on the delay.
inline double causality_bound(double range, double energy) { return -2.0 * range / std::sqrt(2.0 * energy); }

/// Points where tau < -2R/v by more than 0.05 |bound| + 1e-3 a.u.
inline CausalityReport causality_check(const TimeDelayCurve& tdc, double range) {
  if (!(range > 0.0)) throw PreconditionError("timedelay", "interaction range must be > 0");
  if (tdc.mode != DelayMode::FullScattering) {
    throw PreconditionError("timedelay", "causality bound is defined for full-scattering delays only");
  }
  CausalityReport report;
  for (std::size_t i = 0; i < tdc.size(); ++i) {
    const double e = tdc.energies[i];
    if (e < causality_energy_floor) continue;
    ++report.checked;
    const double bound = causality_bound(range, e);
    const double slack = 0.05 * std::abs(bound) + 1e-3;
    if (tdc.tau[i] < bound - slack) report.violations.push_back({e, tdc.tau[i], bound});
  }
  return report;
}

enum class FeatureKind { Peak, Dip };

inline const char* feature_name(FeatureKind kind) { return kind == FeatureKind::Peak ? "peak" : "dip"; }

struct DelayFeature {
  FeatureKind kind = FeatureKind::Peak;
  double energy = 0.0;
  double tau_extremum = 0.0;
  double fwhm = 0.0;
};

struct StructureOptions {
  double median_factor = 3.0;
  double absolute_floor = 1e-9;  // a.u.; keeps round-off in flat curves from registering
};

/// Local extrema with |tau| above median_factor * median |tau|, located by a
/// parabola through the three nearest samples unless it overshoots the smaller
/// neighbour difference; width at half the extremum.
inline std::vector<DelayFeature> delay_structure_scan(const TimeDelayCurve& tdc, const StructureOptions& options = {}) {
  const std::size_t n = tdc.size();
  if (n < 5) throw PreconditionError("timedelay", "structure scan needs >= 5 points");
  const auto& e = tdc.energies;
  const auto& t = tdc.tau;
  std::vector<double> mags(n);
  for (std::size_t i = 0; i < n; ++i) mags[i] = std::abs(t[i]);
  std::nth_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(n / 2), mags.end());
  double median = mags[n / 2];
  if (n % 2 == 0) {
    median = 0.5 * (median + *std::max_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(n / 2)));
  }
  const double threshold = std::max(options.median_factor * median, options.absolute_floor);

  const auto crossing = [&](std::size_t c, double level, int direction) {
    std::size_t i = c;
    const bool above = t[c] > level;
    while (true) {
      if (direction < 0 && i == 0) return e.front();
      if (direction > 0 && i + 1 == n) return e.back();
      const std::size_t j = direction < 0 ? i - 1 : i + 1;
      if ((t[j] > level) != above) return e[i] + (level - t[i]) / (t[j] - t[i]) * (e[j] - e[i]);
      i = j;
    }
  };

  std::vector<DelayFeature> out;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const bool peak = t[i] > t[i - 1] && t[i] >= t[i + 1];
    const bool dip = t[i] < t[i - 1] && t[i] <= t[i + 1];
    if (!(peak || dip) || !(std::abs(t[i]) > threshold)) continue;
    DelayFeature f;
    f.kind = peak ? FeatureKind::Peak : FeatureKind::Dip;
    const double x0 = e[i - 1];
    const double x1 = e[i];
    const double x2 = e[i + 1];
    const double d1 = (t[i] - t[i - 1]) / (x1 - x0);
    const double d2 = (t[i + 1] - t[i]) / (x2 - x1);
    const double curvature = (d2 - d1) / (x2 - x0);
    double vertex = x1;
    double value = t[i];
    if (curvature != 0.0) {
      const double xv = std::clamp(0.5 * (x0 + x1) - d1 / (2.0 * curvature), x0, x2);
      const double tv = t[i - 1] + d1 * (xv - x0) + curvature * (xv - x0) * (xv - x1);
      // Next to a much larger neighbour the parabola overshoots; keep the sample then.
      const double step = std::min(std::abs(t[i] - t[i - 1]), std::abs(t[i + 1] - t[i]));
      if (std::abs(tv - t[i]) <= step) {
        vertex = xv;
        value = tv;
      }
    }
    f.energy = vertex;
    f.tau_extremum = value;
    const double half = 0.5 * value;
    f.fwhm = crossing(i, half, 1) - crossing(i, half, -1);
    out.push_back(f);
  }
  return out;
}

}  // namespace partialwave
