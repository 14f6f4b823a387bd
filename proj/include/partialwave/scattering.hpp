#pragma once

// Phase shifts from matching the regular solution to Riccati-Bessel functions,
// continuity-unwrapped scans, partial-wave cross sections and S-matrix elements.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "partialwave/errors.hpp"
#include "partialwave/grid.hpp"
#include "partialwave/parallel.hpp"
#include "partialwave/potential.hpp"
#include "partialwave/radial.hpp"
#include "partialwave/special.hpp"
#include "partialwave/units.hpp"

namespace partialwave {

/// Folds an angle into (-pi/2, pi/2].
inline double principal_phase(double delta) {
  double d = std::remainder(delta, pi);
  if (d <= -0.5 * pi) d += pi;
  if (d > 0.5 * pi) d -= pi;
  return d;
}

/// Principal-value phase shift. The matching radius defaults to one wavelength
/// beyond the potential range.
inline double phase_shift(const RadialProblem& problem, int ell, double energy,
                          std::optional<double> match_radius = std::nullopt) {
  if (!(energy > 0.0)) throw PreconditionError("scattering", "phase shift needs E > 0");
  if (ell < 0) throw PreconditionError("scattering", "ell must be >= 0");
  const RadialGrid& grid = problem.grid();
  const double k = std::sqrt(2.0 * energy);
  const double wavelength = 2.0 * pi / k;
  const double range = problem.potential().range_radius();
  if (grid.r_max() < range + 2.0 * wavelength * (1.0 - 1e-12)) {
    throw PreconditionError("scattering", "grid r_max must be >= range + 4 pi / k");
  }
  double rm = match_radius.value_or(range + wavelength);
  if (rm < range) throw PreconditionError("scattering", "matching radius inside potential range");
  for (int attempt = 0; attempt < 4; ++attempt, rm += 0.25 * wavelength) {
    const std::size_t m = grid.index_at_or_above(rm);
    if (m + 1 >= grid.size()) break;
    const auto sol = problem.integrate(ell, energy, m + 1);
    const double u = sol.u[m];
    const double du = sol.derivative(m);
    const auto f = special::riccati(ell, k * grid.r(m));
    const double amplitude = std::hypot(u, du / k);
    if (!(amplitude > 0.0) || !std::isfinite(amplitude)) break;
    const double num = (k * f.dj * u - f.j * du) / (k * amplitude);
    const double den = (k * f.dn * u - f.n * du) / (k * amplitude);
    if (std::abs(num) < 1e-14 && std::abs(den) < 1e-14) continue;
    return principal_phase(std::atan2(num, den));
  }
  throw NumericalError("scattering", "ill-conditioned match: numerator and denominator both vanish");
}

inline double phase_shift(const PotentialSpec& spec, int ell, double energy, const RadialGrid& grid,
                          std::optional<double> match_radius = std::nullopt) {
  return phase_shift(RadialProblem(spec, grid), ell, energy, match_radius);
}

/// Radius the grid must reach for matching at energy E.
inline double required_r_max(const PotentialSpec& spec, double energy) {
  return spec.range_radius() + 4.0 * pi / std::sqrt(2.0 * energy);
}

struct PhaseShiftCurve {
  int ell = 0;
  std::vector<double> energies;
  std::vector<double> deltas;

  std::size_t size() const { return energies.size(); }
  double k(std::size_t i) const { return std::sqrt(2.0 * energies[i]); }

  /// delta at E, linear in E between samples.
  double at(double energy) const {
    if (energies.empty() || energy < energies.front() || energy > energies.back()) {
      throw PreconditionError("scattering", "energy outside the phase-shift curve range");
    }
    auto it = std::lower_bound(energies.begin(), energies.end(), energy);
    const auto i = static_cast<std::size_t>(it - energies.begin());
    if (energies[i] == energy) return deltas[i];
    const double t = (energy - energies[i - 1]) / (energies[i] - energies[i - 1]);
    return deltas[i - 1] + t * (deltas[i] - deltas[i - 1]);
  }
};

struct ScanOptions {
  std::size_t threads = 1;
  int max_refinement = 8;
  double jump_limit = 0.25 * pi;  // unwrapped step that triggers local bisection
};

/// Phase shifts over an ascending energy grid, unwrapped by multiples of pi from
/// the first point's principal value. Steps larger than jump_limit are bisected
/// locally; inserted energies appear in the returned curve. The grid is extended
/// outward if the lowest energy needs a longer matching region.
inline PhaseShiftCurve phase_scan(const PotentialSpec& spec, int ell, const std::vector<double>& energy_grid,
                                  const RadialGrid& grid, const ScanOptions& options = {}) {
  if (energy_grid.empty()) throw PreconditionError("scattering", "energy grid is empty");
  for (std::size_t i = 0; i < energy_grid.size(); ++i) {
    if (!(energy_grid[i] > 0.0)) throw PreconditionError("scattering", "scan energies must be > 0");
    if (i > 0 && !(energy_grid[i] > energy_grid[i - 1])) {
      throw PreconditionError("scattering", "scan energies must be strictly increasing");
    }
  }
  const RadialProblem problem(spec, grid.extended_to(required_r_max(spec, energy_grid.front())));
  std::vector<double> principal(energy_grid.size());
  parallel_for(energy_grid.size(), options.threads,
               [&](std::size_t i) { principal[i] = phase_shift(problem, ell, energy_grid[i]); });

  const auto unwrap_to = [](double p, double previous) { return p + pi * std::round((previous - p) / pi); };
  PhaseShiftCurve curve;
  curve.ell = ell;
  curve.energies.push_back(energy_grid.front());
  curve.deltas.push_back(principal.front());

  // Resolves the interval (e0, d0) -> e1, appending interior points and the endpoint.
  const auto resolve = [&](auto&& self, double e0, double d0, double e1, double p1, int depth) -> void {
    const double d1 = unwrap_to(p1, d0);
    if (std::abs(d1 - d0) <= options.jump_limit) {
      curve.energies.push_back(e1);
      curve.deltas.push_back(d1);
      return;
    }
    if (depth >= options.max_refinement) {
      throw NumericalError("scattering", "unresolvable discontinuity in phase shift between E = " +
                                             std::to_string(e0) + " and " + std::to_string(e1) +
                                             " (resonance narrower than resolvable width)");
    }
    const double em = 0.5 * (e0 + e1);
    const double pm = phase_shift(problem, ell, em);
    self(self, e0, d0, em, pm, depth + 1);
    self(self, em, curve.deltas.back(), e1, p1, depth + 1);
  };
  for (std::size_t i = 1; i < energy_grid.size(); ++i) {
    resolve(resolve, curve.energies.back(), curve.deltas.back(), energy_grid[i], principal[i], 0);
  }
  return curve;
}

/// Levinson diagnostic: delta(E_first) - delta(E_last) against n_bound * pi.
struct LevinsonReport {
  double phase_drop = 0.0;
  int bound_states = 0;
  double mismatch = 0.0;  // phase_drop - bound_states * pi
};

inline LevinsonReport levinson_diagnostic(const PhaseShiftCurve& curve, int bound_states) {
  if (curve.size() < 2) throw PreconditionError("scattering", "Levinson diagnostic needs >= 2 points");
  LevinsonReport r;
  r.phase_drop = curve.deltas.front() - curve.deltas.back();
  r.bound_states = bound_states;
  r.mismatch = r.phase_drop - bound_states * pi;
  return r;
}

struct CrossSection {
  double sigma_total = 0.0;
  std::vector<double> sigma_partial;
};

inline double partial_cross_section(int ell, double k, double delta) {
  const double s = std::sin(delta);
  return 4.0 * pi / (k * k) * (2.0 * ell + 1.0) * s * s;
}

/// Unitarity ceiling of one partial wave.
inline double unitarity_limit(int ell, double k) { return 4.0 * pi / (k * k) * (2.0 * ell + 1.0); }

/// Cross section at E from curves for l = 0..l_max (curve index = l).
inline CrossSection cross_section(const std::vector<PhaseShiftCurve>& curves, double energy) {
  if (!(energy > 0.0)) throw PreconditionError("scattering", "cross section needs E > 0");
  const double k = std::sqrt(2.0 * energy);
  CrossSection out;
  for (const auto& c : curves) {
    const double sigma = partial_cross_section(c.ell, k, c.at(energy));
    out.sigma_partial.push_back(sigma);
    out.sigma_total += sigma;
  }
  return out;
}

struct SMatrixPoint {
  int ell = 0;
  double energy = 0.0;
  std::complex<double> s_value;
  std::complex<double> amplitude_factor;
};

inline SMatrixPoint s_matrix_from_phase(int ell, double energy, double delta) {
  using namespace std::complex_literals;
  return {ell, energy, std::exp(2.0i * delta), std::exp(1.0i * delta) * std::sin(delta)};
}

inline SMatrixPoint s_matrix(const PhaseShiftCurve& curve, double energy) {
  return s_matrix_from_phase(curve.ell, energy, curve.at(energy));
}

/// Smallest l with |delta_l(E)| < threshold, searching up to l_cap.
inline int default_ell_max(const PotentialSpec& spec, double energy, const RadialGrid& grid, int ell_cap = 60,
                           double threshold = 1e-6) {
  const RadialProblem problem(spec, grid.extended_to(required_r_max(spec, energy)));
  for (int ell = 0; ell <= ell_cap; ++ell) {
    if (std::abs(phase_shift(problem, ell, energy)) < threshold) return ell;
  }
  throw NumericalError("scattering", "phase shifts not negligible up to l = " + std::to_string(ell_cap));
}

}  // namespace partialwave
