#pragma once

// Length-gauge bound-to-continuum dipole matrix elements with energy-normalized
// continua, photodetachment cross sections, Cooper minima and threshold-law
// exponent fits.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "partialwave/errors.hpp"
#include "partialwave/parallel.hpp"
#include "partialwave/radial.hpp"
#include "partialwave/scattering.hpp"
#include "partialwave/special.hpp"
#include "partialwave/timedelay.hpp"
#include "partialwave/units.hpp"

namespace partialwave {

/// Continuum solution scaled to amplitude sqrt(2 / (pi k)), positive near the origin.
struct ContinuumWave {
  double energy = 0.0;
  int ell = 0;
  std::vector<double> u;
  double amplitude_spread = 0.0;  // (max - min) / mean of the raw amplitude over the last wavelength
  double phase = 0.0;             // principal-value phase shift
};

/// Dipole integrals for one bound state and one final partial wave. The
/// continuum is integrated on the bound state's nodes, continued outward as far
/// as the lowest energy needs.
class DipoleCalculator {
 public:
  DipoleCalculator(BoundState initial, PotentialSpec spec, int final_ell, double lowest_energy,
                   double min_r_max = 0.0)
      : initial_(std::move(initial)), spec_(std::move(spec)), final_ell_(final_ell) {
    if (std::abs(final_ell - initial_.ell) != 1) {
      throw PreconditionError("photo", "dipole selection rule requires final l = initial l +- 1");
    }
    if (!(lowest_energy > 0.0)) throw PreconditionError("photo", "continuum energies must be > 0");
    if (!initial_.grid || initial_.u.size() != initial_.grid->size()) {
      throw PreconditionError("photo", "bound state carries no grid");
    }
    const auto& u = initial_.u;
    double peak = 0.0;
    for (double v : u) peak = std::max(peak, std::abs(v));
    cutoff_ = u.size() - 1;
    while (cutoff_ > 2 && std::abs(u[cutoff_]) < 1e-12 * peak) --cutoff_;
    const double wavelength = 2.0 * pi / std::sqrt(2.0 * lowest_energy);
    const double reach = std::max({min_r_max, initial_.grid->r(cutoff_) + 1.0,
                                   spec_.range_radius() + 3.0 * wavelength});
    problem_ = std::make_shared<const RadialProblem>(spec_, initial_.grid->extended_to(reach));
  }

  const BoundState& initial() const { return initial_; }
  const PotentialSpec& potential() const { return spec_; }
  int final_ell() const { return final_ell_; }

  /// Angular weight l_> / (2l + 1).
  double weight() const {
    return static_cast<double>(std::max(initial_.ell, final_ell_)) / (2.0 * initial_.ell + 1.0);
  }

  ContinuumWave continuum(double energy) const {
    if (!(energy > 0.0)) throw PreconditionError("photo", "continuum energy must be > 0");
    const RadialGrid& grid = problem_->grid();
    const double k = std::sqrt(2.0 * energy);
    const double wavelength = 2.0 * pi / k;
    const double rm = spec_.range_radius() + 2.0 * wavelength;
    const std::size_t m = grid.index_at_or_above(rm);
    const std::size_t window = grid.index_at_or_above(rm - wavelength);
    if (m + 1 >= grid.size()) throw PreconditionError("photo", "continuum grid too short for E");
    const std::size_t last = std::max(m + 1, cutoff_);
    auto sol = problem_->integrate(final_ell_, energy, last);
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    double sum = 0.0;
    std::size_t count = 0;
    double c1_end = 0.0;
    double c2_end = 0.0;
    for (std::size_t i = std::max<std::size_t>(window, 1); i <= m; ++i) {
      const double u = sol.u[i];
      const double du = sol.derivative(i) / k;
      const auto f = special::riccati(final_ell_, k * grid.r(i));
      const double c1 = u * f.dn - du * f.n;
      const double c2 = f.j * du - f.dj * u;
      const double a = std::hypot(c1, c2);
      lo = std::min(lo, a);
      hi = std::max(hi, a);
      sum += a;
      ++count;
      c1_end = c1;
      c2_end = c2;
    }
    const double mean = sum / static_cast<double>(count);
    ContinuumWave wave;
    wave.energy = energy;
    wave.ell = final_ell_;
    wave.amplitude_spread = (hi - lo) / mean;
    if (!(wave.amplitude_spread <= 0.01)) {
      throw NumericalError("photo", "normalization failure: continuum amplitude varies by " +
                                        std::to_string(100.0 * wave.amplitude_spread) +
                                        "% over the last wavelength (grid too short)");
    }
    // u = A (jhat cos d - nhat sin d) gives c1 = A cos d, c2 = -A sin d
    wave.phase = principal_phase(std::atan2(-c2_end, c1_end));
    const double scale = std::sqrt(2.0 / (pi * k)) / mean;
    wave.u.resize(sol.u.size());
    const double sign = sol.u[1] < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < sol.u.size(); ++i) wave.u[i] = sign * scale * sol.u[i];
    return wave;
  }

  /// Integral of u_bound r u_E dr, truncated where the bound state falls below
  /// 1e-12 of its peak.
  double matrix_element(double energy) const {
    const auto wave = continuum(energy);
    const RadialGrid& grid = problem_->grid();
    std::vector<double> f(cutoff_ + 1);
    for (std::size_t i = 0; i <= cutoff_; ++i) f[i] = initial_.u[i] * grid.r(i) * wave.u[i];
    return grid.integrate(f, 0, cutoff_);
  }

  double photon_energy(double energy) const { return energy + std::abs(initial_.energy); }

  /// (4 pi^2 / 3) alpha omega weight D^2.
  double cross_section(double energy, double dipole) const {
    return 4.0 * pi * pi / 3.0 * fine_structure * photon_energy(energy) * weight() * dipole * dipole;
  }

 private:
  BoundState initial_;
  PotentialSpec spec_;
  int final_ell_ = 0;
  std::size_t cutoff_ = 0;
  std::shared_ptr<const RadialProblem> problem_;
};

inline double dipole_matrix_element(const BoundState& initial, const PotentialSpec& spec, int final_ell,
                                    double energy, const RadialGrid& grid) {
  return DipoleCalculator(initial, spec, final_ell, energy, grid.r_max()).matrix_element(energy);
}

struct DipoleScan {
  int initial_n = 0;
  int initial_ell = 0;
  double initial_energy = 0.0;
  int final_ell = 0;
  double weight = 0.0;
  std::vector<double> energies;
  std::vector<double> photon_energies;
  std::vector<double> dipole;
  std::vector<double> sigma_partial;
  std::shared_ptr<const DipoleCalculator> source;  // for re-evaluation between samples
};

struct PhotoScan {
  std::vector<DipoleScan> channels;  // l - 1 (when l >= 1) then l + 1
  std::vector<double> energies;
  std::vector<double> sigma_total;
};

inline void validate_energies(const std::vector<double>& energies) {
  if (energies.empty()) throw PreconditionError("photo", "energy grid is empty");
  for (std::size_t i = 0; i < energies.size(); ++i) {
    if (!(energies[i] > 0.0)) throw PreconditionError("photo", "photoelectron energies must be > 0");
    if (i > 0 && !(energies[i] > energies[i - 1])) {
      throw PreconditionError("photo", "photoelectron energies must be strictly increasing");
    }
  }
}

inline DipoleScan dipole_scan(const BoundState& initial, const PotentialSpec& spec, int final_ell,
                              const std::vector<double>& energies, std::size_t threads = 1,
                              double min_r_max = 0.0) {
  validate_energies(energies);
  auto calc = std::make_shared<const DipoleCalculator>(initial, spec, final_ell, energies.front(), min_r_max);
  DipoleScan scan;
  scan.initial_n = initial.n_radial;
  scan.initial_ell = initial.ell;
  scan.initial_energy = initial.energy;
  scan.final_ell = final_ell;
  scan.weight = calc->weight();
  scan.energies = energies;
  scan.dipole.resize(energies.size());
  parallel_for(energies.size(), threads, [&](std::size_t i) { scan.dipole[i] = calc->matrix_element(energies[i]); });
  for (std::size_t i = 0; i < energies.size(); ++i) {
    scan.photon_energies.push_back(calc->photon_energy(energies[i]));
    scan.sigma_partial.push_back(calc->cross_section(energies[i], scan.dipole[i]));
  }
  scan.source = std::move(calc);
  return scan;
}

inline PhotoScan photodetachment_cross_section(const BoundState& initial, const PotentialSpec& spec,
                                               const std::vector<double>& energies, std::size_t threads = 1) {
  PhotoScan out;
  out.energies = energies;
  if (initial.ell >= 1) out.channels.push_back(dipole_scan(initial, spec, initial.ell - 1, energies, threads));
  out.channels.push_back(dipole_scan(initial, spec, initial.ell + 1, energies, threads));
  out.sigma_total.assign(energies.size(), 0.0);
  for (const auto& c : out.channels) {
    for (std::size_t i = 0; i < energies.size(); ++i) out.sigma_total[i] += c.sigma_partial[i];
  }
  return out;
}

struct CooperMinimum {
  double energy = 0.0;
  double lo = 0.0;  // refined bracket
  double hi = 0.0;
  double sample_lo = 0.0;  // scan samples enclosing the sign change
  double sample_hi = 0.0;
};

/// First sign change of D in the scan, refined by bisection to |dE| < 1e-8.
inline CooperMinimum find_cooper_minimum(const DipoleScan& scan, double tolerance = 1e-8) {
  const auto& e = scan.energies;
  const auto& d = scan.dipole;
  std::optional<std::size_t> at;
  for (std::size_t i = 0; i + 1 < e.size(); ++i) {
    if ((d[i] > 0.0 && d[i + 1] < 0.0) || (d[i] < 0.0 && d[i + 1] > 0.0)) {
      at = i;
      break;
    }
  }
  if (!at) throw NumericalError("photo", "no Cooper minimum detected: D does not change sign in the scan");
  if (!scan.source) throw PreconditionError("photo", "dipole scan cannot be re-evaluated");
  const std::size_t i = *at;
  double lo = e[i];
  double hi = e[i + 1];
  const bool lo_positive = d[i] > 0.0;
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if ((scan.source->matrix_element(mid) > 0.0) == lo_positive) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  CooperMinimum cm{0.5 * (lo + hi), lo, hi, e[i], e[i + 1]};
  const double dm = scan.source->matrix_element(cm.energy);
  const double sigma_cm = scan.source->cross_section(cm.energy, dm);
  std::vector<std::size_t> order(e.size());
  for (std::size_t k = 0; k < e.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(e[a] - cm.energy) < std::abs(e[b] - cm.energy);
  });
  for (std::size_t k = 0; k < std::min<std::size_t>(3, order.size()); ++k) {
    if (sigma_cm > scan.sigma_partial[order[k]]) {
      throw NumericalError("photo", "cross section at the dipole zero is not a local minimum");
    }
  }
  return cm;
}

struct ThresholdFit {
  double exponent = 0.0;
  double stderr_ = 0.0;
  double expected = 0.0;  // l' + 1/2
  std::size_t points = 0;
};

/// Least-squares slope of ln sigma against ln E over `decades` decades above the
/// lowest scan energy.
inline ThresholdFit threshold_exponent_fit(const std::vector<double>& energies, const std::vector<double>& sigma,
                                           double decades, int expected_ell) {
  if (energies.empty() || energies.size() != sigma.size()) {
    throw PreconditionError("photo", "threshold fit needs matching energy and cross-section arrays");
  }
  const double top = energies.front() * std::pow(10.0, decades) * (1.0 + 1e-12);
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i = 0; i < energies.size() && energies[i] <= top; ++i) {
    if (!(sigma[i] > 0.0)) throw NumericalError("photo", "cross section non-positive in the threshold range");
    x.push_back(std::log(energies[i]));
    y.push_back(std::log(sigma[i]));
  }
  const std::size_t n = x.size();
  if (n < 10) throw PreconditionError("photo", "threshold fit needs >= 10 points in the requested decades");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  ThresholdFit fit;
  fit.exponent = sxy / sxx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - my - fit.exponent * (x[i] - mx);
    ssr += r * r;
  }
  fit.stderr_ = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
  fit.expected = expected_ell + 0.5;
  fit.points = n;
  return fit;
}

inline ThresholdFit threshold_exponent_fit(const DipoleScan& scan, double decades, int expected_ell) {
  return threshold_exponent_fit(scan.energies, scan.sigma_partial, decades, expected_ell);
}

/// Photoemission phase of one channel: the continuum phase shift plus a step
/// of -pi where D changes sign (-pi/2 exactly at the zero). Points at
/// E_CM - rho, E_CM and E_CM + rho are added so the step is resolved on the grid.
inline PhaseShiftCurve photoemission_phase(const DipoleScan& scan, std::optional<double> cooper_energy) {
  if (!scan.source) throw PreconditionError("photo", "dipole scan cannot be re-evaluated");
  std::vector<double> e = scan.energies;
  if (cooper_energy) {
    const double ecm = *cooper_energy;
    double spacing = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < e.size(); ++i) spacing = std::min(spacing, e[i + 1] - e[i]);
    const double rho = 1e-3 * spacing;
    const double first = e.front();
    const double last = e.back();
    for (double v : {ecm - rho, ecm, ecm + rho}) {
      if (v > first && v < last) e.push_back(v);
    }
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
  }
  PhaseShiftCurve curve;
  curve.ell = scan.final_ell;
  curve.energies = e;
  double previous = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    double delta = scan.source->continuum(e[i]).phase;
    if (i > 0) delta += pi * std::round((previous - delta) / pi);
    previous = delta;
    double step = 0.0;
    if (cooper_energy) {
      if (e[i] == *cooper_energy) {
        step = -0.5 * pi;
      } else if (e[i] > *cooper_energy) {
        step = -pi;
      }
    }
    curve.deltas.push_back(delta);
    curve.deltas.back() += step;
  }
  return curve;
}

}  // namespace partialwave
