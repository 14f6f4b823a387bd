#pragma once

// Beutler-Fano profiles: evaluation, damped least-squares fitting, splitting a
// phase shift into background and resonant parts, and q-reversal detection.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "partialwave/effective_curve.hpp"
#include "partialwave/errors.hpp"
#include "partialwave/scattering.hpp"
#include "partialwave/units.hpp"

namespace partialwave {

struct ResonanceParams {
  double energy = 0.0;  // E_r
  double gamma = 1.0;   // full width
  double q = 0.0;
  double sigma_0 = 0.0;
  double sigma_a = 0.0;
};

inline double reduced_energy(const ResonanceParams& p, double energy) {
  return (energy - p.energy) / (0.5 * p.gamma);
}

/// (q + eps)^2 / (1 + eps^2).
inline double fano_factor(double q, double eps) { return (q + eps) * (q + eps) / (1.0 + eps * eps); }

/// sigma_0 + sigma_a (q + eps)^2 / (1 + eps^2), eps = (E - E_r) / (Gamma / 2).
inline double fano_eval(const ResonanceParams& p, double energy) {
  if (!(p.gamma > 0.0)) throw PreconditionError("resonance", "Gamma must be > 0");
  return p.sigma_0 + p.sigma_a * fano_factor(p.q, reduced_energy(p, energy));
}

struct FanoFit {
  ResonanceParams params;
  double rms_residual = 0.0;
  int iterations = 0;
};

struct FitOptions {
  int max_iterations = 200;
  double relative_step = 1e-10;
};

namespace detail {

/// Energy where the sampled curve crosses `level` walking outward from index c.
inline double level_crossing(const std::vector<double>& e, const std::vector<double>& s, std::size_t c, double level,
                             int direction) {
  const bool above = s[c] > level;
  std::size_t i = c;
  while (true) {
    if (direction < 0 && i == 0) return e.front();
    if (direction > 0 && i + 1 == e.size()) return e.back();
    const std::size_t j = direction < 0 ? i - 1 : i + 1;
    if ((s[j] > level) != above) {
      const double t = (level - s[i]) / (s[j] - s[i]);
      return e[i] + t * (e[j] - e[i]);
    }
    i = j;
  }
}

/// Starting values read off the extrema: the profile zero sits at eps = -q, the
/// maximum at eps = 1/q with factor q^2 + 1, and the far wings tend to factor 1.
inline ResonanceParams fano_initial_guess(const std::vector<double>& e, const std::vector<double>& s) {
  const std::size_t n = e.size();
  const auto imax = static_cast<std::size_t>(std::max_element(s.begin(), s.end()) - s.begin());
  const auto imin = static_cast<std::size_t>(std::min_element(s.begin(), s.end()) - s.begin());
  const auto interior = [&](std::size_t i) { return i > 0 && i + 1 < n; };
  const double far = 0.5 * (s.front() + s.back());
  const double smax = s[imax];
  const double smin = s[imin];
  if (!(smax > smin) || (!interior(imax) && !interior(imin))) {
    throw NumericalError("resonance", "no resonant structure detected (data monotone or extremum at window edge)");
  }
  ResonanceParams p;
  if (interior(imax) && interior(imin)) {
    const double ratio = far > smin ? (smax - smin) / (far - smin) : 2.0;
    const double aq = std::sqrt(std::max(ratio - 1.0, 1e-6));
    const double q = e[imax] > e[imin] ? aq : -aq;
    p.gamma = 2.0 * std::abs(e[imax] - e[imin]) / (aq + 1.0 / aq);
    p.q = q;
    p.energy = e[imin] + 0.5 * q * p.gamma;
    p.sigma_0 = smin;
    p.sigma_a = std::max(far - smin, (smax - smin) / (q * q + 1.0));
  } else if (interior(imax)) {
    const double base = std::min(s.front(), s.back());
    const double half = 0.5 * (smax + base);
    p.energy = e[imax];
    p.gamma = level_crossing(e, s, imax, half, 1) - level_crossing(e, s, imax, half, -1);
    p.q = s.back() >= s.front() ? 10.0 : -10.0;
    p.sigma_0 = base;
    p.sigma_a = (smax - base) / (p.q * p.q + 1.0);
  } else {
    const double top = std::max(s.front(), s.back());
    const double half = 0.5 * (smin + top);
    p.energy = e[imin];
    p.gamma = level_crossing(e, s, imin, half, 1) - level_crossing(e, s, imin, half, -1);
    p.q = s.back() >= s.front() ? 0.1 : -0.1;
    p.sigma_0 = smin;
    p.sigma_a = top - smin;
  }
  if (!(p.gamma > 0.0)) p.gamma = (e.back() - e.front()) / 10.0;
  return p;
}

}  // namespace detail

/// Levenberg-Marquardt fit of the Fano profile to (E, sigma) samples inside
/// `window` (all samples when absent). Gamma is optimized through log Gamma.
inline FanoFit fano_fit(const std::vector<std::pair<double, double>>& data,
                        std::optional<std::pair<double, double>> window = std::nullopt,
                        const FitOptions& options = {}) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& d : data) {
    if (!window || (d.first >= window->first && d.first <= window->second)) pts.push_back(d);
  }
  if (pts.size() < 8) throw PreconditionError("resonance", "Fano fit needs >= 8 points in the window");
  std::sort(pts.begin(), pts.end());
  std::vector<double> e(pts.size());
  std::vector<double> s(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    e[i] = pts[i].first;
    s[i] = pts[i].second;
    if (!(s[i] >= 0.0)) throw PreconditionError("resonance", "cross-section samples must be >= 0");
  }
  const ResonanceParams guess = detail::fano_initial_guess(e, s);

  using Vec = Eigen::Matrix<double, 5, 1>;
  using Mat = Eigen::Matrix<double, 5, 5>;
  // Past |q| = 1 the fit runs on p = 1/q and A = sigma_a q^2, which keeps the
  // Breit-Wigner limit (p = 0) at a finite point of parameter space.
  const bool inverted = std::abs(guess.q) > 1.0;
  const auto unpack = [inverted](const Vec& x) {
    if (!inverted) return ResonanceParams{x[0], std::exp(x[1]), x[2], x[3], x[4]};
    const double p = x[2] != 0.0 ? x[2] : std::numeric_limits<double>::min();
    return ResonanceParams{x[0], std::exp(x[1]), 1.0 / p, x[3], x[4] * p * p};
  };
  // Profile value and its gradient in the fit variables.
  const auto model = [inverted](const Vec& x, double energy, Vec* grad) {
    const double gamma = std::exp(x[1]);
    const double eps = (energy - x[0]) / (0.5 * gamma);
    const double den = 1.0 + eps * eps;
    double f = 0.0;
    double dfde = 0.0;
    double dfs = 0.0;
    if (inverted) {
      const double a = 1.0 + x[2] * eps;
      f = a * a / den;
      dfde = 2.0 * a * (x[2] - eps) / (den * den);
      dfs = 2.0 * eps * a / den;
    } else {
      f = fano_factor(x[2], eps);
      dfde = 2.0 * (x[2] + eps) * (1.0 - x[2] * eps) / (den * den);
      dfs = 2.0 * (x[2] + eps) / den;
    }
    if (grad) *grad << x[4] * dfde * (-2.0 / gamma), x[4] * dfde * (-eps), x[4] * dfs, 1.0, f;
    return x[3] + x[4] * f;
  };
  const auto cost = [&](const Vec& x) {
    double c = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
      const double r = model(x, e[i], nullptr) - s[i];
      c += r * r;
    }
    return c;
  };
  Vec x;
  if (inverted) {
    x << guess.energy, std::log(guess.gamma), 1.0 / guess.q, guess.sigma_0, guess.sigma_a * guess.q * guess.q;
  } else {
    x << guess.energy, std::log(guess.gamma), guess.q, guess.sigma_0, guess.sigma_a;
  }
  double c = cost(x);
  double lambda = 1e-3;
  int it = 0;
  int stalled = 0;  // accepted steps with negligible cost decrease
  bool converged = false;
  for (; it < options.max_iterations && !converged; ++it) {
    Mat jtj = Mat::Zero();
    Vec jtr = Vec::Zero();
    for (std::size_t i = 0; i < e.size(); ++i) {
      Vec row;
      const double r = model(x, e[i], &row) - s[i];
      jtj += row * row.transpose();
      jtr += row * r;
    }
    if (c == 0.0) {
      converged = true;
      break;
    }
    bool accepted = false;
    for (int attempt = 0; attempt < 60; ++attempt) {
      Mat a = jtj;
      for (int k = 0; k < 5; ++k) a(k, k) += lambda * std::max(jtj(k, k), 1e-300);
      const Vec step = a.ldlt().solve(-jtr);
      const Vec trial = x + step;
      const double ct = step.allFinite() ? cost(trial) : std::numeric_limits<double>::infinity();
      bool small = true;
      for (int k = 0; k < 5; ++k) {
        if (std::abs(step[k]) > options.relative_step * std::max(std::abs(x[k]), 1e-12)) small = false;
      }
      if (ct <= c) {
        stalled = (c - ct <= 1e-12 * c) ? stalled + 1 : 0;
        if (stalled >= 10) converged = true;
        x = trial;
        c = ct;
        lambda = std::max(lambda / 10.0, 1e-15);
        accepted = true;
        if (small) converged = true;
        break;
      }
      if (small) {
        converged = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted && !converged) converged = true;  // no descent direction left
  }
  if (!converged) throw NumericalError("resonance", "Fano fit did not converge within the iteration cap");
  FanoFit out;
  out.params = unpack(x);
  out.rms_residual = std::sqrt(c / static_cast<double>(e.size()));
  out.iterations = it;
  return out;
}

struct PhaseDecomposition {
  std::vector<double> energies;
  std::vector<double> delta_a;
  std::vector<double> delta_b;
  std::pair<double, double> window;
};

struct DecompositionResult {
  PhaseDecomposition decomp;
  double energy = 0.0;  // E_r
  double gamma = 0.0;
  double background_residual = 0.0;  // max |delta - arccot(-eps) - delta_a| outside the rise
};

/// Both sides of sin^2(da + db) = sin^2 da (-cot da - cot db)^2 / (1 + cot^2 db).
/// Exact zeros of sin da or sin db take the limiting value of the right side.
inline std::pair<double, double> identity_sides(double delta_a, double delta_b) {
  const double s = std::sin(delta_a + delta_b);
  const double left = s * s;
  const double sa = std::sin(delta_a);
  const double sb = std::sin(delta_b);
  double right = 0.0;
  if (sa == 0.0 && sb == 0.0) {
    right = 0.0;
  } else if (sa == 0.0) {
    right = sb * sb;
  } else if (sb == 0.0) {
    right = sa * sa;
  } else {
    const double ca = std::cos(delta_a) / sa;
    const double cb = std::cos(delta_b) / sb;
    right = sa * sa * (-ca - cb) * (-ca - cb) / (1.0 + cb * cb);
  }
  return {left, right};
}

/// Largest |left - right| of the identity over a decomposition.
inline double identity_max_deviation(const PhaseDecomposition& d) {
  double worst = 0.0;
  for (std::size_t i = 0; i < d.energies.size(); ++i) {
    const auto [l, r] = identity_sides(d.delta_a[i], d.delta_b[i]);
    worst = std::max(worst, std::abs(l - r));
  }
  return worst;
}

namespace detail {

/// Cubic through four points, its value and slope at x.
struct Cubic {
  double x[4];
  double y[4];

  double value(double t) const {
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) {
      double term = y[i];
      for (int j = 0; j < 4; ++j) {
        if (j != i) term *= (t - x[j]) / (x[i] - x[j]);
      }
      sum += term;
    }
    return sum;
  }

  double slope(double t) const {
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) {
      double d = 0.0;
      for (int m = 0; m < 4; ++m) {
        if (m == i) continue;
        double term = 1.0 / (x[i] - x[m]);
        for (int j = 0; j < 4; ++j) {
          if (j != i && j != m) term *= (t - x[j]) / (x[i] - x[j]);
        }
        d += term;
      }
      sum += y[i] * d;
    }
    return sum;
  }
};

/// Least-squares polynomial of degree `degree` in the centred, scaled variable.
struct Polynomial {
  double centre = 0.0;
  double scale = 1.0;
  std::vector<double> c;

  double operator()(double e) const {
    const double t = (e - centre) / scale;
    double v = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) v = v * t + c[k];
    return v;
  }
};

inline Polynomial fit_polynomial(const std::vector<double>& x, const std::vector<double>& y, int degree, double centre,
                                 double scale) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd a(n, degree + 1);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = (x[static_cast<std::size_t>(i)] - centre) / scale;
    double p = 1.0;
    for (int k = 0; k <= degree; ++k, p *= t) a(i, k) = p;
    b(i) = y[static_cast<std::size_t>(i)];
  }
  const Eigen::VectorXd sol = a.colPivHouseholderQr().solve(b);
  Polynomial poly{centre, scale, std::vector<double>(sol.data(), sol.data() + sol.size())};
  return poly;
}

}  // namespace detail

/// Splits delta into a quadratic background delta_a and a resonant part
/// delta_b = delta - delta_a that climbs through pi/2 at E_r. The background is
/// fitted to delta - arccot(-eps) away from the rise, iterating E_r and Gamma to
/// self-consistency; Gamma = 2 / (d delta_b / dE) at E_r.
inline DecompositionResult decompose_phase(const PhaseShiftCurve& curve, std::pair<double, double> window) {
  std::vector<double> e;
  std::vector<double> d;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (curve.energies[i] >= window.first && curve.energies[i] <= window.second) {
      e.push_back(curve.energies[i]);
      d.push_back(curve.deltas[i]);
    }
  }
  const std::size_t n = e.size();
  if (n < 12) throw PreconditionError("resonance", "phase decomposition needs >= 12 samples in the window");
  double rise = 0.0;
  double running_min = d[0];
  for (std::size_t i = 1; i < n; ++i) {
    running_min = std::min(running_min, d[i]);
    rise = std::max(rise, d[i] - running_min);
  }
  if (rise < 0.9 * pi) {
    throw NumericalError("resonance", "no resonant structure detected: phase rises by only " +
                                          std::to_string(rise / pi) + " pi in the window (< 0.9 pi)");
  }

  std::size_t steep = 1;
  double best = -1.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double slope = (d[i + 1] - d[i - 1]) / (e[i + 1] - e[i - 1]);
    if (slope > best) {
      best = slope;
      steep = i;
    }
  }
  double er = e[steep];
  double gamma = 2.0 / best;
  const double centre = 0.5 * (e.front() + e.back());
  const double scale = 0.5 * (e.back() - e.front());
  detail::Polynomial background;
  std::vector<double> db(n);
  double residual = 0.0;
  for (int iteration = 0; iteration < 100; ++iteration) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (double cut : {10.0, 6.0, 4.0}) {
      xs.clear();
      ys.clear();
      for (std::size_t i = 0; i < n; ++i) {
        const double eps = (e[i] - er) / (0.5 * gamma);
        if (std::abs(eps) > cut) {
          xs.push_back(e[i]);
          ys.push_back(d[i] - (0.5 * pi + std::atan(eps)));
        }
      }
      if (xs.size() >= 6) break;
    }
    if (xs.size() < 3) throw NumericalError("resonance", "too few samples outside the rise to fit a background");
    const int degree = xs.size() >= 6 ? 2 : static_cast<int>(xs.size()) - 1;
    background = detail::fit_polynomial(xs, ys, std::min(degree, 2), centre, scale);
    residual = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) residual = std::max(residual, std::abs(ys[i] - background(xs[i])));
    for (std::size_t i = 0; i < n; ++i) db[i] = d[i] - background(e[i]);
    std::size_t c = n;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (db[i] <= 0.5 * pi && db[i + 1] > 0.5 * pi) {
        c = i;
        break;
      }
    }
    if (c == n) throw NumericalError("resonance", "resonant phase does not cross pi/2 in the window");
    const std::size_t first = std::min(c > 0 ? c - 1 : 0, n - 4);
    detail::Cubic cubic{};
    for (int k = 0; k < 4; ++k) {
      cubic.x[k] = e[first + static_cast<std::size_t>(k)];
      cubic.y[k] = db[first + static_cast<std::size_t>(k)];
    }
    double lo = e[c];
    double hi = e[c + 1];
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (cubic.value(mid) > 0.5 * pi) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    const double er_new = 0.5 * (lo + hi);
    const double gamma_new = 2.0 / cubic.slope(er_new);
    if (!(gamma_new > 0.0)) throw NumericalError("resonance", "resonant phase slope is not positive at E_r");
    const bool settled = std::abs(er_new - er) <= 1e-13 * std::max(1.0, std::abs(er)) &&
                         std::abs(gamma_new - gamma) <= 1e-12 * gamma;
    er = er_new;
    gamma = gamma_new;
    if (settled) break;
  }
  if (residual > 0.05) {
    throw NumericalError("resonance", "background fit residual " + std::to_string(residual) +
                                          " rad exceeds 0.05 (background not slowly varying)");
  }
  DecompositionResult out;
  out.decomp.energies = e;
  out.decomp.window = window;
  out.decomp.delta_a.resize(n);
  out.decomp.delta_b = db;
  for (std::size_t i = 0; i < n; ++i) out.decomp.delta_a[i] = background(e[i]);
  out.energy = er;
  out.gamma = gamma;
  out.background_residual = residual;
  return out;
}

/// Indices i where q changes sign between members i and i+1. A zero q takes the
/// sign of whichever neighbour has the larger |q|.
inline std::vector<std::size_t> detect_q_reversal(const std::vector<ResonanceParams>& series) {
  if (series.size() < 2) throw PreconditionError("resonance", "q-reversal needs >= 2 members");
  const auto sgn = [](double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); };
  std::vector<int> signs(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    signs[i] = sgn(series[i].q);
    if (signs[i] == 0) {
      double best = -1.0;
      for (std::size_t j : {i - 1, i + 1}) {
        if (j < series.size() && std::abs(series[j].q) > best) {
          best = std::abs(series[j].q);
          signs[i] = sgn(series[j].q);
        }
      }
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i + 1 < series.size(); ++i) {
    if (signs[i] != 0 && signs[i + 1] != 0 && signs[i] != signs[i + 1]) out.push_back(i);
  }
  return out;
}

struct Lifetime {
  double au = 0.0;
  double attosec = 0.0;
};

/// hbar / Gamma.
inline Lifetime resonance_lifetime(double gamma) {
  if (!(gamma > 0.0)) throw PreconditionError("resonance", "Gamma must be > 0");
  return {1.0 / gamma, to_attoseconds(1.0 / gamma)};
}

/// "shape" when a positive barrier above E_r holds a quasi-level over an inner
/// well lying below E_r; empty otherwise.
inline std::string classify_resonance(const EffectiveCurve& curve, double resonance_energy) {
  if (!curve.barrier || !curve.inner_minimum) return {};
  if (curve.barrier->value > 0.0 && curve.barrier->value > resonance_energy && resonance_energy > 0.0 &&
      curve.inner_minimum->value < resonance_energy) {
    return "shape";
  }
  return {};
}

}  // namespace partialwave
