#pragma once

// Spherical Bessel functions for partial-wave matching. j is generated by
// downward (Miller) recurrence, y and the decaying modified function k by
// upward recurrence, each in its stable direction.

#include <algorithm>
#include <cmath>
#include <vector>

#include "partialwave/errors.hpp"

namespace partialwave::special {

/// j_0..j_lmax at x >= 0.
inline std::vector<double> sph_j_array(int lmax, double x) {
  if (lmax < 0) throw PreconditionError("special", "negative order");
  if (x < 0.0) throw PreconditionError("special", "negative argument");
  std::vector<double> out(static_cast<std::size_t>(lmax) + 1, 0.0);
  if (x == 0.0) {
    out[0] = 1.0;
    return out;
  }
  const int top = std::max(lmax, static_cast<int>(x)) + 20 +
                  static_cast<int>(std::sqrt(40.0 * (std::max(lmax, static_cast<int>(x)) + 1)));
  double above = 0.0;
  double current = 1e-300;
  for (int n = top; n > 0; --n) {
    const double below = (2.0 * n + 1.0) / x * current - above;
    above = current;
    current = below;
    if (n - 1 <= lmax) out[static_cast<std::size_t>(n - 1)] = current;
    if (std::abs(current) > 1e250) {
      current *= 1e-250;
      above *= 1e-250;
      for (int m = std::max(n - 1, 0); m <= lmax; ++m) out[static_cast<std::size_t>(m)] *= 1e-250;
    }
  }
  // Normalize against whichever closed form has the larger magnitude.
  const double j0 = std::sin(x) / x;
  const double j1 = std::sin(x) / (x * x) - std::cos(x) / x;
  double scale = j0 / out[0];
  if (lmax >= 1 && std::abs(j1) > std::abs(j0)) scale = j1 / out[1];
  for (double& v : out) v *= scale;
  return out;
}

/// y_0..y_lmax (spherical Neumann functions, y_0 = -cos x / x) at x > 0.
inline std::vector<double> sph_y_array(int lmax, double x) {
  if (lmax < 0) throw PreconditionError("special", "negative order");
  if (!(x > 0.0)) throw PreconditionError("special", "spherical Neumann function needs x > 0");
  std::vector<double> out(static_cast<std::size_t>(lmax) + 1);
  out[0] = -std::cos(x) / x;
  if (lmax >= 1) out[1] = -std::cos(x) / (x * x) - std::sin(x) / x;
  for (int n = 1; n < lmax; ++n) {
    out[static_cast<std::size_t>(n + 1)] =
        (2.0 * n + 1.0) / x * out[static_cast<std::size_t>(n)] - out[static_cast<std::size_t>(n - 1)];
  }
  return out;
}

inline double sph_j(int ell, double x) { return sph_j_array(ell, x).back(); }
inline double sph_y(int ell, double x) { return sph_y_array(ell, x).back(); }

/// Riccati-Bessel pair jhat = x j_l(x), nhat = x y_l(x) and their x-derivatives.
/// The Wronskian jhat * nhat' - jhat' * nhat equals 1.
struct RiccatiValues {
  double j = 0.0;
  double dj = 0.0;
  double n = 0.0;
  double dn = 0.0;
};

inline RiccatiValues riccati(int ell, double x) {
  if (!(x > 0.0)) throw PreconditionError("special", "Riccati functions need x > 0");
  const auto j = sph_j_array(ell + 1, x);
  const auto y = sph_y_array(ell + 1, x);
  const auto l = static_cast<std::size_t>(ell);
  // f'_l = f_{l-1} - (l+1)/x f_l, with f'_0 = -f_1
  const double djl = ell == 0 ? -j[1] : j[l - 1] - (ell + 1.0) / x * j[l];
  const double dyl = ell == 0 ? -y[1] : y[l - 1] - (ell + 1.0) / x * y[l];
  return {x * j[l], j[l] + x * djl, x * y[l], y[l] + x * dyl};
}

/// exp(x) k_0..k_lmax(x), the exponentially scaled decaying modified spherical
/// Bessel functions with k_0 = exp(-x)/x.
inline std::vector<double> scaled_sph_k_array(int lmax, double x) {
  if (!(x > 0.0)) throw PreconditionError("special", "modified Bessel function needs x > 0");
  std::vector<double> out(static_cast<std::size_t>(lmax) + 2);
  out[0] = 1.0 / x;
  out[1] = (1.0 + 1.0 / x) / x;
  for (int n = 1; n <= lmax; ++n) {
    out[static_cast<std::size_t>(n + 1)] =
        out[static_cast<std::size_t>(n - 1)] + (2.0 * n + 1.0) / x * out[static_cast<std::size_t>(n)];
  }
  out.resize(static_cast<std::size_t>(lmax) + 1);
  return out;
}

/// d/dr ln u for the decaying solution u(r) = r k_l(kappa r) of the free radial
/// equation at energy -kappa^2/2.
inline double decaying_log_derivative(int ell, double kappa, double r) {
  const double x = kappa * r;
  const auto k = scaled_sph_k_array(ell + 1, x);
  const auto l = static_cast<std::size_t>(ell);
  // k'_l = -k_{l-1} - (l+1)/x k_l, k'_0 = -k_1; linear, so the exp(x) scale cancels
  const double dk = ell == 0 ? -k[1] : -k[l - 1] - (ell + 1.0) / x * k[l];
  return 1.0 / r + kappa * dk / k[l];
}

/// u(r2)/u(r1) for the decaying free solution u = r k_l(kappa r).
inline double decaying_ratio(int ell, double kappa, double r1, double r2) {
  const double k1 = scaled_sph_k_array(ell, kappa * r1).back();
  const double k2 = scaled_sph_k_array(ell, kappa * r2).back();
  return (r2 * k2) / (r1 * k1) * std::exp(-kappa * (r2 - r1));
}

}  // namespace partialwave::special
