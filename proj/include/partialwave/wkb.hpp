#pragma once

// JWKB quantities for a barrier in the Langer-corrected effective potential:
// turning points, action, tunneling probability, Gamow factor and the
// imaginary-velocity traversal time.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "partialwave/effective_curve.hpp"
#include "partialwave/errors.hpp"
#include "partialwave/units.hpp"

namespace partialwave {

struct BarrierSegment {
  int ell = 0;
  double energy = 0.0;
  double r_inner = 0.0;
  double r_outer = 0.0;
  double action = 0.0;
  std::function<double(double)> excess;  // V_L(r) - E
};

namespace detail {

inline constexpr double turning_point_tolerance = 1e-10;

/// Integral of f over the segment with r = r_in + s^2 and r = r_out - s^2 on the
/// two halves, which removes square-root endpoint behavior.
inline double segment_integral(const std::function<double(double)>& f, double r_in, double r_out,
                               unsigned max_depth = 12) {
  using boost::math::quadrature::gauss_kronrod;
  const double mid = 0.5 * (r_in + r_out);
  const double s_in = std::sqrt(mid - r_in);
  const double s_out = std::sqrt(r_out - mid);
  const auto inner = [&](double s) { return 2.0 * s * f(r_in + s * s); };
  const auto outer = [&](double s) { return 2.0 * s * f(r_out - s * s); };
  const double a = gauss_kronrod<double, 31>::integrate(inner, 0.0, s_in, max_depth, 1e-13);
  const double b = gauss_kronrod<double, 31>::integrate(outer, 0.0, s_out, max_depth, 1e-13);
  return a + b;
}

inline double bisect_root(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 400 && hi - lo > 0.01 * turning_point_tolerance; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Builds a segment from explicit turning points and excess function, checking
/// that the excess is positive inside and computing the action.
inline BarrierSegment make_segment(int ell, double energy, double r_inner, double r_outer,
                                   std::function<double(double)> excess) {
  if (!(r_inner < r_outer)) throw PreconditionError("wkb", "segment needs r_inner < r_outer");
  for (int j = 1; j <= 5; ++j) {
    const double rj = r_inner + (r_outer - r_inner) * j / 6.0;
    if (!(excess(rj) > 0.0)) {
      throw NumericalError("wkb", "V_eff does not exceed E inside the segment at r = " + std::to_string(rj));
    }
  }
  BarrierSegment seg;
  seg.ell = ell;
  seg.energy = energy;
  seg.r_inner = r_inner;
  seg.r_outer = r_outer;
  seg.excess = std::move(excess);
  const auto& ex = seg.excess;
  seg.action = detail::segment_integral([&](double r) { return std::sqrt(2.0 * std::max(0.0, ex(r))); }, r_inner,
                                        r_outer);
  return seg;
}

/// Peak of the Langer-corrected curve near the barrier feature.
inline CurveFeature langer_barrier_top(const EffectiveCurve& curve) {
  if (!curve.barrier) throw PreconditionError("wkb", "barrier feature absent");
  if (curve.barrier->at_wall) {
    const double a = curve.barrier->r;
    return {a, curve.langer_value(a), true};
  }
  // golden-section search between the neighbouring features
  double lo = curve.inner_minimum ? curve.inner_minimum->r : curve.r.front();
  double hi = curve.outer_minimum ? curve.outer_minimum->r : curve.r.back();
  if (auto wall = curve.wall_radius()) lo = std::max(lo, *wall);
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  double f1 = curve.langer_value(x1);
  double f2 = curve.langer_value(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
    if (f1 > f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = curve.langer_value(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = curve.langer_value(x2);
    }
  }
  const double r_top = 0.5 * (lo + hi);
  return {r_top, curve.langer_value(r_top), false};
}

/// Barrier segment at energy E: turning points of the Langer curve on either
/// side of its peak, refined by bisection. A wall the curve falls away from is
/// the inner end when E lies below the wall value.
inline BarrierSegment barrier_segment(const EffectiveCurve& curve, double energy) {
  const CurveFeature top = langer_barrier_top(curve);
  if (!(energy < top.value)) {
    throw PreconditionError("wkb", "no barrier at this energy: E >= V_B = " + std::to_string(top.value));
  }
  std::function<double(double)> excess = [&curve, energy](double r) { return curve.langer_value(r) - energy; };
  const auto& r = curve.r;
  const std::size_t n = r.size();
  const std::size_t i_top =
      static_cast<std::size_t>(std::lower_bound(r.begin(), r.end(), top.r) - r.begin());

  double r_inner = 0.0;
  if (top.at_wall) {
    r_inner = top.r;
  } else {
    std::size_t i = std::min(i_top, n - 1);
    if (i > 0 && r[i] >= top.r) --i;
    while (i > 0 && excess(r[i]) > 0.0) --i;
    const auto wall = curve.wall_radius();
    if (excess(r[i]) > 0.0 || (wall && r[i] <= *wall)) {
      if (!wall) throw NumericalError("wkb", "inner turning point not found on the grid");
      r_inner = std::max(*wall, r[i]);
      if (excess(r_inner * (1.0 + 1e-12)) <= 0.0) {
        r_inner = detail::bisect_root(excess, r_inner * (1.0 + 1e-12), r[std::min(i + 1, n - 1)]);
      }
    } else {
      r_inner = detail::bisect_root(excess, r[i], std::min(r[i + 1], top.r));
    }
  }

  double lo = top.r;
  double hi = lo;
  std::size_t j = i_top;
  while (j < n && excess(r[j]) > 0.0) ++j;
  if (j < n) {
    hi = r[j];
    lo = std::max(top.r, j > 0 ? r[j - 1] : top.r);
  } else {
    lo = r.back();
    hi = lo;
    int guard = 0;
    while (excess(hi) > 0.0) {
      lo = hi;
      hi *= 1.5;
      if (++guard > 400) throw NumericalError("wkb", "outer turning point not found");
    }
  }
  const double r_outer = detail::bisect_root(excess, lo, hi);
  return make_segment(curve.ell(), energy, r_inner, r_outer, std::move(excess));
}

/// T = exp(-2 S).
inline double tunneling_probability(const BarrierSegment& segment) { return std::exp(-2.0 * segment.action); }

/// exp(-c / sqrt(E)) with c = pi sqrt(2) z: the JWKB penetration factor of the
/// repulsive Coulomb barrier z/r, since the action from 0 to z/E is
/// sqrt(2) * pi z / (2 sqrt(E)).
inline double gamow_factor(double z_product, double energy) {
  if (!(z_product > 0.0)) throw PreconditionError("wkb", "Gamow factor needs z_product > 0");
  if (!(energy > 0.0)) throw PreconditionError("wkb", "Gamow factor needs E > 0");
  return std::exp(-pi * std::sqrt(2.0) * z_product / std::sqrt(energy));
}

struct TraversalTime {
  double time_au = 0.0;
  double time_attosec = 0.0;
};

/// Integral of dr / sqrt(2 (V_L - E)) across the segment. With r = r_t +- s^2
/// the integrand is 2 / sqrt(2 (V_L - E) / s^2); the ratio is replaced by its
/// linear limit within 1e-8 of the segment width from a turning point, where the
/// excess is all round-off.
inline TraversalTime traversal_time(const BarrierSegment& segment) {
  using boost::math::quadrature::gauss_kronrod;
  const auto& ex = segment.excess;
  const double r_in = segment.r_inner;
  const double r_out = segment.r_outer;
  const double near = 1e-8 * (r_out - r_in);
  const double slope_in = ex(r_in + near) / near;
  const double slope_out = ex(r_out - near) / near;
  const auto side = [&](double s, double r, double slope) {
    const double q = s * s > near ? ex(r) / (s * s) : slope;
    return q > 0.0 ? 2.0 / std::sqrt(2.0 * q) : 0.0;
  };
  const double mid = 0.5 * (r_in + r_out);
  const double a = gauss_kronrod<double, 31>::integrate(
      [&](double s) { return side(s, r_in + s * s, slope_in); }, 0.0, std::sqrt(mid - r_in), 12, 1e-13);
  const double b = gauss_kronrod<double, 31>::integrate(
      [&](double s) { return side(s, r_out - s * s, slope_out); }, 0.0, std::sqrt(r_out - mid), 12, 1e-13);
  const double t = a + b;
  return {t, to_attoseconds(t)};
}

}  // namespace partialwave
