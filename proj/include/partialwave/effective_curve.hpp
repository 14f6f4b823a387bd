#pragma once

// l-dependent effective potential V(r) + l(l+1)/(2r^2) sampled on a radial grid,
// with its wells and barrier located.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "partialwave/errors.hpp"
#include "partialwave/grid.hpp"
#include "partialwave/potential.hpp"

namespace partialwave {

struct CurveFeature {
  double r = 0.0;
  double value = 0.0;
  bool at_wall = false;  // sits on a hard core or a potential jump
};

class EffectiveCurve {
 public:
  EffectiveCurve(PotentialSpec potential, int ell) : potential_(std::move(potential)), ell_(ell) {
    if (ell < 0) throw PreconditionError("potential", "ell must be >= 0");
    if (auto core = potential_.hard_core_radius()) wall_ = Wall{*core, 0.0};
    if (auto jump = potential_.discontinuity()) {
      wall_ = Wall{*jump, eval_potential(potential_, *jump * (1.0 + 1e-9)).hartree};
    }
  }

  int ell() const { return ell_; }
  const PotentialSpec& potential() const { return potential_; }

  std::vector<double> r;
  std::vector<double> v_eff;
  std::optional<CurveFeature> inner_minimum;
  std::optional<CurveFeature> barrier;
  std::optional<CurveFeature> outer_minimum;

  /// V + l(l+1)/(2r^2); +infinity inside a hard core.
  double value(double radius) const { return bare(radius) + ell_ * (ell_ + 1.0) / (2.0 * radius * radius); }

  /// V + (l+1/2)^2/(2r^2), the Langer-corrected curve. At a wall the outside
  /// limit is used.
  double langer_value(double radius) const {
    const double lam = ell_ + 0.5;
    if (wall_ && radius <= wall_->radius) {
      return wall_->outside + lam * lam / (2.0 * wall_->radius * wall_->radius);
    }
    return bare(radius) + lam * lam / (2.0 * radius * radius);
  }

  /// Radius of a hard core or potential jump, if any.
  std::optional<double> wall_radius() const {
    if (wall_) return wall_->radius;
    return std::nullopt;
  }

  /// Outside limit of V at the wall.
  double wall_outside_potential() const { return wall_ ? wall_->outside : 0.0; }

 private:
  struct Wall {
    double radius;
    double outside;
  };

  double bare(double radius) const {
    const auto v = eval_potential(potential_, radius);
    if (v.forbidden) return std::numeric_limits<double>::infinity();
    return v.hartree;
  }

  PotentialSpec potential_;
  int ell_ = 0;
  std::optional<Wall> wall_;
};

namespace detail {

/// Vertex of the parabola through three points.
inline double parabola_vertex(double x0, double y0, double x1, double y1, double x2, double y2) {
  const double d1 = (y1 - y0) / (x1 - x0);
  const double d2 = (y2 - y1) / (x2 - x1);
  const double curvature = (d2 - d1) / (x2 - x0);
  if (curvature == 0.0) return x1;
  const double vertex = 0.5 * (x0 + x1) - d1 / (2.0 * curvature);
  return std::clamp(vertex, x0, x2);
}

}  // namespace detail

/// Samples V_eff on `grid` and finds extrema from sign changes of the discrete
/// derivative, refined by a parabola through the three nearest samples. A hard
/// core or an upward jump that V_eff falls away from is reported as a barrier at
/// the wall.
inline EffectiveCurve effective_curve(const PotentialSpec& spec, int ell, const RadialGrid& grid) {
  EffectiveCurve curve(spec, ell);
  const std::size_t n = grid.size();
  curve.r.assign(grid.radii().begin(), grid.radii().end());
  curve.v_eff.resize(n);
  for (std::size_t i = 0; i < n; ++i) curve.v_eff[i] = curve.value(curve.r[i]);
  const auto pin = grid.pinned_index();
  const auto& r = curve.r;
  const auto& v = curve.v_eff;

  struct Extremum {
    std::size_t index;
    CurveFeature feature;
    bool maximum;
  };
  std::vector<Extremum> found;

  if (grid.starts_at_hard_core() && n > 1 && v[1] < v[0]) {
    found.push_back({0, {r[0], v[0], true}, true});
  }
  const auto touches_pin = [&](std::size_t i) { return pin && (i + 1 == *pin || i == *pin || i == *pin + 1); };
  if (pin && *pin + 1 < n) {
    const std::size_t p = *pin;
    const double a = r[p];
    const double inside = curve.value(a * (1.0 - 1e-12));
    const double outside = curve.wall_outside_potential() + ell * (ell + 1.0) / (2.0 * a * a);
    if (outside > inside && v[p + 1] < outside) found.push_back({p, {a, outside, true}, true});
  }
  int last_sign = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (touches_pin(i) || touches_pin(i + 1)) {
      last_sign = 0;
      continue;
    }
    const double d = v[i + 1] - v[i];
    const int sign = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
    if (sign == 0) continue;
    if (last_sign != 0 && sign != last_sign) {
      const std::size_t c = i;
      const std::size_t lo = c - 1;
      const std::size_t hi = c + 1;
      const double rv = detail::parabola_vertex(r[lo], v[lo], r[c], v[c], r[hi], v[hi]);
      const bool maximum = last_sign > 0;
      double value = curve.value(rv);
      value = maximum ? std::max(value, v[c]) : std::min(value, v[c]);
      found.push_back({c, {rv, value, false}, maximum});
    }
    last_sign = sign;
  }
  std::sort(found.begin(), found.end(), [](const Extremum& a, const Extremum& b) { return a.index < b.index; });
  for (std::size_t k = 1; k < found.size(); ++k) {
    if (found[k].index - found[k - 1].index < 3) {
      throw PreconditionError("potential", "grid too coarse to resolve features near r = " +
                                               std::to_string(found[k].feature.r));
    }
  }

  std::optional<std::size_t> top;
  for (std::size_t k = 0; k < found.size(); ++k) {
    if (found[k].maximum && (!top || found[k].feature.value > found[*top].feature.value)) top = k;
  }
  const auto lowest_min = [&](std::size_t from, std::size_t to) {
    std::optional<CurveFeature> best;
    for (std::size_t k = from; k < to; ++k) {
      if (!found[k].maximum && (!best || found[k].feature.value < best->value)) best = found[k].feature;
    }
    return best;
  };
  if (top) {
    curve.barrier = found[*top].feature;
    curve.inner_minimum = lowest_min(0, *top);
    curve.outer_minimum = lowest_min(*top + 1, found.size());
  } else {
    curve.inner_minimum = lowest_min(0, found.size());
  }
  return curve;
}

}  // namespace partialwave
