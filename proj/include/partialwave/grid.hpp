#pragma once

// Radial grids uniform in a mapped coordinate x. LogThenUniform uses
// x = r + r_switch * ln r, which is logarithmic for r << r_switch and uniform
// for r >> r_switch. The radial equation is integrated in x after the
// substitution u = sqrt(dr/dx) w.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "partialwave/errors.hpp"
#include "partialwave/potential.hpp"

namespace partialwave {

enum class GridScheme { Uniform, LogThenUniform };

struct GridSpec {
  double r_max = 50.0;
  int n_points = 20000;
  GridScheme scheme = GridScheme::LogThenUniform;
  double r_switch = 0.1;
  double r_min = 1e-6;
};

class RadialGrid {
 public:
  /// Realizes `spec` for `potential`: a hard core becomes the first node and a
  /// jump discontinuity is placed exactly on a node.
  RadialGrid(const GridSpec& spec, const PotentialSpec& potential) : spec_(spec) {
    if (spec.n_points < 64) throw PreconditionError("radialsolver", "grid needs n_points >= 64");
    if (!(spec.r_max > 0.0)) throw PreconditionError("radialsolver", "grid r_max must be > 0");
    if (spec.scheme == GridScheme::LogThenUniform && !(spec.r_switch > 0.0)) {
      throw PreconditionError("radialsolver", "grid r_switch must be > 0");
    }
    if (!(spec.r_min > 0.0)) throw PreconditionError("radialsolver", "grid r_min must be > 0");
    const auto n = static_cast<std::size_t>(spec.n_points);
    const auto core = potential.hard_core_radius();
    double start = 0.0;
    if (core) {
      start = *core;
    } else if (spec.scheme == GridScheme::Uniform) {
      start = spec.r_max / spec.n_points;
    } else {
      start = std::max(spec.r_min, potential.min_radius());
    }
    if (!(spec.r_max > start)) throw PreconditionError("radialsolver", "grid r_max must exceed the first radius");
    x0_ = to_x(start);
    dx_ = (to_x(spec.r_max) - x0_) / static_cast<double>(n - 1);
    hard_core_ = core.has_value();
    if (auto jump = potential.discontinuity(); jump && !core && *jump > start && *jump < spec.r_max) {
      const double xj = to_x(*jump);
      const double steps = std::floor((xj - x0_) / dx_);
      if (steps >= 2.0) {
        x0_ = xj - steps * dx_;
        pin_ = Pin{static_cast<std::size_t>(steps), *jump};
      }
    }
    fill(n, core ? std::optional<double>(*core) : std::nullopt);
  }

  std::size_t size() const { return r_.size(); }
  double r(std::size_t i) const { return r_[i]; }
  std::span<const double> radii() const { return r_; }
  double r_max() const { return r_.back(); }
  double step() const { return dx_; }
  GridScheme scheme() const { return spec_.scheme; }
  const GridSpec& spec() const { return spec_; }
  bool starts_at_hard_core() const { return hard_core_; }

  /// dr/dx at node i.
  double jacobian(std::size_t i) const { return jac_[i]; }

  /// (3/4)(r''/r')^2 - (1/2) r'''/r', the term added to the transformed equation.
  double mapping_term(std::size_t i) const { return mapping_[i]; }

  /// r''/r' at node i.
  double jacobian_ratio(std::size_t i) const {
    if (spec_.scheme == GridScheme::Uniform) return 0.0;
    const double s = r_[i] + spec_.r_switch;
    return spec_.r_switch / (s * s);
  }

  /// Node placed on a potential discontinuity, if any.
  std::optional<std::size_t> pinned_index() const {
    if (pin_) return pin_->index;
    return std::nullopt;
  }

  /// First node with radius >= r, or size() if none.
  std::size_t index_at_or_above(double radius) const {
    return static_cast<std::size_t>(std::lower_bound(r_.begin(), r_.end(), radius) - r_.begin());
  }

  /// Same nodes, continued past r_max until at least `radius` is covered.
  RadialGrid extended_to(double radius) const {
    if (radius <= r_max()) return *this;
    RadialGrid out = *this;
    const double extra = std::ceil((to_x(radius) - to_x(r_max())) / dx_);
    const std::size_t n = size() + static_cast<std::size_t>(std::max(1.0, extra));
    out.fill(n, hard_core_ ? std::optional<double>(r_.front()) : std::nullopt);
    out.spec_.r_max = out.r_max();
    out.spec_.n_points = static_cast<int>(n);
    return out;
  }

  /// True when the nodes of the shorter grid coincide with a prefix of the longer one.
  bool shares_nodes_with(const RadialGrid& other) const {
    return spec_.scheme == other.spec_.scheme && spec_.r_switch == other.spec_.r_switch && x0_ == other.x0_ &&
           dx_ == other.dx_;
  }

  /// Integral of f(r) dr over nodes [first, last] (composite Simpson in x).
  double integrate(std::span<const double> f, std::size_t first, std::size_t last) const {
    if (last <= first) return 0.0;
    double sum = 0.0;
    std::size_t i = first;
    const auto g = [&](std::size_t k) { return f[k] * jac_[k]; };
    for (; i + 2 <= last; i += 2) sum += (g(i) + 4.0 * g(i + 1) + g(i + 2)) / 3.0;
    if (i < last) sum += 0.5 * (g(i) + g(i + 1));
    return sum * dx_;
  }

  double to_x(double radius) const {
    if (spec_.scheme == GridScheme::Uniform) return radius;
    return radius + spec_.r_switch * std::log(radius);
  }

  double to_r(double x) const {
    if (spec_.scheme == GridScheme::Uniform) return x;
    // Newton on f(t) = e^t + beta t - x, convex and increasing; both starts lie
    // right of the root, so iterates decrease monotonically onto it.
    const double beta = spec_.r_switch;
    double t = x / beta;
    if (x >= 1.0) t = std::min(t, std::log(x));
    for (int it = 0; it < 200; ++it) {
      const double et = std::exp(t);
      const double dt = (et + beta * t - x) / (et + beta);
      t -= dt;
      if (std::abs(dt) <= 1e-16 * std::max(1.0, std::abs(t))) break;
    }
    return std::exp(t);
  }

 private:
  struct Pin {
    std::size_t index;
    double radius;
  };

  void fill(std::size_t n, std::optional<double> core) {
    r_.resize(n);
    jac_.resize(n);
    mapping_.resize(n);
    const double beta = spec_.r_switch;
    for (std::size_t i = 0; i < n; ++i) {
      double radius = to_r(x0_ + static_cast<double>(i) * dx_);
      if (i == 0 && core) radius = *core;
      if (pin_ && i == pin_->index) radius = pin_->radius;
      r_[i] = radius;
      if (spec_.scheme == GridScheme::Uniform) {
        jac_[i] = 1.0;
        mapping_[i] = 0.0;
      } else {
        const double s = radius + beta;
        jac_[i] = radius / s;
        mapping_[i] = (0.25 * beta * beta + beta * radius) / (s * s * s * s);
      }
    }
  }

  GridSpec spec_;
  double x0_ = 0.0;
  double dx_ = 0.0;
  bool hard_core_ = false;
  std::optional<Pin> pin_;
  std::vector<double> r_;
  std::vector<double> jac_;
  std::vector<double> mapping_;
};

}  // namespace partialwave
