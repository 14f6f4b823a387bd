#pragma once

// Outward Numerov integration of u'' = [2(V - E) + l(l+1)/r^2] u on a mapped
// grid, and bound states by node-count bracketing plus matching to the
// decaying free solution.

#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "partialwave/errors.hpp"
#include "partialwave/grid.hpp"
#include "partialwave/potential.hpp"
#include "partialwave/special.hpp"
#include "partialwave/units.hpp"

namespace partialwave {

/// Reduced radial function u(r) = r R(r) sampled on grid nodes [0, u.size()).
struct RadialSolution {
  int ell = 0;
  double energy = 0.0;
  std::shared_ptr<const RadialGrid> grid;
  std::vector<double> u;
  std::vector<double> w;  // u / sqrt(dr/dx)
  std::vector<double> g;  // w'' = g w
  int node_count = 0;

  std::size_t size() const { return u.size(); }

  /// du/dr at interior node i, fourth order in the grid step.
  double derivative(std::size_t i) const {
    if (i == 0 || i + 1 >= w.size()) throw PreconditionError("radialsolver", "derivative needs interior node");
    const double h = grid->step();
    const double h2 = h * h;
    const double dw = (w[i + 1] * (1.0 - h2 * g[i + 1] / 6.0) - w[i - 1] * (1.0 - h2 * g[i - 1] / 6.0)) / (2.0 * h);
    return (dw + 0.5 * grid->jacobian_ratio(i) * w[i]) / std::sqrt(grid->jacobian(i));
  }
};

/// A potential sampled on a grid, ready for repeated integration at many energies.
class RadialProblem {
 public:
  RadialProblem(PotentialSpec potential, const RadialGrid& grid)
      : potential_(std::move(potential)), grid_(std::make_shared<const RadialGrid>(grid)) {
    v_.resize(grid_->size());
    for (std::size_t i = 0; i < grid_->size(); ++i) {
      const auto value = eval_potential(potential_, grid_->r(i));
      v_[i] = value.forbidden ? 0.0 : value.hartree;
    }
    // A jump in V sits on a node; both sides are constant near it.
    if (auto p = grid_->pinned_index(); p && potential_.discontinuity() && *p + 1 < grid_->size()) {
      const double a = *potential_.discontinuity();
      jump_ = Jump{*p, eval_potential(potential_, a * (1.0 - 1e-9)).hartree,
                   eval_potential(potential_, a * (1.0 + 1e-9)).hartree};
      v_[*p] = jump_->outside;
    }
  }

  const PotentialSpec& potential() const { return potential_; }
  const RadialGrid& grid() const { return *grid_; }
  std::shared_ptr<const RadialGrid> shared_grid() const { return grid_; }

  /// Regular solution on nodes [0, last]. Starts from u = r^(l+1) (or u(a) = 0 at a
  /// hard core), times start_scale.
  RadialSolution integrate(int ell, double energy, std::size_t last, double start_scale = 1.0) const {
    if (ell < 0) throw PreconditionError("radialsolver", "ell must be >= 0");
    if (last >= grid_->size()) last = grid_->size() - 1;
    if (last < 2) throw PreconditionError("radialsolver", "integration range too short");
    const RadialGrid& grid = *grid_;
    const std::size_t n = last + 1;
    RadialSolution sol;
    sol.ell = ell;
    sol.energy = energy;
    sol.grid = grid_;
    sol.u.resize(n);
    sol.w.resize(n);
    sol.g.resize(n);
    const double h = grid.step();
    const double h2 = h * h;
    const double centrifugal = ell * (ell + 1.0);
    const double min_wavelength_steps = 6.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = grid.r(i);
      const double jac = grid.jacobian(i);
      const double gi = jac * jac * (2.0 * (v_[i] - energy) + centrifugal / (r * r)) + grid.mapping_term(i);
      sol.g[i] = gi;
      if (gi < 0.0 && 2.0 * pi / std::sqrt(-gi) < min_wavelength_steps * h) {
        throw NumericalError("radialsolver", "step-size instability: local wavelength below 6 grid steps at r = " +
                                                 std::to_string(r));
      }
      if (1.0 - h2 * gi / 12.0 <= 0.0) {
        throw NumericalError("radialsolver", "step-size instability: grid too coarse in forbidden region");
      }
    }
    auto& w = sol.w;
    if (grid.starts_at_hard_core()) {
      w[0] = 0.0;
      w[1] = start_scale * (grid.r(1) - grid.r(0)) / std::sqrt(grid.jacobian(1));
    } else {
      // u = r^(l+1) up to a constant, taken relative to r_1 so high l cannot underflow
      for (std::size_t i = 0; i < 2; ++i) {
        w[i] = start_scale * std::pow(grid.r(i) / grid.r(1), ell + 1) / std::sqrt(grid.jacobian(i));
      }
    }
    constexpr double guard = 1e100;
    const double shrink = std::ldexp(1.0, -332);
    int nodes = 0;
    int last_sign = w[1] > 0.0 ? 1 : (w[1] < 0.0 ? -1 : 0);
    // Inside-potential value of g at the jump node (g[p] holds the outside value).
    const auto g_inside = [&](std::size_t i) {
      const double r = grid.r(i);
      const double jac = grid.jacobian(i);
      return jac * jac * (2.0 * (jump_->inside - energy) + centrifugal / (r * r)) + grid.mapping_term(i);
    };
    // Summed form: y = (1 - h^2 g / 12) w and its first difference are carried
    // separately, so round-off does not build up in the slope at small k h.
    const auto weight = [&](std::size_t i) { return 1.0 - h2 * sol.g[i] / 12.0; };
    double y = weight(1) * w[1];
    double dy = y - weight(0) * w[0];
    for (std::size_t i = 1; i + 1 < n; ++i) {
      double next = 0.0;
      if (jump_ && i + 1 == jump_->index) {
        next = (2.0 * w[i] * (1.0 + 5.0 * h2 * sol.g[i] / 12.0) - w[i - 1] * weight(i - 1)) /
               (1.0 - h2 * g_inside(i + 1) / 12.0);
      } else if (jump_ && i == jump_->index) {
        next = step_across_jump(sol, i, g_inside(i), g_inside(i + 1), energy, centrifugal);
        y = weight(i + 1) * next;
        dy = y - weight(i) * w[i];
      } else {
        dy += h2 * sol.g[i] * w[i];
        y += dy;
        next = y / weight(i + 1);
      }
      w[i + 1] = next;
      const int sign = next > 0.0 ? 1 : (next < 0.0 ? -1 : 0);
      if (sign != 0) {
        if (last_sign != 0 && sign != last_sign) ++nodes;
        last_sign = sign;
      }
      if (std::abs(next) > guard) {
        for (std::size_t k = 0; k <= i + 1; ++k) w[k] *= shrink;
        y *= shrink;
        dy *= shrink;
      }
    }
    for (std::size_t i = 0; i < n; ++i) sol.u[i] = w[i] * std::sqrt(grid.jacobian(i));
    sol.node_count = nodes;
    return sol;
  }

  /// Reduced radial function on nodes [first, last] from inward Numerov
  /// integration, started from the decaying free solution at `last`. Entry i
  /// belongs to node first + i; the overall scale is arbitrary.
  std::vector<double> integrate_inward(int ell, double energy, std::size_t first, std::size_t last) const {
    const RadialGrid& grid = *grid_;
    if (last >= grid.size() || last < first + 2) throw PreconditionError("radialsolver", "bad inward range");
    if (!(energy < 0.0)) throw PreconditionError("radialsolver", "inward integration needs E < 0");
    const double kappa = std::sqrt(-2.0 * energy);
    const double h = grid.step();
    const double h2 = h * h;
    const double centrifugal = ell * (ell + 1.0);
    const std::size_t n = last - first + 1;
    std::vector<double> g(n);
    std::vector<double> w(n);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t i = first + k;
      const double r = grid.r(i);
      const double jac = grid.jacobian(i);
      g[k] = jac * jac * (2.0 * (v_[i] - energy) + centrifugal / (r * r)) + grid.mapping_term(i);
    }
    w[n - 1] = 1.0 / std::sqrt(grid.jacobian(last));
    w[n - 2] = special::decaying_ratio(ell, kappa, grid.r(last), grid.r(last - 1)) / std::sqrt(grid.jacobian(last - 1));
    constexpr double guard = 1e100;
    const double shrink = std::ldexp(1.0, -332);
    for (std::size_t k = n - 2; k-- > 0;) {
      w[k] = (2.0 * w[k + 1] * (1.0 + 5.0 * h2 * g[k + 1] / 12.0) - w[k + 2] * (1.0 - h2 * g[k + 2] / 12.0)) /
             (1.0 - h2 * g[k] / 12.0);
      if (std::abs(w[k]) > guard) {
        for (std::size_t j = k; j < n; ++j) w[j] *= shrink;
      }
    }
    for (std::size_t k = 0; k < n; ++k) w[k] *= std::sqrt(grid.jacobian(first + k));
    return w;
  }

 private:
  struct Jump {
    std::size_t index;
    double inside;
    double outside;
  };

  // w at node p+1 from continuity of w and w' at the jump node p. The inside
  // solution is continued one step as a ghost to get w'(p); the outside values
  // then follow from the Numerov relation and the derivative formula, solved
  // together for w(p+1) and an outside ghost at p-1.
  double step_across_jump(const RadialSolution& sol, std::size_t p, double g_in_p, double g_in_next, double energy,
                          double centrifugal) const {
    const RadialGrid& grid = *grid_;
    const auto& w = sol.w;
    const double h = grid.step();
    const double h2 = h * h;
    const double ghost_in = (2.0 * w[p] * (1.0 + 5.0 * h2 * g_in_p / 12.0) -
                             w[p - 1] * (1.0 - h2 * sol.g[p - 1] / 12.0)) /
                            (1.0 - h2 * g_in_next / 12.0);
    const double dw = ghost_in * (1.0 - h2 * g_in_next / 6.0) - w[p - 1] * (1.0 - h2 * sol.g[p - 1] / 6.0);
    const double r_prev = grid.r(p - 1);
    const double jac_prev = grid.jacobian(p - 1);
    const double g_out_prev = jac_prev * jac_prev * (2.0 * (jump_->outside - energy) + centrifugal / (r_prev * r_prev)) +
                              grid.mapping_term(p - 1);
    const double a1 = 1.0 - h2 * sol.g[p + 1] / 12.0;
    const double b1 = 1.0 - h2 * g_out_prev / 12.0;
    const double a2 = 1.0 - h2 * sol.g[p + 1] / 6.0;
    const double b2 = 1.0 - h2 * g_out_prev / 6.0;
    const double c = 2.0 * w[p] * (1.0 + 5.0 * h2 * sol.g[p] / 12.0);
    return (c * b2 + dw * b1) / (a1 * b2 + a2 * b1);
  }

  PotentialSpec potential_;
  std::shared_ptr<const RadialGrid> grid_;
  std::vector<double> v_;
  std::optional<Jump> jump_;
};

/// Regular solution over the whole grid.
inline RadialSolution integrate_regular(const PotentialSpec& spec, int ell, double energy, const RadialGrid& grid) {
  return RadialProblem(spec, grid).integrate(ell, energy, grid.size() - 1);
}

struct EnergyWindow {
  double lo = 0.0;
  double hi = 0.0;
};

/// Normalized bound state (integral of u^2 dr is 1), positive near the origin.
struct BoundState {
  int n_radial = 0;
  int ell = 0;
  double energy = 0.0;
  std::shared_ptr<const RadialGrid> grid;
  std::vector<double> u;  // on every node of *grid
  double matching_radius = 0.0;

  double kappa() const { return std::sqrt(-2.0 * energy); }
};

struct BoundSearchOptions {
  GridSpec grid{};
  double tolerance = 1e-10;
  double start_scale = 1.0;
};

namespace detail {

inline double bisect_predicate(double lo, double hi, double tol, auto&& above) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (above(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Bound states of angular momentum `ell` with energies in `window`, sorted by energy.
inline std::vector<BoundState> find_bound_states(const PotentialSpec& spec, int ell, EnergyWindow window, int n_max,
                                                 const BoundSearchOptions& options = {}) {
  if (ell < 0) throw PreconditionError("radialsolver", "ell must be >= 0");
  if (!(window.lo < window.hi)) throw PreconditionError("radialsolver", "energy window must satisfy E_lo < E_hi");
  if (!(window.hi < 0.0)) {
    throw PreconditionError("radialsolver", "energy window must end below zero (E_hi = 0 needs a kappa floor)");
  }
  const double range = spec.range_radius();
  const double kappa_hi = std::sqrt(-2.0 * window.hi);
  const double match_far = std::max(range, 10.0 / kappa_hi);
  GridSpec gs = options.grid;
  RadialGrid base(gs, spec);
  RadialGrid grid = base.extended_to(match_far + 30.0 / kappa_hi);
  const RadialProblem problem(spec, grid);
  const std::size_t m_far = std::min(grid.index_at_or_above(match_far), grid.size() - 2);

  const auto count = [&](double e) { return problem.integrate(ell, e, m_far, options.start_scale).node_count; };
  const int n_lo = count(window.lo);
  const int n_hi = count(window.hi);
  if (n_hi <= n_lo) return {};
  if (n_hi - n_lo > n_max) {
    throw PreconditionError("radialsolver", "n_max exceeded: " + std::to_string(n_hi - n_lo) +
                                                " states in window, " + std::to_string(n_max) + " requested");
  }

  // Energies at which the node count at the far matching radius steps up.
  std::vector<double> jumps;
  double lo = window.lo;
  for (int target = n_lo; target < n_hi; ++target) {
    const double jump =
        detail::bisect_predicate(lo, window.hi, options.tolerance, [&](double e) { return count(e) > target; });
    jumps.push_back(jump);
    lo = jump;
  }

  std::vector<BoundState> states;
  for (std::size_t t = 0; t < jumps.size(); ++t) {
    const double a = t == 0 ? window.lo : 0.5 * (jumps[t - 1] + jumps[t]);
    const double b = t + 1 == jumps.size() ? window.hi : 0.5 * (jumps[t] + jumps[t + 1]);
    const double kappa_est = std::sqrt(-2.0 * jumps[t]);
    const double r_match = std::max(range, 10.0 / kappa_est);
    const std::size_t m = std::min(grid.index_at_or_above(r_match), grid.size() - 2);
    const double rm = grid.r(m);
    const auto mismatch = [&](double e) {
      const auto sol = problem.integrate(ell, e, m + 1, options.start_scale);
      const double kappa = std::sqrt(-2.0 * e);
      return sol.derivative(m) - special::decaying_log_derivative(ell, kappa, rm) * sol.u[m];
    };
    const double wa = mismatch(a);
    const double wb = mismatch(b);
    double energy = jumps[t];
    if (wa * wb < 0.0) {
      const bool rising = wb > 0.0;
      energy = detail::bisect_predicate(a, b, options.tolerance,
                                        [&](double e) { return (mismatch(e) > 0.0) == rising; });
    }
    // Outward solution up to the outermost classically allowed node (not
    // before a potential jump), inward decaying solution beyond it.
    const auto sol = problem.integrate(ell, energy, m + 1, options.start_scale);
    std::size_t c = 2;
    for (std::size_t i = 2; i <= m; ++i) {
      if (sol.g[i] < 0.0) c = i;
    }
    if (auto p = grid.pinned_index(); p && *p <= m) c = std::max(c, *p);
    c = std::min(c, m);
    // the long outward run may have rescaled the prefix towards underflow
    const auto inner = problem.integrate(ell, energy, c + 1, options.start_scale);
    const auto tail = problem.integrate_inward(ell, energy, c, grid.size() - 1);
    BoundState state;
    state.ell = ell;
    state.energy = energy;
    state.grid = problem.shared_grid();
    state.matching_radius = rm;
    state.u.assign(grid.size(), 0.0);
    for (std::size_t i = 0; i <= c; ++i) state.u[i] = inner.u[i];
    const double join = inner.u[c] / tail[0];
    for (std::size_t i = c + 1; i < grid.size(); ++i) state.u[i] = tail[i - c] * join;
    const int expected = n_lo + static_cast<int>(t);
    int nodes = 0;
    int last_sign = 0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
      const int sign = state.u[i] > 0.0 ? 1 : (state.u[i] < 0.0 ? -1 : 0);
      if (sign != 0) {
        if (last_sign != 0 && sign != last_sign) ++nodes;
        last_sign = sign;
      }
    }
    if (nodes != expected) {
      throw NumericalError("radialsolver", "bound state near E = " + std::to_string(energy) + " has " +
                                               std::to_string(nodes) + " nodes, expected " +
                                               std::to_string(expected));
    }
    state.n_radial = nodes;
    std::vector<double> density(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) density[i] = state.u[i] * state.u[i];
    const double norm = std::sqrt(grid.integrate(density, 0, grid.size() - 1));
    const double sign = state.u[1] < 0.0 ? -1.0 : 1.0;
    for (double& v : state.u) v *= sign / norm;
    states.push_back(std::move(state));
  }
  return states;
}

}  // namespace partialwave
