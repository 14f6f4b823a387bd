#pragma once

// Central model potentials. All are short-ranged: beyond range_radius() the
// potential satisfies |V(r)| r^2 < range_epsilon (or vanishes identically).

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "partialwave/errors.hpp"
#include "partialwave/units.hpp"

namespace partialwave {

struct Zero {};

struct HardSphere {
  double radius = 1.0;
};

/// V = -depth for r < radius, 0 beyond.
struct SquareWell {
  double depth = 1.0;
  double radius = 1.0;
};

/// V = -(charge / r) exp(-r / screening).
struct Yukawa {
  double charge = 1.0;
  double screening = 1.0;
};

/// Tabulated (r, V) samples with monotone piecewise-cubic (Fritsch-Carlson)
/// interpolation; zero beyond the last radius.
class Tabulated {
 public:
  Tabulated(std::vector<double> radii, std::vector<double> values)
      : r_(std::move(radii)), v_(std::move(values)) {
    if (r_.size() != v_.size()) throw PreconditionError("potential", "tabulated columns differ in length");
    if (r_.size() < 3) throw PreconditionError("potential", "tabulated potential needs at least 3 points");
    if (!(r_.front() > 0.0)) throw PreconditionError("potential", "first tabulated radius must be > 0");
    for (std::size_t i = 0; i < r_.size(); ++i) {
      if (!std::isfinite(r_[i]) || !std::isfinite(v_[i])) {
        throw PreconditionError("potential", "non-finite tabulated value");
      }
      if (i > 0 && !(r_[i] > r_[i - 1])) {
        throw PreconditionError("potential", "tabulated radii must be strictly increasing");
      }
    }
    for (std::size_t i = r_.size() - 3; i < r_.size(); ++i) {
      if (!(std::abs(v_[i]) * r_[i] * r_[i] < range_epsilon)) {
        throw PreconditionError("potential", "tabulated potential is not short-ranged at its last three points");
      }
    }
    build_slopes();
  }

  /// Two whitespace-separated columns (r, V); '#' starts a comment.
  static Tabulated parse(std::istream& in) {
    std::vector<double> r;
    std::vector<double> v;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::istringstream fields(line);
      double a = 0.0;
      double b = 0.0;
      if (!(fields >> a)) continue;
      std::string rest;
      if (!(fields >> b) || (fields >> rest)) {
        throw PreconditionError("potential", "tabulated line " + std::to_string(line_no) + " is not two columns");
      }
      r.push_back(a);
      v.push_back(b);
    }
    return Tabulated(std::move(r), std::move(v));
  }

  const std::vector<double>& radii() const { return r_; }
  const std::vector<double>& values() const { return v_; }

  double operator()(double r) const {
    if (r < r_.front()) throw PreconditionError("potential", "query below the first tabulated radius");
    if (r > r_.back()) return 0.0;
    auto hi = static_cast<std::size_t>(std::upper_bound(r_.begin(), r_.end(), r) - r_.begin());
    if (hi >= r_.size()) return v_.back();
    const std::size_t lo = hi - 1;
    const double h = r_[hi] - r_[lo];
    const double t = (r - r_[lo]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * v_[lo] + (t3 - 2 * t2 + t) * h * m_[lo] + (-2 * t3 + 3 * t2) * v_[hi] +
           (t3 - t2) * h * m_[hi];
  }

 private:
  void build_slopes() {
    const std::size_t n = r_.size();
    std::vector<double> h(n - 1);
    std::vector<double> d(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      h[k] = r_[k + 1] - r_[k];
      d[k] = (v_[k + 1] - v_[k]) / h[k];
    }
    m_.assign(n, 0.0);
    m_.front() = d.front();
    m_.back() = d.back();
    for (std::size_t k = 1; k + 1 < n; ++k) {
      if (d[k - 1] * d[k] <= 0.0) continue;
      const double w1 = 2 * h[k] + h[k - 1];
      const double w2 = h[k] + 2 * h[k - 1];
      m_[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
    }
  }

  std::vector<double> r_;
  std::vector<double> v_;
  std::vector<double> m_;
};

/// Value of a potential at one radius. `forbidden` marks the interior of a hard core,
/// where the potential is infinite and `hartree` is meaningless.
struct PotentialValue {
  double hartree = 0.0;
  bool forbidden = false;
};

class PotentialSpec {
 public:
  using Kind = std::variant<Zero, HardSphere, SquareWell, Yukawa, Tabulated>;

  PotentialSpec() : PotentialSpec(Zero{}) {}

  explicit PotentialSpec(Kind kind) : kind_(std::move(kind)) {
    validate();
    range_ = compute_range();
  }

  static PotentialSpec zero() { return PotentialSpec(Zero{}); }
  static PotentialSpec hard_sphere(double a) { return PotentialSpec(HardSphere{a}); }
  static PotentialSpec square_well(double depth, double a) { return PotentialSpec(SquareWell{depth, a}); }
  static PotentialSpec yukawa(double charge, double screening) { return PotentialSpec(Yukawa{charge, screening}); }
  static PotentialSpec tabulated(std::vector<double> r, std::vector<double> v) {
    return PotentialSpec(Tabulated(std::move(r), std::move(v)));
  }

  const Kind& kind() const { return kind_; }

  /// Radius beyond which the potential is negligible for asymptotic matching.
  double range_radius() const { return range_; }

  bool is_zero() const { return std::holds_alternative<Zero>(kind_); }

  /// Radius of an impenetrable core, if any.
  std::optional<double> hard_core_radius() const {
    if (auto* h = std::get_if<HardSphere>(&kind_)) return h->radius;
    return std::nullopt;
  }

  /// Radius of a jump discontinuity in V, if any. Grids place a node exactly there.
  std::optional<double> discontinuity() const {
    if (auto* w = std::get_if<SquareWell>(&kind_)) return w->radius;
    return std::nullopt;
  }

  /// Smallest radius at which the potential may be evaluated.
  double min_radius() const {
    if (auto* t = std::get_if<Tabulated>(&kind_)) return t->radii().front();
    return 0.0;
  }

  std::string name() const {
    return std::visit(
        [](const auto& k) -> std::string {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, Zero>) return "zero";
          if constexpr (std::is_same_v<T, HardSphere>) return "hard_sphere";
          if constexpr (std::is_same_v<T, SquareWell>) return "square_well";
          if constexpr (std::is_same_v<T, Yukawa>) return "yukawa";
          if constexpr (std::is_same_v<T, Tabulated>) return "tabulated";
        },
        kind_);
  }

 private:
  void validate() const {
    std::visit(
        [](const auto& k) {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, HardSphere>) {
            if (!(k.radius > 0.0)) throw PreconditionError("potential", "hard-sphere radius must be > 0");
          } else if constexpr (std::is_same_v<T, SquareWell>) {
            if (!(k.depth > 0.0)) throw PreconditionError("potential", "square-well depth must be > 0");
            if (!(k.radius > 0.0)) throw PreconditionError("potential", "square-well radius must be > 0");
          } else if constexpr (std::is_same_v<T, Yukawa>) {
            if (!(k.charge > 0.0)) throw PreconditionError("potential", "Yukawa charge must be > 0");
            if (!(k.screening > 0.0)) throw PreconditionError("potential", "Yukawa screening length must be > 0");
          }
        },
        kind_);
  }

  double compute_range() const {
    return std::visit(
        [](const auto& k) -> double {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, Zero>) {
            return 0.0;
          } else if constexpr (std::is_same_v<T, HardSphere>) {
            return k.radius;
          } else if constexpr (std::is_same_v<T, SquareWell>) {
            return k.radius;
          } else if constexpr (std::is_same_v<T, Yukawa>) {
            // Solve Z R exp(-R/d) = eps on the decreasing branch R > d.
            const double z = k.charge;
            const double d = k.screening;
            double radius = d * std::max(1.0, std::log(z * d / range_epsilon));
            for (int it = 0; it < 200; ++it) {
              const double next = d * std::log(z * std::max(radius, d) / range_epsilon);
              if (std::abs(next - radius) < 1e-13 * radius) break;
              radius = next;
            }
            return std::max(radius, d);
          } else {
            const auto& r = k.radii();
            const auto& v = k.values();
            std::size_t j = r.size();
            while (j > 0 && std::abs(v[j - 1]) * r[j - 1] * r[j - 1] < range_epsilon) --j;
            return j == r.size() ? r.back() : r[j];
          }
        },
        kind_);
  }

  Kind kind_;
  double range_ = 0.0;
};

/// V(r). A square well evaluates to -depth/2 exactly at its edge.
inline PotentialValue eval_potential(const PotentialSpec& spec, double r) {
  if (!(r > 0.0)) throw PreconditionError("potential", "radius must be > 0");
  return std::visit(
      [r](const auto& k) -> PotentialValue {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Zero>) {
          return {};
        } else if constexpr (std::is_same_v<T, HardSphere>) {
          if (r < k.radius) return {0.0, true};
          return {};
        } else if constexpr (std::is_same_v<T, SquareWell>) {
          if (r < k.radius) return {-k.depth, false};
          if (r == k.radius) return {-0.5 * k.depth, false};
          return {};
        } else if constexpr (std::is_same_v<T, Yukawa>) {
          return {-(k.charge / r) * std::exp(-r / k.screening), false};
        } else {
          return {k(r), false};
        }
      },
      spec.kind());
}

/// r_cl = (l + 1/2) / sqrt(2E), the classical turning point of a free particle with
/// Langer-corrected angular momentum.
inline double classical_turning_point(int ell, double energy) {
  if (ell < 0) throw PreconditionError("potential", "ell must be >= 0");
  if (!(energy > 0.0)) throw PreconditionError("potential", "turning point needs E > 0");
  return (ell + 0.5) / std::sqrt(2.0 * energy);
}

}  // namespace partialwave
