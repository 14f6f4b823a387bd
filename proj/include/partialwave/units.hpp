#pragma once

#include <numbers>

namespace partialwave {

inline constexpr double pi = std::numbers::pi;

/// Attoseconds in one atomic unit of time (hbar / hartree).
inline constexpr double attoseconds_per_au = 24.18884;

/// Fine-structure constant.
inline constexpr double fine_structure = 1.0 / 137.035999;

/// |V(R)| R^2 below this certifies that a potential is short-ranged beyond R.
inline constexpr double range_epsilon = 1e-10;

inline constexpr double to_attoseconds(double t_au) { return t_au * attoseconds_per_au; }

}  // namespace partialwave
