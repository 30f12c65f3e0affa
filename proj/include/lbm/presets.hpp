#pragma once

// Named problem instances.

#include <optional>

#include "lbm/memory.hpp"
#include "lbm/policies.hpp"

namespace lbm::presets {

// d = m + 1, actions {0_d, e_1, ..., e_d} in that order, theta* = 1/sqrt(d),
// gamma <= 0. Cycling the basis is optimal with reward 1/sqrt(d) per round.
LbmParams rotting_basis(int m, double gamma, double noise_sigma = 0.0);

// Block of m zero actions followed by e_1, ..., e_l on `rotting_basis(m, .)`.
Block rotting_basis_block(int m, int l);

// Rotting instance on which greedy is linearly suboptimal: unit ball,
// theta* = e_1, m = d - 1, memory matrix (I + sum a a^T)^(-exponent).
LbmParams rotting_greedy(int d, double exponent, double noise_sigma = 0.0);

// d = 2, a0 = diag(1, 0), gamma = 1, theta* = (sqrt(eps), sqrt(1 - eps)).
// The finite variant uses the 12 unit vectors at multiples of 30 degrees,
// so e_1 has index 0 and e_2 index 3.
LbmParams rising_nonisotropic(int m = 2, double eps = 0.1, double noise_sigma = 0.0,
                              bool unit_ball = false);

// Rested K-armed bandit: d = K, basis actions, theta* = 1/sqrt(K).
LbmParams rested_karms(int k, int m, double gamma, double noise_sigma = 0.0);

// 20 unit vectors in R^3 drawn once from the uniform distribution on the
// sphere and frozen.
ActionSet sphere20();

}  // namespace lbm::presets
