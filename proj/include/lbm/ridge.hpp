#pragma once

#include <cstdint>

#include "lbm/memory.hpp"

namespace lbm {

// Regularized least squares: V = lambda I + sum b b^T, theta_hat = V^-1 xty.
// `tau` counts completed blocks, not samples.
struct RidgeState {
  Matrix v;
  Matrix v_inv;
  Vector xty;
  Vector theta_hat;
  std::int64_t tau = 0;
  double lambda = 1.0;
  double delta = 0.1;

  static RidgeState init(int dim, double lambda, double delta);

  int dim() const { return static_cast<int>(xty.size()); }

  // Accumulates one sample; call `finalize` once the block is complete.
  void add(const Vector& b, double y);
  // Recomputes the estimate and the inverse, and closes the block.
  void finalize();

  // ||x||_{V^-1}
  double inv_norm(const Vector& x) const;
  // ||theta_hat - theta||_V
  double v_norm_error(const Vector& theta) const;
};

// The concatenated estimator of the naive block approach, in dimension d(m+l).
struct BlockRidgeState {
  RidgeState ridge;
  int d = 1;
  int m = 0;
  int l = 1;

  static BlockRidgeState init(int d, int m, int l, double lambda, double delta);
};

}  // namespace lbm
