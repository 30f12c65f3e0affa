#include "lbm/ridge.hpp"

#include <cmath>

#include "lbm/error.hpp"

namespace lbm {

RidgeState RidgeState::init(int dim, double lambda, double delta) {
  if (dim < 1) throw Error(ErrorCode::kInvalidConfig, "ridge dimension must be positive");
  if (!(lambda > 0.0)) throw Error(ErrorCode::kInvalidConfig, "lambda must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::kInvalidConfig, "delta must lie in (0,1)");
  RidgeState s;
  s.v = lambda * Matrix::Identity(dim, dim);
  s.v_inv = Matrix::Identity(dim, dim) / lambda;
  s.xty = Vector::Zero(dim);
  s.theta_hat = Vector::Zero(dim);
  s.lambda = lambda;
  s.delta = delta;
  return s;
}

void RidgeState::add(const Vector& b, double y) {
  v.noalias() += b * b.transpose();
  xty.noalias() += y * b;
}

void RidgeState::finalize() {
  Eigen::LLT<Matrix> llt(v);
  theta_hat = llt.solve(xty);
  v_inv = llt.solve(Matrix::Identity(v.rows(), v.cols()));
  ++tau;
}

double RidgeState::inv_norm(const Vector& x) const {
  return std::sqrt(std::max(0.0, x.dot(v_inv * x)));
}

double RidgeState::v_norm_error(const Vector& theta) const {
  const Vector diff = theta_hat - theta;
  return std::sqrt(std::max(0.0, diff.dot(v * diff)));
}

BlockRidgeState BlockRidgeState::init(int d, int m, int l, double lambda, double delta) {
  if (d < 1 || m < 0 || l < 1) throw Error(ErrorCode::kInvalidConfig, "bad block dimensions");
  return {RidgeState::init(d * (m + l), lambda, delta), d, m, l};
}

}  // namespace lbm
