#pragma once

// Linear bandits with memory: the memory matrix and the noiseless reward.
//
// The expected reward of action a after the window a_{t-m}, ..., a_{t-1} is
//   <a, (A0 + sum_s a_s a_s^T)^gamma theta*>.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace lbm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kSymmetryTol = 1e-10;
inline constexpr double kDefaultPositivityFloor = 1e-9;
inline constexpr double kBallTol = 1e-9;
inline constexpr double kFiniteMemberTol = 1e-12;

inline double positive_part(double x) { return x > 0.0 ? x : 0.0; }

// Q diag(lambda_i^gamma) Q^T for a symmetric PSD matrix. Eigenvalues are
// clamped at zero from below; a negative exponent on a (near) singular matrix
// is refused.
Matrix sym_power(const Matrix& m, double gamma, double positivity_floor = kDefaultPositivityFloor);

// (a0 + sum_s h_s h_s^T)^gamma over the window `history` (oldest first).
Matrix memory_matrix(std::span<const Vector> history, const Matrix& a0, double gamma);

class ActionSet {
 public:
  enum class Kind { kFinite, kUnitBall };

  static ActionSet finite(std::vector<Vector> actions);
  static ActionSet unit_ball(int dim);

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::kFinite; }
  int dim() const { return dim_; }
  std::size_t size() const { return actions_.size(); }
  const std::vector<Vector>& actions() const { return actions_; }
  const Vector& operator[](std::size_t i) const { return actions_[i]; }

  bool contains(const Vector& a) const;
  // Index of `a` within a finite set, or -1.
  long index_of(const Vector& a) const;

 private:
  ActionSet(Kind kind, int dim, std::vector<Vector> actions)
      : kind_(kind), dim_(dim), actions_(std::move(actions)) {}

  Kind kind_;
  int dim_;
  std::vector<Vector> actions_;
};

struct LbmParams {
  Vector theta_star;
  int m = 0;
  double gamma = 0.0;
  Matrix a0;
  ActionSet action_set = ActionSet::unit_ball(1);
  double noise_sigma = 0.0;
  double positivity_floor = kDefaultPositivityFloor;

  int dim() const { return static_cast<int>(theta_star.size()); }

  // Throws Error(kInvalidParams) when an invariant fails.
  void validate() const;
};

// Builds and validates; a0 defaults to the identity when empty.
LbmParams make_params(Vector theta_star, int m, double gamma, ActionSet actions,
                      double noise_sigma = 0.0, Matrix a0 = Matrix());

double expected_reward(const LbmParams& params, std::span<const Vector> history,
                       const Vector& action);

}  // namespace lbm
