#include "lbm/memory.hpp"

#include <cmath>
#include <string>

#include "lbm/error.hpp"

namespace lbm {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonSymmetric: return "NonSymmetric";
    case ErrorCode::kSingularNegativePower: return "SingularNegativePower";
    case ErrorCode::kInvalidParams: return "InvalidParams";
    case ErrorCode::kActionOutOfSet: return "ActionOutOfSet";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kUnplayedCandidate: return "UnplayedCandidate";
    case ErrorCode::kStateSpaceTooLarge: return "StateSpaceTooLarge";
    case ErrorCode::kSearchSpaceTooLarge: return "SearchSpaceTooLarge";
    case ErrorCode::kMissingReference: return "MissingReference";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

namespace {

bool is_diagonal(const Matrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (i != j && m(i, j) != 0.0) return false;
  return true;
}

double power_of(double lambda, double gamma) {
  if (gamma == 0.0) return 1.0;
  if (lambda <= 0.0) return 0.0;
  return std::pow(lambda, gamma);
}

}  // namespace

Matrix sym_power(const Matrix& m, double gamma, double positivity_floor) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::kNonSymmetric, "matrix is not square");
  const Eigen::Index d = m.rows();
  if (d > 0 && (m - m.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol)
    throw Error(ErrorCode::kNonSymmetric, "asymmetry exceeds tolerance");
  if (gamma == 0.0) return Matrix::Identity(d, d);

  // Diagonal inputs (basis-action histories, isotropic init) are powered
  // entrywise so that exact instances stay exact.
  if (is_diagonal(m)) {
    Matrix out = Matrix::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      if (gamma < 0.0 && m(i, i) <= positivity_floor)
        throw Error(ErrorCode::kSingularNegativePower,
                    "eigenvalue " + std::to_string(m(i, i)) + " with gamma < 0");
      out(i, i) = power_of(m(i, i), gamma);
    }
    return out;
  }

  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (m + m.transpose()));
  Vector lambdas = eig.eigenvalues();
  if (gamma < 0.0 && lambdas.minCoeff() <= positivity_floor)
    throw Error(ErrorCode::kSingularNegativePower,
                "eigenvalue " + std::to_string(lambdas.minCoeff()) + " with gamma < 0");
  for (Eigen::Index i = 0; i < d; ++i) lambdas(i) = power_of(lambdas(i), gamma);
  const Matrix& q = eig.eigenvectors();
  return q * lambdas.asDiagonal() * q.transpose();
}

Matrix memory_matrix(std::span<const Vector> history, const Matrix& a0, double gamma) {
  Matrix gram = a0;
  for (const Vector& a : history) gram.noalias() += a * a.transpose();
  return sym_power(gram, gamma);
}

ActionSet ActionSet::finite(std::vector<Vector> actions) {
  if (actions.empty()) throw Error(ErrorCode::kInvalidParams, "finite action set is empty");
  const auto dim = actions.front().size();
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (actions[i].size() != dim)
      throw Error(ErrorCode::kInvalidParams, "action dimensions differ");
    if (actions[i].norm() > 1.0 + kFiniteMemberTol)
      throw Error(ErrorCode::kInvalidParams, "action " + std::to_string(i) + " outside the unit ball");
    for (std::size_t j = 0; j < i; ++j)
      if ((actions[i] - actions[j]).norm() <= kFiniteMemberTol)
        throw Error(ErrorCode::kInvalidParams, "duplicate actions " + std::to_string(j) + ", " +
                                                   std::to_string(i));
  }
  return ActionSet(Kind::kFinite, static_cast<int>(dim), std::move(actions));
}

ActionSet ActionSet::unit_ball(int dim) {
  if (dim < 1) throw Error(ErrorCode::kInvalidParams, "dimension must be positive");
  return ActionSet(Kind::kUnitBall, dim, {});
}

long ActionSet::index_of(const Vector& a) const {
  if (a.size() != dim_) return -1;
  for (std::size_t i = 0; i < actions_.size(); ++i)
    if ((actions_[i] - a).norm() <= kFiniteMemberTol) return static_cast<long>(i);
  return -1;
}

bool ActionSet::contains(const Vector& a) const {
  if (a.size() != dim_) return false;
  if (kind_ == Kind::kUnitBall) return a.norm() <= 1.0 + kBallTol;
  return index_of(a) >= 0;
}

void LbmParams::validate() const {
  const auto d = theta_star.size();
  if (d < 1) throw Error(ErrorCode::kInvalidParams, "theta_star is empty");
  if (theta_star.norm() > 1.0 + 1e-12)
    throw Error(ErrorCode::kInvalidParams, "theta_star outside the unit ball");
  if (m < 0) throw Error(ErrorCode::kInvalidParams, "memory size must be nonnegative");
  if (noise_sigma < 0.0) throw Error(ErrorCode::kInvalidParams, "noise_sigma must be nonnegative");
  if (action_set.dim() != d) throw Error(ErrorCode::kInvalidParams, "action set dimension mismatch");
  if (a0.rows() != d || a0.cols() != d) throw Error(ErrorCode::kInvalidParams, "a0 has wrong shape");
  if ((a0 - a0.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw Error(ErrorCode::kInvalidParams, "a0 is not symmetric");
  const double min_eig = Eigen::SelfAdjointEigenSolver<Matrix>(a0, Eigen::EigenvaluesOnly)
                             .eigenvalues()
                             .minCoeff();
  if (min_eig < -1e-12) throw Error(ErrorCode::kInvalidParams, "a0 is not positive semidefinite");
  if (gamma < 0.0 && min_eig <= positivity_floor)
    throw Error(ErrorCode::kInvalidParams, "gamma < 0 requires a0 positive definite");
}

LbmParams make_params(Vector theta_star, int m, double gamma, ActionSet actions,
                      double noise_sigma, Matrix a0) {
  const auto d = theta_star.size();
  LbmParams p{.theta_star = std::move(theta_star),
              .m = m,
              .gamma = gamma,
              .a0 = a0.size() == 0 ? Matrix::Identity(d, d) : std::move(a0),
              .action_set = std::move(actions),
              .noise_sigma = noise_sigma};
  p.validate();
  return p;
}

double expected_reward(const LbmParams& params, std::span<const Vector> history,
                       const Vector& action) {
  if (!params.action_set.contains(action))
    throw Error(ErrorCode::kActionOutOfSet, "action not in the action set");
  const Matrix a = memory_matrix(history, params.a0, params.gamma);
  return action.dot(a * params.theta_star);
}

}  // namespace lbm
