#include "lbm/environment.hpp"

namespace lbm {

Environment::Environment(LbmParams params, std::uint64_t seed)
    : params_(std::move(params)), rng_(seed) {
  params_.validate();
  for (int i = 0; i < params_.m; ++i) history_.push_back(Vector::Zero(params_.dim()));
}

double Environment::expected_reward(const Vector& action) const {
  const std::vector<Vector> window(history_.begin(), history_.end());
  return lbm::expected_reward(params_, window, action);
}

StepResult Environment::step(const Vector& action) {
  StepResult out;
  out.expected = expected_reward(action);
  // The draw happens even at sigma = 0 so the stream position depends only on t.
  out.reward = out.expected + params_.noise_sigma * noise_(rng_);
  if (params_.m > 0) {
    history_.pop_front();
    history_.push_back(action);
  }
  ++t_;
  return out;
}

}  // namespace lbm
