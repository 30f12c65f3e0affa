#pragma once

#include <cstdint>
#include <deque>
#include <random>
#include <vector>

#include "lbm/memory.hpp"

namespace lbm {

struct StepResult {
  double reward = 0.0;
  double expected = 0.0;
};

// Sequential LBM environment. The window holds exactly m actions, oldest
// first, and starts as m zero vectors.
class Environment {
 public:
  Environment(LbmParams params, std::uint64_t seed);

  StepResult step(const Vector& action);

  double expected_reward(const Vector& action) const;
  std::vector<Vector> history() const { return {history_.begin(), history_.end()}; }
  std::int64_t t() const { return t_; }
  const LbmParams& params() const { return params_; }

 private:
  LbmParams params_;
  std::deque<Vector> history_;
  std::int64_t t_ = 0;
  std::mt19937_64 rng_;
  std::normal_distribution<double> noise_{0.0, 1.0};
};

}  // namespace lbm
