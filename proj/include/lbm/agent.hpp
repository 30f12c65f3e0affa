#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lbm/environment.hpp"

namespace lbm {

struct Decision {
  Vector action;
  long index = -1;  // position in a finite action set, -1 otherwise
  std::size_t block = 0;
  std::size_t position = 0;
};

// A round-by-round decision maker. `observe` receives the realized reward of
// the action returned by the preceding `act`.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual std::string name() const = 0;
  virtual Decision act() = 0;
  virtual void observe(double reward) = 0;
};

struct TrajectoryStep {
  std::int64_t round = 0;  // 1-based
  std::size_t block = 0;
  std::size_t position = 0;
  Vector action;
  long index = -1;
  double reward = 0.0;
  double expected = 0.0;
};

using Trajectory = std::vector<TrajectoryStep>;

Trajectory simulate(Environment& env, Agent& agent, std::int64_t horizon);

double total_expected(const Trajectory& trajectory);

}  // namespace lbm
