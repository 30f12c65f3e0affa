#pragma once

// Maximizers over blocks of actions: exhaustive enumeration and coordinate
// ascent for finite sets, projected gradient ascent for the unit ball.

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "lbm/memory.hpp"

namespace lbm {

struct OptimizerConfig {
  int restarts = 8;
  int max_sweeps = 50;
  int ball_iterations = 200;
  double ball_step = 0.1;  // step at iteration k is ball_step / sqrt(k)
  double fd_step = 1e-5;
  bool exhaustive = false;
  std::uint64_t exhaustive_cap = 1'000'000;

  void validate() const;
};

using FiniteObjective = std::function<double(std::span<const std::size_t>)>;
using BallObjective = std::function<double(std::span<const Vector>)>;

template <typename T>
struct SearchResult {
  std::vector<T> point;
  double value = 0.0;
};

// Number of blocks |A|^len, saturating at UINT64_MAX.
std::uint64_t block_count(std::size_t num_actions, std::size_t len);

// Exact maximizer; the lexicographically smallest one on exact ties.
SearchResult<std::size_t> enumerate_finite(std::size_t num_actions, std::size_t len,
                                           const FiniteObjective& objective);

// Enumerates when cfg.exhaustive and the space fits under the cap, otherwise
// runs coordinate ascent from the all-zero block plus random restarts.
SearchResult<std::size_t> search_finite(std::size_t num_actions, std::size_t len,
                                        const FiniteObjective& objective,
                                        const OptimizerConfig& cfg, std::mt19937_64& rng);

// Projected gradient ascent with central finite differences; each action is
// rescaled onto the unit ball when it leaves it. Returns the best iterate.
SearchResult<Vector> search_ball(int dim, std::size_t len, const BallObjective& objective,
                                 const OptimizerConfig& cfg, std::mt19937_64& rng);

}  // namespace lbm
