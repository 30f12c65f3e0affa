#pragma once

// Exact references on finite action sets: the optimal action sequence by
// dynamic programming, the best block by enumeration, and the cyclic
// approximation gap.

#include <cstdint>
#include <optional>
#include <vector>

#include "lbm/memory.hpp"
#include "lbm/policies.hpp"

namespace lbm {

struct OracleCaps {
  std::uint64_t max_states = 100'000;
  std::uint64_t max_work = 2'000'000'000;  // horizon * states * actions
  std::uint64_t max_blocks = 1'000'000;
};

struct OptResult {
  double value = 0.0;
  std::vector<std::size_t> sequence;  // action indices
  std::vector<double> rewards;        // expected reward of each round
};

// Backward induction over windows of m action indices, where the extra index
// K stands for the zero padding before round 1. Ties go to the lowest index.
OptResult opt_dp(const LbmParams& params, std::int64_t horizon, const OracleCaps& caps = {});

struct BestBlock {
  Block block;
  double value = 0.0;
};

BestBlock best_block_bruteforce(const LbmParams& params, int l, const OracleCaps& caps = {});

// Expected rewards of replaying `block` from the zero-padded initial window.
std::vector<double> cyclic_rewards(const LbmParams& params, const Block& block,
                                   std::int64_t horizon);

struct GapReport {
  double opt = 0.0;
  double cyclic = 0.0;
  double gap = 0.0;
  double r_bound = 0.0;  // R used in the bound
  double bound = 0.0;    // 2 m R T / (m + L)
  std::optional<double> tight_lower;  // m R T / (m + L) on the tight instance
  BestBlock best;
  std::vector<std::size_t> opt_sequence;
  bool within_bound = false;
  bool meets_lower = true;
};

// R defaults to (m+1)^(gamma+); pass `instance_r` when a preset declares a
// sharper one, and `tight` to also check the matching lower bound.
GapReport approx_gap_check(const LbmParams& params, int l, std::int64_t horizon,
                           std::optional<double> instance_r = {}, bool tight = false,
                           const OracleCaps& caps = {});

// Two blocks with equal tails: if the first pre-sequence is at least as good
// for theta, the second must be at least as good for -theta.
bool presequence_signflip_check(const Block& first, const Block& second, const Vector& theta,
                                const Matrix& a0, double gamma);

}  // namespace lbm
