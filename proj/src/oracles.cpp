#include "lbm/oracles.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "lbm/block_search.hpp"
#include "lbm/error.hpp"
#include "lbm/oful_memory.hpp"

namespace lbm {

namespace {

constexpr double kTieTol = 1e-12;

void require_finite(const LbmParams& params) {
  if (!params.action_set.is_finite())
    throw Error(ErrorCode::kInvalidConfig, "exact oracles need a finite action set");
}

}  // namespace

OptResult opt_dp(const LbmParams& params, std::int64_t horizon, const OracleCaps& caps) {
  require_finite(params);
  if (horizon < 1) throw Error(ErrorCode::kInvalidConfig, "horizon must be >= 1");
  const std::size_t k = params.action_set.size();
  const std::size_t radix = k + 1;  // index k is the zero padding
  const auto m = static_cast<std::size_t>(params.m);
  const std::uint64_t states = block_count(radix, m);
  if (states > caps.max_states)
    throw Error(ErrorCode::kStateSpaceTooLarge, std::to_string(states) + " states");
  if (states * k > caps.max_work / static_cast<std::uint64_t>(horizon))
    throw Error(ErrorCode::kStateSpaceTooLarge, "horizon * states * actions exceeds the cap");

  // State s encodes the window oldest-first in base `radix`, oldest digit most
  // significant. Appending a drops the oldest digit.
  const std::uint64_t top = states / radix;  // radix^(m-1), or 0 when m = 0
  auto advance = [&](std::uint64_t s, std::size_t a) -> std::uint64_t {
    if (m == 0) return 0;
    return (s % top) * radix + a;
  };

  const Vector zero = Vector::Zero(params.dim());
  std::vector<double> reward(states * k);
  std::vector<Vector> window(m);
  for (std::uint64_t s = 0; s < states; ++s) {
    std::uint64_t code = s;
    for (std::size_t j = m; j-- > 0;) {
      const std::size_t digit = code % radix;
      code /= radix;
      window[j] = digit == k ? zero : params.action_set[digit];
    }
    const Vector v = memory_matrix(window, params.a0, params.gamma) * params.theta_star;
    for (std::size_t a = 0; a < k; ++a) reward[s * k + a] = params.action_set[a].dot(v);
  }

  const auto t_len = static_cast<std::size_t>(horizon);
  std::vector<double> next(states, 0.0), cur(states, 0.0);
  std::vector<std::uint32_t> choice(t_len * states);
  for (std::size_t t = t_len; t-- > 0;) {
    for (std::uint64_t s = 0; s < states; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      std::uint32_t best_a = 0;
      for (std::size_t a = 0; a < k; ++a) {
        const double v = reward[s * k + a] + next[advance(s, a)];
        if (v > best + kTieTol) {
          best = v;
          best_a = static_cast<std::uint32_t>(a);
        }
      }
      cur[s] = best;
      choice[t * states + s] = best_a;
    }
    std::swap(cur, next);
  }

  OptResult out;
  std::uint64_t s = states - 1;  // all digits equal to the padding index
  if (m == 0) s = 0;
  out.value = next[s];
  for (std::size_t t = 0; t < t_len; ++t) {
    const std::size_t a = choice[t * states + s];
    out.sequence.push_back(a);
    out.rewards.push_back(reward[s * k + a]);
    s = advance(s, a);
  }
  return out;
}

BestBlock best_block_bruteforce(const LbmParams& params, int l, const OracleCaps& caps) {
  require_finite(params);
  if (l < 1) throw Error(ErrorCode::kInvalidConfig, "block tail length must be >= 1");
  const std::size_t len = static_cast<std::size_t>(params.m + l);
  const std::size_t k = params.action_set.size();
  if (block_count(k, len) > caps.max_blocks)
    throw Error(ErrorCode::kSearchSpaceTooLarge, "too many blocks to enumerate");
  std::vector<Vector> actions(len);
  auto objective = [&](std::span<const std::size_t> idx) {
    for (std::size_t i = 0; i < len; ++i) actions[i] = params.action_set[idx[i]];
    Block b{actions, {}, params.m, l};
    return proxy_reward(b, params.theta_star, params.a0, params.gamma);
  };
  auto found = enumerate_finite(k, len, objective);
  return {make_block(params.action_set, std::move(found.point), params.m, l), found.value};
}

std::vector<double> cyclic_rewards(const LbmParams& params, const Block& block,
                                   std::int64_t horizon) {
  std::vector<Vector> window(static_cast<std::size_t>(params.m), Vector::Zero(params.dim()));
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(horizon));
  for (std::int64_t t = 0; t < horizon; ++t) {
    const Vector& a = block.actions[static_cast<std::size_t>(t) % block.size()];
    out.push_back(a.dot(memory_matrix(window, params.a0, params.gamma) * params.theta_star));
    if (params.m > 0) {
      window.erase(window.begin());
      window.push_back(a);
    }
  }
  return out;
}

GapReport approx_gap_check(const LbmParams& params, int l, std::int64_t horizon,
                           std::optional<double> instance_r, bool tight,
                           const OracleCaps& caps) {
  GapReport r;
  const OptResult opt = opt_dp(params, horizon, caps);
  r.opt = opt.value;
  r.opt_sequence = opt.sequence;
  r.best = best_block_bruteforce(params, l, caps);
  for (double x : cyclic_rewards(params, r.best.block, horizon)) r.cyclic += x;
  r.gap = r.opt - r.cyclic;
  const double m = params.m;
  const double t = static_cast<double>(horizon);
  r.r_bound = instance_r.value_or(std::pow(m + 1.0, positive_part(params.gamma)));
  r.bound = 2.0 * m * r.r_bound / (m + l) * t;
  r.within_bound = r.gap <= r.bound + 1e-9;
  if (tight) {
    r.tight_lower = m * r.r_bound / (m + l) * t;
    r.meets_lower = r.gap >= *r.tight_lower - 1e-9;
  }
  return r;
}

bool presequence_signflip_check(const Block& first, const Block& second, const Vector& theta,
                                const Matrix& a0, double gamma) {
  if (first.m != second.m || first.size() != second.size())
    throw Error(ErrorCode::kLengthMismatch, "blocks must share m and length");
  for (std::size_t i = static_cast<std::size_t>(first.m); i < first.size(); ++i)
    if ((first.actions[i] - second.actions[i]).norm() > 0.0)
      throw Error(ErrorCode::kInvalidParams, "blocks must share their tail");
  const Vector flipped = -theta;
  const double p = proxy_reward(first, theta, a0, gamma);
  const double q = proxy_reward(second, theta, a0, gamma);
  const double p_neg = proxy_reward(first, flipped, a0, gamma);
  const double q_neg = proxy_reward(second, flipped, a0, gamma);
  constexpr double tol = 1e-12;
  bool ok = true;
  if (p >= q) ok = ok && q_neg >= p_neg - tol;
  if (q >= p) ok = ok && p_neg >= q_neg - tol;
  return ok;
}

}  // namespace lbm
