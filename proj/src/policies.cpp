#include "lbm/policies.hpp"

#include <string>

#include "lbm/error.hpp"

namespace lbm {

Trajectory simulate(Environment& env, Agent& agent, std::int64_t horizon) {
  Trajectory out;
  out.reserve(static_cast<std::size_t>(horizon));
  for (std::int64_t t = 1; t <= horizon; ++t) {
    Decision d = agent.act();
    const StepResult r = env.step(d.action);
    agent.observe(r.reward);
    out.push_back({t, d.block, d.position, std::move(d.action), d.index, r.reward, r.expected});
  }
  return out;
}

double total_expected(const Trajectory& trajectory) {
  double s = 0.0;
  for (const auto& step : trajectory) s += step.expected;
  return s;
}

Block make_block(std::vector<Vector> actions, int m, int l) {
  if (m < 0 || l < 1) throw Error(ErrorCode::kInvalidParams, "block needs m >= 0 and l >= 1");
  if (actions.size() != static_cast<std::size_t>(m + l))
    throw Error(ErrorCode::kLengthMismatch, "block length must equal m + l");
  return Block{std::move(actions), {}, m, l};
}

Block make_block(const ActionSet& set, std::vector<std::size_t> indices, int m, int l) {
  std::vector<Vector> actions;
  actions.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= set.size()) throw Error(ErrorCode::kActionOutOfSet, "action index out of range");
    actions.push_back(set[i]);
  }
  Block b = make_block(std::move(actions), m, l);
  b.indices = std::move(indices);
  return b;
}

void validate_block(const Block& block, const ActionSet& set) {
  if (block.size() != static_cast<std::size_t>(block.m + block.l))
    throw Error(ErrorCode::kLengthMismatch, "block length must equal m + l");
  for (const Vector& a : block.actions)
    if (!set.contains(a)) throw Error(ErrorCode::kActionOutOfSet, "block action not in the set");
}

GreedyChoice oracle_greedy_action(const LbmParams& params, std::span<const Vector> history) {
  const Vector v = memory_matrix(history, params.a0, params.gamma) * params.theta_star;
  const ActionSet& set = params.action_set;
  if (!set.is_finite()) {
    const double n = v.norm();
    if (n < 1e-12) return {Vector::Zero(v.size()), -1};
    return {v / n, -1};
  }
  std::size_t best = 0;
  double best_value = set[0].dot(v);
  for (std::size_t i = 1; i < set.size(); ++i) {
    const double value = set[i].dot(v);
    if (value > best_value) {
      best_value = value;
      best = i;
    }
  }
  return {set[best], static_cast<long>(best)};
}

OracleGreedyAgent::OracleGreedyAgent(LbmParams params) : params_(std::move(params)) {
  for (int i = 0; i < params_.m; ++i) history_.push_back(Vector::Zero(params_.dim()));
}

Decision OracleGreedyAgent::act() {
  const std::vector<Vector> window(history_.begin(), history_.end());
  GreedyChoice c = oracle_greedy_action(params_, window);
  if (params_.m > 0) {
    history_.pop_front();
    history_.push_back(c.action);
  }
  const std::size_t t = t_++;
  return {std::move(c.action), c.index, t, 0};
}

CyclicAgent::CyclicAgent(Block block, std::string name)
    : block_(std::move(block)), name_(std::move(name)) {
  if (block_.actions.empty()) throw Error(ErrorCode::kInvalidParams, "cyclic policy needs a block");
}

Decision CyclicAgent::act() {
  const std::size_t len = block_.size();
  const std::size_t pos = t_ % len;
  Decision d{block_.actions[pos], block_.has_indices() ? static_cast<long>(block_.indices[pos]) : -1,
             t_ / len, pos};
  ++t_;
  return d;
}

FixedActionAgent::FixedActionAgent(Vector action, long index, std::string name)
    : action_(std::move(action)), index_(index), name_(std::move(name)) {}

Decision FixedActionAgent::act() { return {action_, index_, t_++, 0}; }

}  // namespace lbm
