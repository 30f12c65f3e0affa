#pragma once

// Baseline policies: oracle greedy, fixed action and cyclic block replay.

#include <deque>
#include <optional>
#include <vector>

#include "lbm/agent.hpp"
#include "lbm/memory.hpp"

namespace lbm {

// An ordered sequence of m + l actions. `indices` mirrors `actions` when the
// block was drawn from a finite action set and is empty otherwise.
struct Block {
  std::vector<Vector> actions;
  std::vector<std::size_t> indices;
  int m = 0;
  int l = 1;

  std::size_t size() const { return actions.size(); }
  bool has_indices() const { return indices.size() == actions.size(); }
};

Block make_block(std::vector<Vector> actions, int m, int l);
Block make_block(const ActionSet& set, std::vector<std::size_t> indices, int m, int l);
void validate_block(const Block& block, const ActionSet& set);

struct GreedyChoice {
  Vector action;
  long index = -1;
};

// argmax_a <a, A theta*>; lowest index on ties for finite sets, v/|v| on the
// ball (0 when |v| < 1e-12).
GreedyChoice oracle_greedy_action(const LbmParams& params, std::span<const Vector> history);

class OracleGreedyAgent : public Agent {
 public:
  explicit OracleGreedyAgent(LbmParams params);
  std::string name() const override { return "greedy"; }
  Decision act() override;
  void observe(double) override {}

 private:
  LbmParams params_;
  std::deque<Vector> history_;
  std::size_t t_ = 0;
};

class CyclicAgent : public Agent {
 public:
  explicit CyclicAgent(Block block, std::string name = "cyclic");
  std::string name() const override { return name_; }
  Decision act() override;
  void observe(double) override {}

 private:
  Block block_;
  std::string name_;
  std::size_t t_ = 0;
};

class FixedActionAgent : public Agent {
 public:
  FixedActionAgent(Vector action, long index, std::string name = "fixed");
  std::string name() const override { return name_; }
  Decision act() override;
  void observe(double) override {}

 private:
  Vector action_;
  long index_;
  std::string name_;
  std::size_t t_ = 0;
};

}  // namespace lbm
