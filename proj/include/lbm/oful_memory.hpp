#pragma once

// OFUL-memory learners. OM and O3M share the refined d-dimensional estimator
// and differ only in the exploration bonus; OM-Block estimates the
// concatenated d(m+L) parameter directly.

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <unordered_map>

#include "lbm/agent.hpp"
#include "lbm/block_search.hpp"
#include "lbm/policies.hpp"
#include "lbm/ridge.hpp"

namespace lbm {

enum class UcbVariant { kOm, kO3m };

const char* to_string(UcbVariant v);

enum class LengthRule {
  kTheorem,    // ceil(sqrt(m/d) T^(1/4)) - m
  kAlgorithm,  // ceil(sqrt(m/(4d)) T^(1/4) - m)
};

// Block tail length L, clamped to >= 1; m = 0 gives 1.
int block_length(int m, int d, std::int64_t horizon, LengthRule rule = LengthRule::kTheorem);

// Confidence radius of the refined estimator after tau blocks.
double beta_refined(std::int64_t tau, double lambda, double delta, int d, int m, double gamma);
// Confidence radius of the concatenated estimator after tau blocks.
double beta_block(std::int64_t tau, double lambda, double delta, int d, int m, int l, double gamma);

// What a learner is allowed to know: everything but theta*.
struct LearnerModel {
  ActionSet actions;
  int m = 0;
  double gamma = 0.0;
  Matrix a0;

  static LearnerModel from(const LbmParams& params);
  int dim() const { return actions.dim(); }
};

// b_i = A_{i-1} a_i for the tail positions i = m+1..m+l (in-block windows).
std::vector<Vector> tail_features(const Block& block, const Matrix& a0, double gamma);

// First m raw actions followed by the tail features, length d(m+l).
Vector lift_block(const Block& block, const Matrix& a0, double gamma);

// sum_{t>m} <a_t, A_{t-1} theta>, evaluated action by action.
double proxy_reward(const Block& block, const Vector& theta, const Matrix& a0, double gamma);
// The same quantity as <lift_block(block), (0,..,0,theta,..,theta)>.
double proxy_reward_lifted(const Block& block, const Vector& theta, const Matrix& a0,
                           double gamma);

// beta used when selecting the next block; zero before the first update.
double selection_beta(const RidgeState& state, const LearnerModel& model);
double selection_beta(const BlockRidgeState& state, const LearnerModel& model);

double ucb_value(const Block& block, const RidgeState& state, const LearnerModel& model,
                 UcbVariant variant);
double ucb_value(const Block& block, const RidgeState& state, const LearnerModel& model,
                 UcbVariant variant, double beta);
// <b, theta_big> + beta ||b||_{V_big^-1}
double block_ucb_value(const Block& block, const BlockRidgeState& state, const LearnerModel& model,
                       double beta);

// Cache of tail features A(window) a for finite action sets, keyed by the
// m window indices and the action index.
class FeatureTable {
 public:
  explicit FeatureTable(LearnerModel model);

  const Vector& feature(std::span<const std::size_t> window, std::size_t action);
  std::uint64_t key(std::span<const std::size_t> window, std::size_t action) const;
  const Vector& feature(std::uint64_t key, std::span<const std::size_t> window, std::size_t action);

 private:
  LearnerModel model_;
  std::size_t k_;
  std::unordered_map<std::uint64_t, Vector> cache_;
};

struct SelectResult {
  Block block;
  double ucb = 0.0;
};

SelectResult select_block(const RidgeState& state, const LearnerModel& model, int l,
                          UcbVariant variant, const OptimizerConfig& cfg, std::mt19937_64& rng,
                          FeatureTable* table = nullptr);
SelectResult select_block_concat(const BlockRidgeState& state, const LearnerModel& model,
                                 const OptimizerConfig& cfg, std::mt19937_64& rng,
                                 FeatureTable* table = nullptr, std::optional<int> l = {});

// Only the last l rewards enter; the first m are discarded.
void update_refined(RidgeState& state, const Block& block, std::span<const double> rewards,
                    const Matrix& a0, double gamma);
// Adds the lifted block with the summed tail reward.
void update_block(BlockRidgeState& state, const Block& block, std::span<const double> rewards,
                  const Matrix& a0, double gamma);

struct LearnerConfig {
  int l = 1;
  double lambda = 1.0;
  double delta = 0.1;
  OptimizerConfig optimizer;
  std::uint64_t seed = 0;
};

// Block-level learner interface used by the round-level adapter and by the
// combiner.
class BlockLearner {
 public:
  virtual ~BlockLearner() = default;
  virtual int m() const = 0;
  virtual int l() const = 0;
  // Next block; `tail` shortens L for a final partial block.
  virtual SelectResult propose(std::optional<int> tail = {}) = 0;
  virtual void update(const Block& block, std::span<const double> rewards) = 0;
};

class OmLearner : public BlockLearner {
 public:
  OmLearner(LearnerModel model, UcbVariant variant, LearnerConfig cfg);

  int m() const override { return model_.m; }
  int l() const override { return cfg_.l; }
  SelectResult propose(std::optional<int> tail = {}) override;
  void update(const Block& block, std::span<const double> rewards) override;

  const RidgeState& state() const { return state_; }
  const LearnerModel& model() const { return model_; }
  UcbVariant variant() const { return variant_; }

 private:
  LearnerModel model_;
  UcbVariant variant_;
  LearnerConfig cfg_;
  RidgeState state_;
  std::mt19937_64 rng_;
  std::unique_ptr<FeatureTable> table_;
};

class OmBlockLearner : public BlockLearner {
 public:
  OmBlockLearner(LearnerModel model, LearnerConfig cfg);

  int m() const override { return model_.m; }
  int l() const override { return cfg_.l; }
  SelectResult propose(std::optional<int> tail = {}) override;
  void update(const Block& block, std::span<const double> rewards) override;

  const BlockRidgeState& state() const { return state_; }

 private:
  LearnerModel model_;
  LearnerConfig cfg_;
  BlockRidgeState state_;
  std::mt19937_64 rng_;
  std::unique_ptr<FeatureTable> table_;
};

// Plays a block learner round by round over a known horizon. When m + L does
// not divide the horizon the last block is re-selected with a shorter tail;
// if fewer than m + 1 rounds remain the previous block's prefix is replayed
// without an update.
class BlockAgent : public Agent {
 public:
  BlockAgent(std::unique_ptr<BlockLearner> learner, std::int64_t horizon, std::string name);

  std::string name() const override { return name_; }
  Decision act() override;
  void observe(double reward) override;

  BlockLearner& learner() { return *learner_; }
  // UCB of each selected block at selection time.
  const std::vector<double>& selected_ucbs() const { return ucbs_; }
  const std::vector<Block>& played_blocks() const { return blocks_; }

 private:
  std::unique_ptr<BlockLearner> learner_;
  std::int64_t horizon_;
  std::string name_;
  std::int64_t t_ = 0;
  Block current_;
  bool learning_block_ = true;
  std::size_t pos_ = 0;
  std::vector<double> rewards_;
  std::vector<double> ucbs_;
  std::vector<Block> blocks_;
};

std::unique_ptr<BlockAgent> make_om_agent(const LbmParams& params, UcbVariant variant,
                                          std::int64_t horizon, LearnerConfig cfg);
std::unique_ptr<BlockAgent> make_om_block_agent(const LbmParams& params, std::int64_t horizon,
                                                LearnerConfig cfg);

// Stationary OFUL: the m = 0, L = 1 refined learner.
std::unique_ptr<BlockAgent> make_oful_agent(const LbmParams& params, std::int64_t horizon,
                                            LearnerConfig cfg);

Trajectory run_om(const LbmParams& params, std::int64_t horizon, UcbVariant variant,
                  std::uint64_t seed, LearnerConfig cfg);
Trajectory run_om_block(const LbmParams& params, std::int64_t horizon, std::uint64_t seed,
                        LearnerConfig cfg);

}  // namespace lbm
