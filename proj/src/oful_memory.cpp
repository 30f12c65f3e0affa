#include "lbm/oful_memory.hpp"

#include <cmath>
#include <string>

#include "lbm/error.hpp"

namespace lbm {

const char* to_string(UcbVariant v) { return v == UcbVariant::kOm ? "om" : "o3m"; }

int block_length(int m, int d, std::int64_t horizon, LengthRule rule) {
  if (m <= 0) return 1;
  if (d < 1 || horizon < 1) return 1;
  const double root = std::pow(static_cast<double>(horizon), 0.25);
  double l = 0.0;
  if (rule == LengthRule::kTheorem) {
    // The small shift keeps exact integers such as 2.0000000000000004 from
    // rounding up.
    l = std::ceil(std::sqrt(static_cast<double>(m) / d) * root - 1e-9) - m;
  } else {
    l = std::ceil(std::sqrt(static_cast<double>(m) / (4.0 * d)) * root - m - 1e-9);
  }
  return l < 1.0 ? 1 : static_cast<int>(l);
}

double beta_refined(std::int64_t tau, double lambda, double delta, int d, int m, double gamma) {
  const double growth = std::pow(m + 1.0, 2.0 * positive_part(gamma));
  const double inner = 2.0 * std::log(1.0 / delta) +
                       d * std::log1p(static_cast<double>(tau) * growth / (d * lambda));
  return std::sqrt(inner) + std::sqrt(lambda);
}

double beta_block(std::int64_t tau, double lambda, double delta, int d, int m, int l,
                  double gamma) {
  const double growth = std::pow(m + 1.0, 2.0 * positive_part(gamma));
  const double inner = 2.0 * std::log(1.0 / delta) +
                       d * (m + l) * std::log1p(static_cast<double>(tau) * growth / (d * lambda));
  return std::sqrt(inner) + std::sqrt(lambda * l);
}

LearnerModel LearnerModel::from(const LbmParams& params) {
  return {params.action_set, params.m, params.gamma, params.a0};
}

std::vector<Vector> tail_features(const Block& block, const Matrix& a0, double gamma) {
  const auto m = static_cast<std::size_t>(block.m);
  std::vector<Vector> out;
  out.reserve(block.size() - m);
  for (std::size_t i = m; i < block.size(); ++i) {
    const std::span<const Vector> window(block.actions.data() + (i - m), m);
    out.push_back(memory_matrix(window, a0, gamma) * block.actions[i]);
  }
  return out;
}

Vector lift_block(const Block& block, const Matrix& a0, double gamma) {
  const auto d = a0.rows();
  Vector out(d * static_cast<Eigen::Index>(block.size()));
  for (int i = 0; i < block.m; ++i) out.segment(i * d, d) = block.actions[i];
  const auto tail = tail_features(block, a0, gamma);
  for (std::size_t j = 0; j < tail.size(); ++j)
    out.segment((block.m + static_cast<Eigen::Index>(j)) * d, d) = tail[j];
  return out;
}

double proxy_reward(const Block& block, const Vector& theta, const Matrix& a0, double gamma) {
  const auto m = static_cast<std::size_t>(block.m);
  double total = 0.0;
  for (std::size_t i = m; i < block.size(); ++i) {
    const std::span<const Vector> window(block.actions.data() + (i - m), m);
    total += block.actions[i].dot(memory_matrix(window, a0, gamma) * theta);
  }
  return total;
}

double proxy_reward_lifted(const Block& block, const Vector& theta, const Matrix& a0,
                           double gamma) {
  const Vector lifted = lift_block(block, a0, gamma);
  const auto d = theta.size();
  Vector stacked = Vector::Zero(lifted.size());
  for (std::size_t i = static_cast<std::size_t>(block.m); i < block.size(); ++i)
    stacked.segment(static_cast<Eigen::Index>(i) * d, d) = theta;
  return lifted.dot(stacked);
}

double selection_beta(const RidgeState& state, const LearnerModel& model) {
  if (state.tau == 0) return 0.0;
  return beta_refined(state.tau, state.lambda, state.delta, model.dim(), model.m, model.gamma);
}

double selection_beta(const BlockRidgeState& state, const LearnerModel& model) {
  if (state.ridge.tau == 0) return 0.0;
  return beta_block(state.ridge.tau, state.ridge.lambda, state.ridge.delta, state.d, state.m,
                    state.l, model.gamma);
}

namespace {

double ucb_from_features(std::span<const Vector> features, const RidgeState& state,
                         UcbVariant variant, double beta) {
  double mean = 0.0;
  for (const Vector& b : features) mean += b.dot(state.theta_hat);
  if (beta == 0.0) return mean;
  if (variant == UcbVariant::kOm) {
    Vector sum = Vector::Zero(state.dim());
    for (const Vector& b : features) sum += b;
    return mean + beta * state.inv_norm(sum);
  }
  double bonus = 0.0;
  for (const Vector& b : features) bonus += state.inv_norm(b);
  return mean + beta * bonus;
}

// Lift with missing tail slots (a shortened final block) left at zero.
Vector padded_lift(const Block& block, const Matrix& a0, double gamma, Eigen::Index dim) {
  const Vector lifted = lift_block(block, a0, gamma);
  Vector out = Vector::Zero(dim);
  out.head(std::min(dim, lifted.size())) = lifted.head(std::min(dim, lifted.size()));
  return out;
}

}  // namespace

double ucb_value(const Block& block, const RidgeState& state, const LearnerModel& model,
                 UcbVariant variant, double beta) {
  const auto features = tail_features(block, model.a0, model.gamma);
  return ucb_from_features(features, state, variant, beta);
}

double ucb_value(const Block& block, const RidgeState& state, const LearnerModel& model,
                 UcbVariant variant) {
  return ucb_value(block, state, model, variant, selection_beta(state, model));
}

double block_ucb_value(const Block& block, const BlockRidgeState& state, const LearnerModel& model,
                       double beta) {
  const Vector b = padded_lift(block, model.a0, model.gamma, state.ridge.dim());
  return b.dot(state.ridge.theta_hat) + beta * state.ridge.inv_norm(b);
}

FeatureTable::FeatureTable(LearnerModel model)
    : model_(std::move(model)), k_(model_.actions.size()) {
  if (!model_.actions.is_finite())
    throw Error(ErrorCode::kInvalidConfig, "feature table needs a finite action set");
}

std::uint64_t FeatureTable::key(std::span<const std::size_t> window, std::size_t action) const {
  std::uint64_t key = 0;
  for (std::size_t w : window) key = key * k_ + w;
  return key * k_ + action;
}

const Vector& FeatureTable::feature(std::uint64_t key, std::span<const std::size_t> window,
                                    std::size_t action) {
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  std::vector<Vector> hist;
  hist.reserve(window.size());
  for (std::size_t w : window) hist.push_back(model_.actions[w]);
  Vector b = memory_matrix(hist, model_.a0, model_.gamma) * model_.actions[action];
  return cache_.emplace(key, std::move(b)).first->second;
}

const Vector& FeatureTable::feature(std::span<const std::size_t> window, std::size_t action) {
  return feature(key(window, action), window, action);
}

SelectResult select_block(const RidgeState& state, const LearnerModel& model, int l,
                          UcbVariant variant, const OptimizerConfig& cfg, std::mt19937_64& rng,
                          FeatureTable* table) {
  if (l < 1) throw Error(ErrorCode::kInvalidConfig, "block tail length must be >= 1");
  const double beta = selection_beta(state, model);
  const auto m = static_cast<std::size_t>(model.m);
  const std::size_t len = m + static_cast<std::size_t>(l);

  if (!model.actions.is_finite()) {
    auto objective = [&](std::span<const Vector> x) {
      Block b{std::vector<Vector>(x.begin(), x.end()), {}, model.m, l};
      return ucb_value(b, state, model, variant, beta);
    };
    auto found = search_ball(model.dim(), len, objective, cfg, rng);
    return {make_block(std::move(found.point), model.m, l), found.value};
  }

  std::optional<FeatureTable> local;
  if (table == nullptr) table = &local.emplace(model);

  // Per-feature mean and V^-1 norm, valid for this state only.
  struct Scored {
    double mean;
    double norm;
    const Vector* b;
  };
  std::unordered_map<std::uint64_t, Scored> scored;
  auto score = [&](std::span<const std::size_t> window, std::size_t a) -> const Scored& {
    const std::uint64_t k = table->key(window, a);
    auto it = scored.find(k);
    if (it != scored.end()) return it->second;
    const Vector& b = table->feature(k, window, a);
    return scored.emplace(k, Scored{b.dot(state.theta_hat), state.inv_norm(b), &b}).first->second;
  };

  Vector sum(model.dim());
  auto objective = [&](std::span<const std::size_t> idx) {
    double mean = 0.0;
    double bonus = 0.0;
    if (variant == UcbVariant::kOm) sum.setZero();
    for (std::size_t i = m; i < len; ++i) {
      const Scored& s = score(idx.subspan(i - m, m), idx[i]);
      mean += s.mean;
      if (variant == UcbVariant::kO3m)
        bonus += s.norm;
      else
        sum += *s.b;
    }
    if (beta == 0.0) return mean;
    if (variant == UcbVariant::kOm) bonus = state.inv_norm(sum);
    return mean + beta * bonus;
  };
  auto found = search_finite(model.actions.size(), len, objective, cfg, rng);
  return {make_block(model.actions, std::move(found.point), model.m, l), found.value};
}

SelectResult select_block_concat(const BlockRidgeState& state, const LearnerModel& model,
                                 const OptimizerConfig& cfg, std::mt19937_64& rng,
                                 FeatureTable* table, std::optional<int> l) {
  const int tail = l.value_or(state.l);
  if (tail < 1 || tail > state.l) throw Error(ErrorCode::kInvalidConfig, "bad tail length");
  const double beta = selection_beta(state, model);
  const auto m = static_cast<std::size_t>(model.m);
  const std::size_t len = m + static_cast<std::size_t>(tail);
  const Eigen::Index d = model.dim();
  const Eigen::Index dim = state.ridge.dim();

  if (!model.actions.is_finite()) {
    auto objective = [&](std::span<const Vector> x) {
      Block b{std::vector<Vector>(x.begin(), x.end()), {}, model.m, tail};
      return block_ucb_value(b, state, model, beta);
    };
    auto found = search_ball(model.dim(), len, objective, cfg, rng);
    return {make_block(std::move(found.point), model.m, tail), found.value};
  }

  std::optional<FeatureTable> local;
  if (table == nullptr) table = &local.emplace(model);
  Vector lifted = Vector::Zero(dim);
  auto objective = [&](std::span<const std::size_t> idx) {
    lifted.setZero();
    for (std::size_t i = 0; i < m; ++i)
      lifted.segment(static_cast<Eigen::Index>(i) * d, d) = model.actions[idx[i]];
    for (std::size_t i = m; i < len; ++i)
      lifted.segment(static_cast<Eigen::Index>(i) * d, d) = table->feature(idx.subspan(i - m, m), idx[i]);
    return lifted.dot(state.ridge.theta_hat) + beta * state.ridge.inv_norm(lifted);
  };
  auto found = search_finite(model.actions.size(), len, objective, cfg, rng);
  return {make_block(model.actions, std::move(found.point), model.m, tail), found.value};
}

void update_refined(RidgeState& state, const Block& block, std::span<const double> rewards,
                    const Matrix& a0, double gamma) {
  if (rewards.size() != block.size())
    throw Error(ErrorCode::kLengthMismatch, "expected " + std::to_string(block.size()) +
                                                " rewards, got " + std::to_string(rewards.size()));
  const auto features = tail_features(block, a0, gamma);
  for (std::size_t j = 0; j < features.size(); ++j)
    state.add(features[j], rewards[static_cast<std::size_t>(block.m) + j]);
  state.finalize();
}

void update_block(BlockRidgeState& state, const Block& block, std::span<const double> rewards,
                  const Matrix& a0, double gamma) {
  if (rewards.size() != block.size())
    throw Error(ErrorCode::kLengthMismatch, "expected " + std::to_string(block.size()) +
                                                " rewards, got " + std::to_string(rewards.size()));
  double y = 0.0;
  for (std::size_t i = static_cast<std::size_t>(block.m); i < rewards.size(); ++i) y += rewards[i];
  state.ridge.add(padded_lift(block, a0, gamma, state.ridge.dim()), y);
  state.ridge.finalize();
}

OmLearner::OmLearner(LearnerModel model, UcbVariant variant, LearnerConfig cfg)
    : model_(std::move(model)),
      variant_(variant),
      cfg_(cfg),
      state_(RidgeState::init(model_.dim(), cfg.lambda, cfg.delta)),
      rng_(cfg.seed) {
  if (cfg_.l < 1) throw Error(ErrorCode::kInvalidConfig, "block tail length must be >= 1");
  cfg_.optimizer.validate();
  if (model_.actions.is_finite()) table_ = std::make_unique<FeatureTable>(model_);
}

SelectResult OmLearner::propose(std::optional<int> tail) {
  return select_block(state_, model_, tail.value_or(cfg_.l), variant_, cfg_.optimizer, rng_,
                      table_.get());
}

void OmLearner::update(const Block& block, std::span<const double> rewards) {
  update_refined(state_, block, rewards, model_.a0, model_.gamma);
}

OmBlockLearner::OmBlockLearner(LearnerModel model, LearnerConfig cfg)
    : model_(std::move(model)),
      cfg_(cfg),
      state_(BlockRidgeState::init(model_.dim(), model_.m, cfg.l, cfg.lambda, cfg.delta)),
      rng_(cfg.seed) {
  if (cfg_.l < 1) throw Error(ErrorCode::kInvalidConfig, "block tail length must be >= 1");
  cfg_.optimizer.validate();
  if (model_.actions.is_finite()) table_ = std::make_unique<FeatureTable>(model_);
}

SelectResult OmBlockLearner::propose(std::optional<int> tail) {
  return select_block_concat(state_, model_, cfg_.optimizer, rng_, table_.get(), tail);
}

void OmBlockLearner::update(const Block& block, std::span<const double> rewards) {
  update_block(state_, block, rewards, model_.a0, model_.gamma);
}

BlockAgent::BlockAgent(std::unique_ptr<BlockLearner> learner, std::int64_t horizon,
                       std::string name)
    : learner_(std::move(learner)), horizon_(horizon), name_(std::move(name)) {
  if (horizon_ < 1) throw Error(ErrorCode::kInvalidConfig, "horizon must be >= 1");
}

Decision BlockAgent::act() {
  if (pos_ == 0) {
    const std::int64_t remaining = horizon_ - t_;
    const int m = learner_->m();
    const int full = m + learner_->l();
    if (remaining >= full || blocks_.empty()) {
      SelectResult r = learner_->propose();
      current_ = std::move(r.block);
      ucbs_.push_back(r.ucb);
      learning_block_ = remaining >= full;
    } else if (remaining > m) {
      SelectResult r = learner_->propose(static_cast<int>(remaining - m));
      current_ = std::move(r.block);
      ucbs_.push_back(r.ucb);
      learning_block_ = true;
    } else {
      current_ = blocks_.back();
      ucbs_.push_back(ucbs_.back());
      learning_block_ = false;
    }
    blocks_.push_back(current_);
    rewards_.clear();
  }
  Decision d{current_.actions[pos_],
             current_.has_indices() ? static_cast<long>(current_.indices[pos_]) : -1,
             blocks_.size() - 1, pos_};
  ++t_;
  return d;
}

void BlockAgent::observe(double reward) {
  rewards_.push_back(reward);
  if (++pos_ == current_.size()) {
    if (learning_block_) learner_->update(current_, rewards_);
    pos_ = 0;
  }
}

namespace {

LearnerConfig resolve_length(LearnerConfig cfg, int m, int d, std::int64_t horizon) {
  if (cfg.l <= 0) cfg.l = block_length(m, d, horizon);
  return cfg;
}

}  // namespace

std::unique_ptr<BlockAgent> make_om_agent(const LbmParams& params, UcbVariant variant,
                                          std::int64_t horizon, LearnerConfig cfg) {
  LearnerModel model = LearnerModel::from(params);
  cfg = resolve_length(cfg, model.m, model.dim(), horizon);
  return std::make_unique<BlockAgent>(std::make_unique<OmLearner>(std::move(model), variant, cfg),
                                      horizon, to_string(variant));
}

std::unique_ptr<BlockAgent> make_om_block_agent(const LbmParams& params, std::int64_t horizon,
                                                LearnerConfig cfg) {
  LearnerModel model = LearnerModel::from(params);
  cfg = resolve_length(cfg, model.m, model.dim(), horizon);
  return std::make_unique<BlockAgent>(std::make_unique<OmBlockLearner>(std::move(model), cfg),
                                      horizon, "om-block");
}

std::unique_ptr<BlockAgent> make_oful_agent(const LbmParams& params, std::int64_t horizon,
                                            LearnerConfig cfg) {
  const int d = params.dim();
  LearnerModel model{params.action_set, 0, 0.0, Matrix::Identity(d, d)};
  cfg.l = 1;
  return std::make_unique<BlockAgent>(
      std::make_unique<OmLearner>(std::move(model), UcbVariant::kOm, cfg), horizon, "oful");
}

Trajectory run_om(const LbmParams& params, std::int64_t horizon, UcbVariant variant,
                  std::uint64_t seed, LearnerConfig cfg) {
  Environment env(params, seed);
  auto agent = make_om_agent(params, variant, horizon, cfg);
  return simulate(env, *agent, horizon);
}

Trajectory run_om_block(const LbmParams& params, std::int64_t horizon, std::uint64_t seed,
                        LearnerConfig cfg) {
  Environment env(params, seed);
  auto agent = make_om_block_agent(params, horizon, cfg);
  return simulate(env, *agent, horizon);
}

}  // namespace lbm
