#include "lbm/combiner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lbm/error.hpp"

namespace lbm {

double compute_c_j(int m_j, double gamma_j, int d, double lambda, double delta, double t_bc,
                   int l_j) {
  const double g = positive_part(gamma_j);
  const double growth = std::pow(m_j + 1.0, 2.0 * g);
  const double m_eff = std::max(m_j, 1);
  const double head = 4.0 * std::cbrt(4.0 * m_eff / d) * std::pow(m_j + 1.0, g);
  const double spread = std::sqrt(d * std::log1p(t_bc * (m_j + l_j) * growth / (d * lambda)));
  const double width =
      std::sqrt(lambda) + std::sqrt(std::log(1.0 / delta) + d * std::log1p(t_bc * growth / (d * lambda)));
  return head * spread * width;
}

double rate_coefficient(double alpha) {
  const double e = (1.0 - alpha) / alpha;
  return std::pow(1.0 - alpha, e) * std::pow(1.0 + alpha, 1.0 / alpha) / std::pow(alpha, e);
}

double target_regret(const CandidateSpec& spec, double t_bc, std::size_t n, double delta) {
  const double t23 = std::pow(t_bc, 2.0 / 3.0);
  const double growth = std::pow(spec.m + 1.0, 2.0 * positive_part(spec.gamma));
  return spec.c * t23 + rate_coefficient(2.0 / 3.0) * std::pow(spec.c, 1.5) * t23 +
         1152.0 * growth * std::cbrt(t_bc) * std::log(t_bc * t_bc * t_bc * n / delta) +
         (static_cast<double>(n) - 1.0) * t23;
}

std::vector<CandidateSpec> make_candidates(const std::vector<std::pair<int, double>>& pairs,
                                           const CombinerSettings& settings, double* t_bc_out,
                                           double* delta_out) {
  if (pairs.empty()) throw Error(ErrorCode::kInvalidConfig, "combiner needs at least one candidate");
  std::vector<CandidateSpec> specs;
  int longest = 1;
  for (const auto& [m, gamma] : pairs) {
    if (m < 0) throw Error(ErrorCode::kInvalidConfig, "candidate memory must be nonnegative");
    CandidateSpec s;
    s.m = m;
    s.gamma = gamma;
    s.l = block_length(m, settings.d, settings.horizon);
    longest = std::max(longest, m + s.l);
    specs.push_back(s);
  }
  const double t_bc = std::max<double>(1.0, static_cast<double>(settings.horizon / longest));
  // At T_bc = 1 the default 1/T_bc is not a valid confidence level.
  const double delta = settings.delta > 0.0 ? settings.delta : std::min(0.5, 1.0 / t_bc);
  for (auto& s : specs) {
    s.c = compute_c_j(s.m, s.gamma, settings.d, settings.lambda, delta, t_bc, s.l);
    s.eta = std::pow(t_bc, -2.0 / 3.0);
    s.r = target_regret(s, t_bc, specs.size(), delta);
  }
  if (t_bc_out) *t_bc_out = t_bc;
  if (delta_out) *delta_out = delta;
  return specs;
}

CombinerState CombinerState::init(std::size_t n, double t_bc, double delta) {
  CombinerState s;
  s.plays.assign(n, 0);
  s.sums.assign(n, 0.0);
  s.drift.assign(n, 0.0);
  s.active.assign(n, true);
  s.t_bc = t_bc;
  s.delta = delta;
  return s;
}

std::size_t CombinerState::active_count() const {
  return static_cast<std::size_t>(std::count(active.begin(), active.end(), true));
}

namespace {

double log_term(const CombinerState& state, std::size_t n) {
  return std::log(state.t_bc * state.t_bc * state.t_bc * static_cast<double>(n) / state.delta);
}

}  // namespace

double combiner_index(std::size_t i, const CombinerState& state,
                      const std::vector<CandidateSpec>& specs) {
  const std::int64_t plays = state.plays.at(i);
  if (plays == 0) throw Error(ErrorCode::kUnplayedCandidate, "candidate has no plays yet");
  const CandidateSpec& s = specs[i];
  const double growth = std::pow(s.m + 1.0, 2.0 * positive_part(s.gamma));
  const double n = static_cast<double>(plays);
  const double bonus =
      s.c / std::sqrt(n) + 4.0 * growth * std::sqrt(2.0 * log_term(state, specs.size()) / n);
  return std::min(growth, bonus) - s.r / state.t_bc;
}

std::size_t choose_candidate(const CombinerState& state, const std::vector<CandidateSpec>& specs) {
  for (std::size_t i = 0; i < specs.size(); ++i)
    if (state.active[i] && state.plays[i] == 0) return i;
  std::size_t best = specs.size();
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (!state.active[i]) continue;
    const double value =
        state.sums[i] / static_cast<double>(state.plays[i]) + combiner_index(i, state, specs);
    if (best == specs.size() || value > best_value) {
      best = i;
      best_value = value;
    }
  }
  return best;
}

bool record_candidate(CombinerState& state, const std::vector<CandidateSpec>& specs,
                      std::size_t i, double averaged_reward) {
  const double mean =
      state.plays[i] == 0 ? 0.0 : state.sums[i] / static_cast<double>(state.plays[i]);
  state.drift[i] += mean - averaged_reward;
  state.sums[i] += averaged_reward;
  state.plays[i] += 1;
  state.rounds += 1;

  const CandidateSpec& s = specs[i];
  const double n = static_cast<double>(state.plays[i]);
  const double growth = std::pow(s.m + 1.0, 2.0 * positive_part(s.gamma));
  const double threshold = s.c * std::pow(n, s.alpha) +
                           12.0 * growth * std::sqrt(2.0 * log_term(state, specs.size()) * n);
  if (state.drift[i] < threshold) return false;

  state.active[i] = false;
  state.eliminated.push_back(i);
  if (state.active_count() == 0) {
    state.active[i] = true;
    state.eliminated.pop_back();
    state.warnings.push_back("all candidates eliminated; reinstated candidate " +
                             std::to_string(i));
    return false;
  }
  return true;
}

Combiner::Combiner(const LearnerModel& base, const std::vector<std::pair<int, double>>& candidates,
                   const CombinerSettings& settings) {
  CombinerSettings s = settings;
  s.d = base.dim();
  double t_bc = 1.0;
  double delta = 0.1;
  specs_ = make_candidates(candidates, s, &t_bc, &delta);
  state_ = CombinerState::init(specs_.size(), t_bc, delta);
  for (std::size_t j = 0; j < specs_.size(); ++j) {
    LearnerModel model{base.actions, specs_[j].m, specs_[j].gamma, base.a0};
    LearnerConfig cfg{specs_[j].l, settings.lambda, delta, settings.optimizer,
                      settings.seed + 7919 * (j + 1)};
    learners_.push_back(std::make_unique<OmLearner>(std::move(model), UcbVariant::kO3m, cfg));
  }
  last_blocks_.resize(specs_.size());
}

Combiner::Pending Combiner::begin_block(std::int64_t remaining) {
  const std::size_t i = choose_candidate(state_, specs_);
  const CandidateSpec& s = specs_[i];
  Pending p{i, {}, true};
  if (remaining >= s.m + s.l || last_blocks_[i].actions.empty()) {
    p.block = learners_[i]->propose().block;
    p.learn = remaining >= s.m + s.l;
  } else if (remaining > s.m) {
    p.block = learners_[i]->propose(static_cast<int>(remaining - s.m)).block;
  } else {
    p.block = last_blocks_[i];
    p.learn = false;
  }
  last_blocks_[i] = p.block;
  return p;
}

void Combiner::finish_block(const Pending& pending, std::span<const double> rewards) {
  if (!pending.learn) return;
  const std::size_t i = pending.candidate;
  learners_[i]->update(pending.block, rewards);
  double tail = 0.0;
  for (std::size_t k = static_cast<std::size_t>(pending.block.m); k < rewards.size(); ++k)
    tail += rewards[k];
  const double averaged = tail / pending.block.l;
  record_candidate(state_, specs_, i, averaged);
  log_.push_back({log_.size(), i, averaged, state_.active_count()});
}

CombinerStepResult combiner_step(Combiner& combiner, Environment& env, std::int64_t remaining) {
  Combiner::Pending p = combiner.begin_block(remaining);
  CombinerStepResult out{p.candidate, p.block, {}};
  for (const Vector& a : p.block.actions) out.rewards.push_back(env.step(a).reward);
  combiner.finish_block(p, out.rewards);
  return out;
}

CombinerAgent::CombinerAgent(std::unique_ptr<Combiner> combiner, std::int64_t horizon,
                             std::string name)
    : combiner_(std::move(combiner)), horizon_(horizon), name_(std::move(name)) {}

Decision CombinerAgent::act() {
  if (pos_ == 0) {
    pending_ = combiner_->begin_block(horizon_ - t_);
    rewards_.clear();
  }
  const Block& b = pending_.block;
  Decision d{b.actions[pos_], b.has_indices() ? static_cast<long>(b.indices[pos_]) : -1, block_,
             pos_};
  ++t_;
  return d;
}

void CombinerAgent::observe(double reward) {
  rewards_.push_back(reward);
  if (++pos_ == pending_.block.size()) {
    combiner_->finish_block(pending_, rewards_);
    pos_ = 0;
    ++block_;
  }
}

ScaledRegretReport scaled_regret_report(double opt, double total_reward,
                                        const std::vector<int>& memory_sizes) {
  if (memory_sizes.empty()) throw Error(ErrorCode::kInvalidConfig, "no memory sizes");
  const auto [lo, hi] = std::minmax_element(memory_sizes.begin(), memory_sizes.end());
  ScaledRegretReport r;
  r.opt = opt;
  r.reward = total_reward;
  r.raw_regret = opt - total_reward;
  r.m_ratio = static_cast<double>(std::max(*hi, 1)) / static_cast<double>(std::max(*lo, 1));
  r.scaled_opt = opt / std::sqrt(r.m_ratio);
  r.scaled_regret = r.scaled_opt - total_reward;
  return r;
}

}  // namespace lbm
