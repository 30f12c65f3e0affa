#pragma once

// Bandit combiner over O3M instances with candidate (m, gamma) pairs. The
// master sees block-averaged tail rewards and eliminates candidates whose
// realized average drifts below their own running mean by more than the
// target rate allows.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "lbm/agent.hpp"
#include "lbm/oful_memory.hpp"

namespace lbm {

struct CandidateSpec {
  int m = 0;
  double gamma = 0.0;
  int l = 1;
  double c = 0.0;      // instance constant C_j
  double r = 0.0;      // target regret R_j
  double alpha = 2.0 / 3.0;
  double eta = 1.0;    // T_bc^(-2/3)
};

// C_j. The (4 m_j / d)^(1/3) factor uses max(m_j, 1) so that stationary
// candidates keep a positive constant.
double compute_c_j(int m_j, double gamma_j, int d, double lambda, double delta, double t_bc,
                   int l_j);

// Coefficient of C^(1/alpha) T eta^((1-alpha)/alpha) in the target regret;
// equals 5 sqrt(30) / 18 at alpha = 2/3.
double rate_coefficient(double alpha);

// R_j with alpha = 2/3 and eta = T_bc^(-2/3) for all candidates.
double target_regret(const CandidateSpec& spec, double t_bc, std::size_t n, double delta);

struct CombinerSettings {
  int d = 1;
  double lambda = 1.0;
  double delta = 0.0;  // <= 0 selects 1 / T_bc
  std::int64_t horizon = 1;
  OptimizerConfig optimizer;
  std::uint64_t seed = 0;
};

// Fills l, c, r, eta for each (m, gamma); T_bc = horizon / max_j (m_j + L_j).
std::vector<CandidateSpec> make_candidates(const std::vector<std::pair<int, double>>& pairs,
                                           const CombinerSettings& settings, double* t_bc_out,
                                           double* delta_out);

struct CombinerState {
  std::vector<std::int64_t> plays;
  std::vector<double> sums;
  std::vector<double> drift;
  std::vector<bool> active;
  std::vector<std::size_t> eliminated;  // in elimination order
  std::int64_t rounds = 0;
  double t_bc = 1.0;
  double delta = 0.1;
  std::vector<std::string> warnings;

  static CombinerState init(std::size_t n, double t_bc, double delta);
  std::size_t active_count() const;
};

// Throws Error(kUnplayedCandidate) when candidate i has not been played.
double combiner_index(std::size_t i, const CombinerState& state,
                      const std::vector<CandidateSpec>& specs);

// An unplayed active candidate (lowest index) if any, otherwise the active
// candidate with the largest S_i / T(i) + index.
std::size_t choose_candidate(const CombinerState& state, const std::vector<CandidateSpec>& specs);

// Feeds the averaged tail reward of candidate i and applies the elimination
// test. Returns true when i was eliminated.
bool record_candidate(CombinerState& state, const std::vector<CandidateSpec>& specs,
                      std::size_t i, double averaged_reward);

struct CombinerLogEntry {
  std::size_t block = 0;
  std::size_t candidate = 0;
  double averaged_reward = 0.0;
  std::size_t active = 0;
};

class Combiner {
 public:
  Combiner(const LearnerModel& base, const std::vector<std::pair<int, double>>& candidates,
           const CombinerSettings& settings);

  struct Pending {
    std::size_t candidate = 0;
    Block block;
    bool learn = true;
  };

  // Chooses a candidate and obtains its next block, shortened to fit within
  // `remaining` rounds when necessary.
  Pending begin_block(std::int64_t remaining);
  void finish_block(const Pending& pending, std::span<const double> rewards);

  const CombinerState& state() const { return state_; }
  const std::vector<CandidateSpec>& specs() const { return specs_; }
  const std::vector<CombinerLogEntry>& log() const { return log_; }
  OmLearner& instance(std::size_t i) { return *learners_[i]; }

 private:
  std::vector<CandidateSpec> specs_;
  std::vector<std::unique_ptr<OmLearner>> learners_;
  std::vector<Block> last_blocks_;
  CombinerState state_;
  std::vector<CombinerLogEntry> log_;
};

struct CombinerStepResult {
  std::size_t candidate = 0;
  Block block;
  std::vector<double> rewards;
};

// Plays one combiner round (one full block) against `env`.
CombinerStepResult combiner_step(Combiner& combiner, Environment& env,
                                 std::int64_t remaining = INT64_MAX);

class CombinerAgent : public Agent {
 public:
  CombinerAgent(std::unique_ptr<Combiner> combiner, std::int64_t horizon, std::string name);

  std::string name() const override { return name_; }
  Decision act() override;
  void observe(double reward) override;

  const Combiner& combiner() const { return *combiner_; }

 private:
  std::unique_ptr<Combiner> combiner_;
  std::int64_t horizon_;
  std::string name_;
  std::int64_t t_ = 0;
  std::size_t block_ = 0;
  std::size_t pos_ = 0;
  Combiner::Pending pending_;
  std::vector<double> rewards_;
};

struct ScaledRegretReport {
  double opt = 0.0;
  double reward = 0.0;
  double raw_regret = 0.0;
  double m_ratio = 1.0;  // M = max_j m_j / max(min_j m_j, 1)
  double scaled_opt = 0.0;
  double scaled_regret = 0.0;
};

ScaledRegretReport scaled_regret_report(double opt, double total_reward,
                                        const std::vector<int>& memory_sizes);

}  // namespace lbm
