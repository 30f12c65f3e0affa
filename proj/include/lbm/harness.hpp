#pragma once

// Experiment orchestration: presets, seeded runs over (seed x policy) cells,
// regret against exact references, CSV and JSON output.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lbm/block_search.hpp"
#include "lbm/memory.hpp"
#include "lbm/oful_memory.hpp"

namespace lbm {

// Optional replacements for preset constants.
struct PresetOverrides {
  std::optional<int> m;
  std::optional<double> gamma;
  std::optional<double> sigma;
  std::optional<double> eps;
  std::optional<int> k;
  std::optional<int> d;
};

struct ExperimentConfig {
  std::string preset;
  std::optional<LbmParams> params;  // used instead of a preset when set
  PresetOverrides overrides;
  bool unit_ball = false;
  std::vector<std::string> policies;
  std::int64_t horizon = 1;
  std::vector<std::uint64_t> seeds;
  double lambda = 1.0;
  double delta = 0.0;  // <= 0 selects min(0.5, 1 / horizon)
  int l_override = 0;  // <= 0 picks the block length from the horizon
  LengthRule length_rule = LengthRule::kTheorem;
  OptimizerConfig optimizer;
  std::vector<std::pair<int, double>> candidates;  // for the plain `combiner` policy
  std::string out_dir;

  void validate() const;
  double effective_delta() const;
};

std::vector<std::string> preset_names();

// Problem instance for one seed, with an exact reference when one is cheap:
// dynamic programming on finite sets, noiseless greedy where greedy is
// optimal in closed form.
struct Instance {
  LbmParams params;
  std::optional<std::vector<double>> reference;  // optimal expected reward per round
  std::string reference_source = "none";         // dp | greedy | none
};

Instance make_instance(const ExperimentConfig& config, std::uint64_t seed);

enum class PolicyKind {
  kGreedy, kCyclic, kCyclicBest, kFixed, kOful, kOm, kO3m, kOmBlock,
  kCombinerGamma, kCombinerM, kCombiner
};

struct PolicySpec {
  PolicyKind kind = PolicyKind::kGreedy;
  std::string label;  // canonical text, safe inside a CSV field
  std::vector<std::size_t> indices;  // cyclic
  int l = 0;                         // cyclic-best
  long fixed = -1;
  std::vector<std::pair<int, double>> candidates;  // combiner:m/g;m/g
};

// greedy | cyclic:i-j-k | cyclic-best:L | fixed:i | oful | om | o3m | om-block
// | combiner-gamma | combiner-m | combiner[:m/g;m/g...]
PolicySpec parse_policy(const std::string& text);

struct RunRow {
  std::uint64_t seed = 0;
  std::int64_t t = 0;
  std::string policy;
  std::string action;  // index on finite sets, ';'-joined components otherwise
  double reward = 0.0;
  double expected_reward = 0.0;
  double cum_expected = 0.0;
  std::optional<double> regret;

  bool operator==(const RunRow&) const = default;
};

struct RunSummary {
  std::uint64_t seed = 0;
  std::string policy;
  double total_reward = 0.0;
  double total_expected = 0.0;
  std::optional<double> opt;
  std::optional<double> regret;
};

struct CombinerLogRow {
  std::uint64_t seed = 0;
  std::string policy;
  std::size_t block = 0;
  std::size_t candidate = 0;
  int m = 0;
  double gamma = 0.0;
  double averaged_reward = 0.0;
  std::size_t active = 0;
};

struct RunRecords {
  std::vector<RunRow> rows;  // seed-major, then policy order, then t
  std::vector<RunSummary> summaries;
  std::vector<CombinerLogRow> combiner_log;
  std::vector<std::string> warnings;
  double runtime_seconds = 0.0;
};

// Number of worker threads: LBM_THREADS when set, otherwise the hardware count.
unsigned worker_threads();

RunRecords run_experiment(const ExperimentConfig& config);

// Runs one policy on one seed. The learner RNG derives from the seed and the
// policy label, so cells are independent of policy order.
RunRecords run_cell(const ExperimentConfig& config, const Instance& instance, std::uint64_t seed,
                    const std::string& policy);

struct CurvePoint {
  std::int64_t t = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
};

struct RegretReference {
  std::optional<double> rate;                    // constant optimal reward per round
  std::optional<std::vector<double>> per_round;  // optimal expected reward per round
};

// Mean and standard error across seeds of the logged regret column.
std::vector<CurvePoint> regret_curve(const std::vector<RunRow>& rows, const std::string& policy);
// Same, with regret recomputed from cum_expected against an explicit reference.
std::vector<CurvePoint> regret_curve(const std::vector<RunRow>& rows, const std::string& policy,
                                     const RegretReference& reference);
// Mean and standard error of cum_expected.
std::vector<CurvePoint> cumulative_curve(const std::vector<RunRow>& rows,
                                         const std::string& policy);

inline constexpr const char* kCsvHeader =
    "seed,t,policy,action,reward,expected_reward,cum_expected,regret";

std::string format_double(double x);
void write_csv(std::ostream& out, const std::vector<RunRow>& rows);
std::vector<RunRow> parse_csv(std::istream& in);
void write_combiner_log(std::ostream& out, const std::vector<CombinerLogRow>& rows);

nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);
LbmParams params_from_json(const nlohmann::json& j);
nlohmann::json summary_json(const ExperimentConfig& config, const RunRecords& records);

// Writes runs.csv, summary.json and, when present, combiner_log.csv.
void emit(const ExperimentConfig& config, const RunRecords& records, const std::string& dir);

}  // namespace lbm
