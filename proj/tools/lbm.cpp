// Command-line front end: `lbm run`, `lbm oracle`, `lbm combiner`.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lbm/error.hpp"
#include "lbm/harness.hpp"
#include "lbm/oracles.hpp"

namespace {

using nlohmann::json;

json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw lbm::Error(lbm::ErrorCode::kIo, "cannot open " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw lbm::Error(lbm::ErrorCode::kInvalidConfig, path + ": " + e.what());
  }
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto dash = item.find('-');
    try {
      if (dash != std::string::npos && dash > 0) {
        const auto lo = std::stoull(item.substr(0, dash));
        const auto hi = std::stoull(item.substr(dash + 1));
        for (auto s = lo; s <= hi; ++s) out.push_back(s);
      } else {
        out.push_back(std::stoull(item));
      }
    } catch (const std::exception&) {
      throw lbm::Error(lbm::ErrorCode::kInvalidConfig, "bad seed list '" + text + "'");
    }
  }
  return out;
}

struct RunOptions {
  std::string config_file;
  std::string preset;
  std::vector<std::string> policies;
  std::int64_t horizon = 0;
  std::string seeds;
  std::string out;
  bool unit_ball = false;
  double lambda = 0.0;
  double delta = 0.0;
  int l = 0;
  bool exhaustive = false;
  std::string length_rule;
};

lbm::ExperimentConfig build_config(const RunOptions& o) {
  lbm::ExperimentConfig c;
  if (!o.config_file.empty()) c = lbm::config_from_json(read_json(o.config_file));
  if (!o.preset.empty()) c.preset = o.preset;
  if (!o.policies.empty()) c.policies = o.policies;
  if (o.horizon > 0) c.horizon = o.horizon;
  if (!o.seeds.empty()) c.seeds = parse_seeds(o.seeds);
  if (!o.out.empty()) c.out_dir = o.out;
  if (o.unit_ball) c.unit_ball = true;
  if (o.lambda > 0.0) c.lambda = o.lambda;
  if (o.delta > 0.0) c.delta = o.delta;
  if (o.l > 0) c.l_override = o.l;
  if (o.exhaustive) c.optimizer.exhaustive = true;
  if (o.length_rule == "algorithm") c.length_rule = lbm::LengthRule::kAlgorithm;
  if (o.length_rule == "theorem") c.length_rule = lbm::LengthRule::kTheorem;
  if (c.seeds.empty()) c.seeds = {0};
  if (c.out_dir.empty()) c.out_dir = "out";
  return c;
}

void add_run_options(CLI::App* cmd, RunOptions& o, bool policy_flag) {
  cmd->add_option("--config", o.config_file, "JSON experiment config; flags override it");
  cmd->add_option("--preset", o.preset, "Problem preset");
  if (policy_flag)
    cmd->add_option("--policy", o.policies, "Policy spec, repeatable");
  cmd->add_option("--horizon,-T", o.horizon, "Number of rounds");
  cmd->add_option("--seeds", o.seeds, "Seeds, e.g. 1,2,3 or 1-5");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_flag("--unit-ball", o.unit_ball, "Use the unit ball instead of the finite action set");
  cmd->add_option("--lambda", o.lambda, "Ridge regularization");
  cmd->add_option("--delta", o.delta, "Confidence level");
  cmd->add_option("--L", o.l, "Block tail length (default: from the horizon)");
  cmd->add_flag("--exhaustive", o.exhaustive, "Enumerate blocks when the space is small");
  cmd->add_option("--length-rule", o.length_rule, "theorem | algorithm")
      ->check(CLI::IsMember({"theorem", "algorithm"}));
}

void report(const lbm::ExperimentConfig& config, const lbm::RunRecords& records) {
  lbm::emit(config, records, config.out_dir);
  const json s = lbm::summary_json(config, records);
  for (const auto& [name, e] : s["policies"].items()) {
    std::cout << name << ": cum_expected " << e["cum_expected"]["mean"].get<double>() << " +- "
              << e["cum_expected"]["stderr"].get<double>();
    if (e.contains("regret"))
      std::cout << ", regret " << e["regret"]["mean"].get<double>() << " +- "
                << e["regret"]["stderr"].get<double>();
    std::cout << '\n';
  }
  for (const auto& w : records.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << "wrote " << config.out_dir << " (" << records.runtime_seconds << " s)\n";
}

lbm::LbmParams oracle_params(const json& j) {
  if (j.contains("params")) return lbm::params_from_json(j["params"]);
  lbm::ExperimentConfig c = lbm::config_from_json(j);
  c.horizon = 1;
  return lbm::make_instance(c, j.value("seed", std::uint64_t{0})).params;
}

json run_oracle(const std::string& kind, const json& cfg) {
  const std::int64_t horizon = cfg.value("horizon", std::int64_t{0});
  const int l = cfg.value("L", 1);
  const lbm::LbmParams params = oracle_params(cfg);
  json out;
  out["bound"] = nullptr;
  out["gap"] = nullptr;
  if (kind == "opt") {
    if (horizon < 1) throw lbm::Error(lbm::ErrorCode::kInvalidConfig, "horizon must be >= 1");
    const auto r = lbm::opt_dp(params, horizon);
    out["value"] = r.value;
    out["sequence"] = r.sequence;
  } else if (kind == "best-block") {
    const auto r = lbm::best_block_bruteforce(params, l);
    out["value"] = r.value;
    out["sequence"] = r.block.indices;
  } else {
    if (horizon < 1) throw lbm::Error(lbm::ErrorCode::kInvalidConfig, "horizon must be >= 1");
    std::optional<double> r_inst;
    if (cfg.contains("R")) r_inst = cfg["R"].get<double>();
    const auto g = lbm::approx_gap_check(params, l, horizon, r_inst, cfg.value("tight", false));
    out["value"] = g.opt;
    out["sequence"] = g.opt_sequence;
    out["cyclic"] = g.cyclic;
    out["best_block"] = g.best.block.indices;
    out["bound"] = g.bound;
    out["gap"] = g.gap;
    out["within_bound"] = g.within_bound;
    if (g.tight_lower) out["tight_lower"] = *g.tight_lower;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear bandits with memory: simulations and exact references"};
  app.require_subcommand(1);

  RunOptions run_opts;
  auto* run = app.add_subcommand("run", "Run policies on a preset over several seeds");
  add_run_options(run, run_opts, true);

  std::string oracle_kind, oracle_config, oracle_out;
  auto* oracle = app.add_subcommand("oracle", "Exact references on a finite instance");
  oracle->add_option("kind", oracle_kind, "opt | best-block | gap")
      ->required()
      ->check(CLI::IsMember({"opt", "best-block", "gap"}));
  oracle->add_option("--config", oracle_config, "JSON instance description")->required();
  oracle->add_option("--out", oracle_out, "Write the JSON result here as well");

  RunOptions comb_opts;
  std::string candidates_file;
  auto* comb = app.add_subcommand("combiner", "Run the bandit combiner over candidate models");
  comb->add_option("--candidates", candidates_file, "JSON list of [m, gamma] pairs")->required();
  add_run_options(comb, comb_opts, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto config = build_config(run_opts);
      report(config, lbm::run_experiment(config));
    } else if (*oracle) {
      const json result = run_oracle(oracle_kind, read_json(oracle_config));
      std::cout << result.dump(2) << '\n';
      if (!oracle_out.empty()) {
        std::ofstream f(oracle_out);
        if (!f) throw lbm::Error(lbm::ErrorCode::kIo, "cannot write " + oracle_out);
        f << result.dump(2) << '\n';
      }
    } else if (*comb) {
      auto config = build_config(comb_opts);
      const json cj = read_json(candidates_file);
      const json& list = cj.is_object() ? cj.at("candidates") : cj;
      config.candidates.clear();
      for (const auto& p : list) config.candidates.emplace_back(p.at(0).get<int>(), p.at(1).get<double>());
      if (config.preset.empty()) config.preset = "rotting-fig1";
      config.policies = {"combiner"};
      const auto records = lbm::run_experiment(config);
      report(config, records);
    }
  } catch (const lbm::Error& e) {
    std::cerr << "error [" << lbm::to_string(e.code()) << "]: " << e.what() << '\n';
    return 1;
  } catch (const json::exception& e) {
    std::cerr << "error [InvalidConfig]: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
