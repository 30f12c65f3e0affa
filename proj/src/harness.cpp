#include "lbm/harness.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "lbm/combiner.hpp"
#include "lbm/environment.hpp"
#include "lbm/error.hpp"
#include "lbm/oracles.hpp"
#include "lbm/policies.hpp"
#include "lbm/presets.hpp"

namespace lbm {

namespace {

const std::vector<std::string> kPresets = {
    "rotting-fig1",       "combiner-gamma", "combiner-m",    "rising-nonisotropic",
    "rising-appendixD",   "rotting-basis",  "rotting-greedy", "rested-karms"};

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 1469598103934665603ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

Vector random_unit(int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(d);
  do {
    for (int i = 0; i < d; ++i) v(i) = normal(rng);
  } while (v.norm() < 1e-12);
  return v / v.norm();
}

ActionSet sphere_actions(bool unit_ball) {
  return unit_ball ? ActionSet::unit_ball(3) : presets::sphere20();
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

template <typename T>
T parse_number(const std::string& s, const char* what) {
  T v{};
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw Error(ErrorCode::kInvalidConfig, std::string("bad ") + what + ": '" + s + "'");
  return v;
}

std::vector<std::pair<int, double>> parse_candidates(const std::string& text) {
  std::vector<std::pair<int, double>> out;
  for (const auto& item : split(text, ';')) {
    const auto parts = split(item, '/');
    if (parts.size() != 2) throw Error(ErrorCode::kInvalidConfig, "candidate must be m/gamma");
    out.emplace_back(parse_number<int>(parts[0], "candidate m"),
                     parse_number<double>(parts[1], "candidate gamma"));
  }
  return out;
}

std::string action_text(const Decision& d, const ActionSet& set) {
  if (set.is_finite() && d.index >= 0) return std::to_string(d.index);
  std::string out;
  for (Eigen::Index i = 0; i < d.action.size(); ++i) {
    if (i) out += ';';
    out += format_double(d.action(i));
  }
  return out;
}

}  // namespace

std::vector<std::string> preset_names() { return kPresets; }

double ExperimentConfig::effective_delta() const {
  return delta > 0.0 ? delta : std::min(0.5, 1.0 / static_cast<double>(horizon));
}

void ExperimentConfig::validate() const {
  if (horizon < 1) throw Error(ErrorCode::kInvalidConfig, "horizon must be >= 1");
  if (seeds.empty()) throw Error(ErrorCode::kInvalidConfig, "seeds must be nonempty");
  if (policies.empty()) throw Error(ErrorCode::kInvalidConfig, "at least one policy is required");
  if (!params) {
    bool known = false;
    for (const auto& p : kPresets) known = known || p == preset;
    if (!known) throw Error(ErrorCode::kInvalidConfig, "unknown preset '" + preset + "'");
  } else {
    params->validate();
  }
  if (!(lambda > 0.0)) throw Error(ErrorCode::kInvalidConfig, "lambda must be > 0");
  if (!(delta <= 0.0 || delta < 1.0)) throw Error(ErrorCode::kInvalidConfig, "delta must be in (0,1)");
  optimizer.validate();
  for (const auto& p : policies) {
    const PolicySpec spec = parse_policy(p);
    if (spec.kind == PolicyKind::kCombiner && spec.candidates.empty() && candidates.empty())
      throw Error(ErrorCode::kInvalidConfig, "combiner policy needs a candidate list");
  }
}

Instance make_instance(const ExperimentConfig& config, std::uint64_t seed) {
  Instance inst;
  const auto& o = config.overrides;
  bool greedy_optimal = false;
  if (config.params) {
    inst.params = *config.params;
  } else if (config.preset == "rotting-fig1" || config.preset == "combiner-gamma" ||
             config.preset == "combiner-m") {
    const int m = o.m.value_or(2);
    inst.params = make_params(random_unit(3, seed), m, o.gamma.value_or(-3.0),
                              sphere_actions(config.unit_ball), o.sigma.value_or(0.1));
  } else if (config.preset == "rising-nonisotropic") {
    inst.params = presets::rising_nonisotropic(o.m.value_or(2), o.eps.value_or(0.1),
                                               o.sigma.value_or(0.1), config.unit_ball);
    if (o.gamma) inst.params.gamma = *o.gamma;
  } else if (config.preset == "rising-appendixD") {
    inst.params = make_params(random_unit(3, seed), o.m.value_or(1), o.gamma.value_or(2.0),
                              sphere_actions(config.unit_ball), o.sigma.value_or(0.1));
    greedy_optimal = true;
  } else if (config.preset == "rotting-basis") {
    inst.params = presets::rotting_basis(o.m.value_or(2), o.gamma.value_or(-1.0),
                                         o.sigma.value_or(0.0));
  } else if (config.preset == "rotting-greedy") {
    inst.params = presets::rotting_greedy(o.d.value_or(3), -o.gamma.value_or(-2.0),
                                          o.sigma.value_or(0.0));
  } else if (config.preset == "rested-karms") {
    const int k = o.k.value_or(10);
    inst.params = presets::rested_karms(k, o.m.value_or(0), o.gamma.value_or(0.0),
                                        o.sigma.value_or(0.1));
    inst.params.theta_star = random_unit(k, seed);
  } else {
    throw Error(ErrorCode::kInvalidConfig, "unknown preset '" + config.preset + "'");
  }
  inst.params.validate();

  const auto& p = inst.params;
  if (p.action_set.is_finite() && !greedy_optimal) {
    try {
      inst.reference = opt_dp(p, config.horizon).rewards;
      inst.reference_source = "dp";
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kStateSpaceTooLarge) throw;
    }
  } else if (greedy_optimal) {
    // Rising isotropic memory: replaying the greedy action is optimal.
    LbmParams quiet = p;
    quiet.noise_sigma = 0.0;
    Environment env(quiet, 0);
    OracleGreedyAgent greedy(quiet);
    std::vector<double> ref;
    for (const auto& s : simulate(env, greedy, config.horizon)) ref.push_back(s.expected);
    inst.reference = std::move(ref);
    inst.reference_source = "greedy";
  }
  return inst;
}

PolicySpec parse_policy(const std::string& text) {
  PolicySpec s;
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  auto no_arg = [&](PolicyKind k) {
    if (colon != std::string::npos)
      throw Error(ErrorCode::kInvalidConfig, "policy '" + head + "' takes no argument");
    s.kind = k;
    s.label = head;
  };
  if (head == "greedy") {
    no_arg(PolicyKind::kGreedy);
  } else if (head == "oful") {
    no_arg(PolicyKind::kOful);
  } else if (head == "om") {
    no_arg(PolicyKind::kOm);
  } else if (head == "o3m") {
    no_arg(PolicyKind::kO3m);
  } else if (head == "om-block") {
    no_arg(PolicyKind::kOmBlock);
  } else if (head == "combiner-gamma") {
    no_arg(PolicyKind::kCombinerGamma);
  } else if (head == "combiner-m") {
    no_arg(PolicyKind::kCombinerM);
  } else if (head == "cyclic") {
    s.kind = PolicyKind::kCyclic;
    std::string norm = arg;
    for (char& c : norm)
      if (c == ',') c = '-';
    for (const auto& item : split(norm, '-'))
      s.indices.push_back(parse_number<std::size_t>(item, "cyclic index"));
    if (s.indices.empty()) throw Error(ErrorCode::kInvalidConfig, "cyclic needs indices");
    s.label = "cyclic:" + norm;
  } else if (head == "cyclic-best") {
    s.kind = PolicyKind::kCyclicBest;
    s.l = parse_number<int>(arg, "cyclic-best L");
    if (s.l < 1) throw Error(ErrorCode::kInvalidConfig, "cyclic-best needs L >= 1");
    s.label = text;
  } else if (head == "fixed") {
    s.kind = PolicyKind::kFixed;
    s.fixed = parse_number<long>(arg, "fixed index");
    s.label = text;
  } else if (head == "combiner") {
    s.kind = PolicyKind::kCombiner;
    if (!arg.empty()) s.candidates = parse_candidates(arg);
    s.label = text;
  } else {
    throw Error(ErrorCode::kInvalidConfig, "unknown policy '" + text + "'");
  }
  if (s.label.find_first_of(",\"\n") != std::string::npos)
    throw Error(ErrorCode::kInvalidConfig, "policy label not CSV-safe: " + s.label);
  return s;
}

unsigned worker_threads() {
  if (const char* env = std::getenv("LBM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

RunRecords run_cell(const ExperimentConfig& config, const Instance& instance, std::uint64_t seed,
                    const std::string& policy) {
  const PolicySpec spec = parse_policy(policy);
  const LbmParams& params = instance.params;
  LearnerConfig lc;
  lc.l = config.l_override > 0
             ? config.l_override
             : block_length(params.m, params.dim(), config.horizon, config.length_rule);
  lc.lambda = config.lambda;
  lc.delta = config.effective_delta();
  lc.optimizer = config.optimizer;
  lc.seed = fnv1a(spec.label, seed);

  std::unique_ptr<Agent> agent;
  CombinerAgent* combiner_agent = nullptr;
  auto combiner_with = [&](std::vector<std::pair<int, double>> pairs) {
    CombinerSettings cs;
    cs.d = params.dim();
    cs.lambda = config.lambda;
    cs.horizon = config.horizon;
    cs.optimizer = config.optimizer;
    cs.seed = lc.seed;
    auto c = std::make_unique<Combiner>(LearnerModel::from(params), pairs, cs);
    auto a = std::make_unique<CombinerAgent>(std::move(c), config.horizon, spec.label);
    combiner_agent = a.get();
    agent = std::move(a);
  };
  switch (spec.kind) {
    case PolicyKind::kGreedy:
      agent = std::make_unique<OracleGreedyAgent>(params);
      break;
    case PolicyKind::kCyclic: {
      const int len = static_cast<int>(spec.indices.size());
      if (len <= params.m)
        throw Error(ErrorCode::kInvalidConfig, "cyclic block must be longer than m");
      agent = std::make_unique<CyclicAgent>(
          make_block(params.action_set, spec.indices, params.m, len - params.m), spec.label);
      break;
    }
    case PolicyKind::kCyclicBest:
      agent = std::make_unique<CyclicAgent>(best_block_bruteforce(params, spec.l).block,
                                            spec.label);
      break;
    case PolicyKind::kFixed: {
      if (!params.action_set.is_finite() || spec.fixed < 0 ||
          static_cast<std::size_t>(spec.fixed) >= params.action_set.size())
        throw Error(ErrorCode::kActionOutOfSet, "fixed index outside the action set");
      agent = std::make_unique<FixedActionAgent>(
          params.action_set[static_cast<std::size_t>(spec.fixed)], spec.fixed, spec.label);
      break;
    }
    case PolicyKind::kOful:
      agent = make_oful_agent(params, config.horizon, lc);
      break;
    case PolicyKind::kOm:
      agent = make_om_agent(params, UcbVariant::kOm, config.horizon, lc);
      break;
    case PolicyKind::kO3m:
      agent = make_om_agent(params, UcbVariant::kO3m, config.horizon, lc);
      break;
    case PolicyKind::kOmBlock:
      agent = make_om_block_agent(params, config.horizon, lc);
      break;
    case PolicyKind::kCombinerGamma: {
      std::vector<std::pair<int, double>> pairs;
      for (double g : {-4.0, -3.0, -2.0, -1.0, 0.0}) pairs.emplace_back(params.m, g);
      combiner_with(pairs);
      break;
    }
    case PolicyKind::kCombinerM: {
      std::vector<std::pair<int, double>> pairs;
      for (int m : {0, 2, 3}) pairs.emplace_back(m, params.gamma);
      combiner_with(pairs);
      break;
    }
    case PolicyKind::kCombiner:
      combiner_with(spec.candidates.empty() ? config.candidates : spec.candidates);
      break;
  }

  Environment env(params, seed);
  RunRecords out;
  out.rows.reserve(static_cast<std::size_t>(config.horizon));
  double cum = 0.0, cum_ref = 0.0, total_reward = 0.0;
  for (std::int64_t t = 1; t <= config.horizon; ++t) {
    const Decision d = agent->act();
    const StepResult r = env.step(d.action);
    agent->observe(r.reward);
    cum += r.expected;
    total_reward += r.reward;
    RunRow row;
    row.seed = seed;
    row.t = t;
    row.policy = spec.label;
    row.action = action_text(d, params.action_set);
    row.reward = r.reward;
    row.expected_reward = r.expected;
    row.cum_expected = cum;
    if (instance.reference) {
      cum_ref += (*instance.reference)[static_cast<std::size_t>(t - 1)];
      row.regret = cum_ref - cum;
    }
    out.rows.push_back(std::move(row));
  }
  RunSummary s;
  s.seed = seed;
  s.policy = spec.label;
  s.total_reward = total_reward;
  s.total_expected = cum;
  if (instance.reference) {
    s.opt = cum_ref;
    s.regret = cum_ref - cum;
  }
  out.summaries.push_back(s);

  if (combiner_agent) {
    const Combiner& c = combiner_agent->combiner();
    for (const auto& e : c.log()) {
      const auto& cs = c.specs()[e.candidate];
      out.combiner_log.push_back(
          {seed, spec.label, e.block, e.candidate, cs.m, cs.gamma, e.averaged_reward, e.active});
    }
    for (const auto& w : c.state().warnings)
      out.warnings.push_back("seed " + std::to_string(seed) + " " + spec.label + ": " + w);
  }
  return out;
}

RunRecords run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n_seeds = config.seeds.size();
  const std::size_t n_pol = config.policies.size();
  const unsigned threads =
      static_cast<unsigned>(std::min<std::size_t>(worker_threads(), n_seeds * n_pol));

  auto parallel = [&](std::size_t n, const std::function<void(std::size_t)>& job) {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex mu;
    auto worker = [&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!failure) failure = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  };

  std::vector<Instance> instances(n_seeds);
  parallel(n_seeds, [&](std::size_t i) { instances[i] = make_instance(config, config.seeds[i]); });
  std::vector<RunRecords> cells(n_seeds * n_pol);
  parallel(cells.size(), [&](std::size_t c) {
    const std::size_t si = c / n_pol;
    cells[c] = run_cell(config, instances[si], config.seeds[si], config.policies[c % n_pol]);
  });

  RunRecords out;
  for (auto& cell : cells) {
    out.rows.insert(out.rows.end(), std::make_move_iterator(cell.rows.begin()),
                    std::make_move_iterator(cell.rows.end()));
    out.summaries.insert(out.summaries.end(), cell.summaries.begin(), cell.summaries.end());
    out.combiner_log.insert(out.combiner_log.end(), cell.combiner_log.begin(),
                            cell.combiner_log.end());
    out.warnings.insert(out.warnings.end(), cell.warnings.begin(), cell.warnings.end());
  }
  out.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

namespace {

std::vector<CurvePoint> aggregate(const std::vector<RunRow>& rows, const std::string& policy,
                                  const std::function<double(const RunRow&)>& value) {
  std::map<std::int64_t, std::vector<double>> by_t;
  for (const auto& r : rows)
    if (r.policy == policy) by_t[r.t].push_back(value(r));
  std::vector<CurvePoint> out;
  for (const auto& [t, xs] : by_t) {
    CurvePoint p;
    p.t = t;
    p.n = xs.size();
    for (double x : xs) p.mean += x;
    p.mean /= static_cast<double>(p.n);
    if (p.n > 1) {
      double ss = 0.0;
      for (double x : xs) ss += (x - p.mean) * (x - p.mean);
      p.stderr_ = std::sqrt(ss / static_cast<double>(p.n - 1) / static_cast<double>(p.n));
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace

std::vector<CurvePoint> regret_curve(const std::vector<RunRow>& rows, const std::string& policy) {
  return aggregate(rows, policy, [](const RunRow& r) {
    if (!r.regret) throw Error(ErrorCode::kMissingReference, "no regret reference for this run");
    return *r.regret;
  });
}

std::vector<CurvePoint> regret_curve(const std::vector<RunRow>& rows, const std::string& policy,
                                     const RegretReference& reference) {
  std::vector<double> prefix;
  if (reference.per_round) {
    double acc = 0.0;
    for (double x : *reference.per_round) prefix.push_back(acc += x);
  } else if (!reference.rate) {
    throw Error(ErrorCode::kMissingReference, "no regret reference given");
  }
  return aggregate(rows, policy, [&](const RunRow& r) {
    double opt;
    if (reference.per_round) {
      if (r.t < 1 || static_cast<std::size_t>(r.t) > prefix.size())
        throw Error(ErrorCode::kMissingReference, "reference shorter than the run");
      opt = prefix[static_cast<std::size_t>(r.t - 1)];
    } else {
      opt = *reference.rate * static_cast<double>(r.t);
    }
    return opt - r.cum_expected;
  });
}

std::vector<CurvePoint> cumulative_curve(const std::vector<RunRow>& rows,
                                         const std::string& policy) {
  return aggregate(rows, policy, [](const RunRow& r) { return r.cum_expected; });
}

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const std::vector<RunRow>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.seed << ',' << r.t << ',' << r.policy << ',' << r.action << ','
        << format_double(r.reward) << ',' << format_double(r.expected_reward) << ','
        << format_double(r.cum_expected) << ',';
    if (r.regret) out << format_double(*r.regret);
    out << '\n';
  }
}

std::vector<RunRow> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw Error(ErrorCode::kIo, "CSV header does not match the run schema");
  std::vector<RunRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 8)
      throw Error(ErrorCode::kIo, "line " + std::to_string(lineno) + ": expected 8 fields");
    RunRow r;
    r.seed = parse_number<std::uint64_t>(f[0], "seed");
    r.t = parse_number<std::int64_t>(f[1], "t");
    r.policy = f[2];
    r.action = f[3];
    r.reward = parse_number<double>(f[4], "reward");
    r.expected_reward = parse_number<double>(f[5], "expected_reward");
    r.cum_expected = parse_number<double>(f[6], "cum_expected");
    if (!f[7].empty()) r.regret = parse_number<double>(f[7], "regret");
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_combiner_log(std::ostream& out, const std::vector<CombinerLogRow>& rows) {
  out << "seed,policy,block,candidate,m,gamma,averaged_reward,active\n";
  for (const auto& r : rows)
    out << r.seed << ',' << r.policy << ',' << r.block << ',' << r.candidate << ',' << r.m << ','
        << format_double(r.gamma) << ',' << format_double(r.averaged_reward) << ',' << r.active
        << '\n';
}

namespace {

nlohmann::json vector_json(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Vector json_vector(const nlohmann::json& j) {
  const auto xs = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

nlohmann::json params_json(const LbmParams& p) {
  nlohmann::json j;
  j["theta"] = vector_json(p.theta_star);
  j["m"] = p.m;
  j["gamma"] = p.gamma;
  j["sigma"] = p.noise_sigma;
  nlohmann::json a0 = nlohmann::json::array();
  for (Eigen::Index r = 0; r < p.a0.rows(); ++r) a0.push_back(vector_json(p.a0.row(r).transpose()));
  j["a0"] = a0;
  if (p.action_set.is_finite()) {
    nlohmann::json acts = nlohmann::json::array();
    for (const auto& a : p.action_set.actions()) acts.push_back(vector_json(a));
    j["actions"] = acts;
  } else {
    j["actions"] = "unit-ball";
  }
  return j;
}

}  // namespace

LbmParams params_from_json(const nlohmann::json& j) {
  try {
    const Vector theta = json_vector(j.at("theta"));
    const int d = static_cast<int>(theta.size());
    ActionSet set = ActionSet::unit_ball(d);
    if (j.contains("actions") && j["actions"].is_array()) {
      std::vector<Vector> acts;
      for (const auto& a : j["actions"]) acts.push_back(json_vector(a));
      set = ActionSet::finite(std::move(acts));
    }
    Matrix a0;
    if (j.contains("a0")) {
      const auto& rows = j["a0"];
      a0 = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), d);
      for (std::size_t r = 0; r < rows.size(); ++r)
        a0.row(static_cast<Eigen::Index>(r)) = json_vector(rows[r]).transpose();
    }
    return make_params(theta, j.at("m").get<int>(), j.at("gamma").get<double>(), std::move(set),
                       j.value("sigma", 0.0), a0);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("params: ") + e.what());
  }
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  if (c.params)
    j["params"] = params_json(*c.params);
  else
    j["preset"] = c.preset;
  nlohmann::json o = nlohmann::json::object();
  if (c.overrides.m) o["m"] = *c.overrides.m;
  if (c.overrides.gamma) o["gamma"] = *c.overrides.gamma;
  if (c.overrides.sigma) o["sigma"] = *c.overrides.sigma;
  if (c.overrides.eps) o["eps"] = *c.overrides.eps;
  if (c.overrides.k) o["k"] = *c.overrides.k;
  if (c.overrides.d) o["d"] = *c.overrides.d;
  j["overrides"] = o;
  j["unit_ball"] = c.unit_ball;
  j["policies"] = c.policies;
  j["horizon"] = c.horizon;
  j["seeds"] = c.seeds;
  j["lambda"] = c.lambda;
  j["delta"] = c.delta;
  j["L"] = c.l_override;
  j["length_rule"] = c.length_rule == LengthRule::kTheorem ? "theorem" : "algorithm";
  j["optimizer"] = {{"restarts", c.optimizer.restarts},
                    {"max_sweeps", c.optimizer.max_sweeps},
                    {"ball_iterations", c.optimizer.ball_iterations},
                    {"ball_step", c.optimizer.ball_step},
                    {"fd_step", c.optimizer.fd_step},
                    {"exhaustive", c.optimizer.exhaustive},
                    {"exhaustive_cap", c.optimizer.exhaustive_cap}};
  nlohmann::json cands = nlohmann::json::array();
  for (const auto& [m, g] : c.candidates) cands.push_back({m, g});
  j["candidates"] = cands;
  j["out"] = c.out_dir;
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    if (j.contains("params")) c.params = params_from_json(j["params"]);
    c.preset = j.value("preset", std::string());
    if (j.contains("overrides")) {
      const auto& o = j["overrides"];
      if (o.contains("m")) c.overrides.m = o["m"].get<int>();
      if (o.contains("gamma")) c.overrides.gamma = o["gamma"].get<double>();
      if (o.contains("sigma")) c.overrides.sigma = o["sigma"].get<double>();
      if (o.contains("eps")) c.overrides.eps = o["eps"].get<double>();
      if (o.contains("k")) c.overrides.k = o["k"].get<int>();
      if (o.contains("d")) c.overrides.d = o["d"].get<int>();
    }
    c.unit_ball = j.value("unit_ball", false);
    c.policies = j.value("policies", std::vector<std::string>{});
    c.horizon = j.value("horizon", std::int64_t{1});
    c.seeds = j.value("seeds", std::vector<std::uint64_t>{});
    c.lambda = j.value("lambda", 1.0);
    c.delta = j.value("delta", 0.0);
    c.l_override = j.value("L", 0);
    const std::string rule = j.value("length_rule", std::string("theorem"));
    if (rule == "theorem")
      c.length_rule = LengthRule::kTheorem;
    else if (rule == "algorithm")
      c.length_rule = LengthRule::kAlgorithm;
    else
      throw Error(ErrorCode::kInvalidConfig, "length_rule must be theorem or algorithm");
    if (j.contains("optimizer")) {
      const auto& o = j["optimizer"];
      auto& opt = c.optimizer;
      opt.restarts = o.value("restarts", opt.restarts);
      opt.max_sweeps = o.value("max_sweeps", opt.max_sweeps);
      opt.ball_iterations = o.value("ball_iterations", opt.ball_iterations);
      opt.ball_step = o.value("ball_step", opt.ball_step);
      opt.fd_step = o.value("fd_step", opt.fd_step);
      opt.exhaustive = o.value("exhaustive", opt.exhaustive);
      opt.exhaustive_cap = o.value("exhaustive_cap", opt.exhaustive_cap);
    }
    if (j.contains("candidates"))
      for (const auto& p : j["candidates"]) c.candidates.emplace_back(p.at(0).get<int>(), p.at(1).get<double>());
    c.out_dir = j.value("out", std::string());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("config: ") + e.what());
  }
  return c;
}

nlohmann::json summary_json(const ExperimentConfig& config, const RunRecords& records) {
  nlohmann::json j;
  j["config"] = config_to_json(config);
  j["runtime_seconds"] = records.runtime_seconds;
  nlohmann::json pol = nlohmann::json::object();
  for (const auto& name : config.policies) {
    const std::string label = parse_policy(name).label;
    std::vector<double> exp_tot, rew_tot, reg;
    bool all_regret = true;
    for (const auto& s : records.summaries) {
      if (s.policy != label) continue;
      exp_tot.push_back(s.total_expected);
      rew_tot.push_back(s.total_reward);
      if (s.regret)
        reg.push_back(*s.regret);
      else
        all_regret = false;
    }
    auto stats = [](const std::vector<double>& xs) {
      double mean = 0.0, ss = 0.0;
      for (double x : xs) mean += x;
      mean /= std::max<std::size_t>(xs.size(), 1);
      for (double x : xs) ss += (x - mean) * (x - mean);
      const double se =
          xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1) / xs.size()) : 0.0;
      return nlohmann::json{{"mean", mean}, {"stderr", se}, {"n", xs.size()}};
    };
    nlohmann::json e;
    e["cum_expected"] = stats(exp_tot);
    e["cum_reward"] = stats(rew_tot);
    if (all_regret && !reg.empty()) e["regret"] = stats(reg);
    pol[label] = e;
  }
  j["policies"] = pol;
  j["warnings"] = records.warnings;
  return j;
}

void emit(const ExperimentConfig& config, const RunRecords& records, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir + ": " + ec.message());
  auto open = [&](const std::string& name) {
    std::ofstream f(fs::path(dir) / name, std::ios::binary);
    if (!f) throw Error(ErrorCode::kIo, "cannot write " + (fs::path(dir) / name).string());
    return f;
  };
  {
    auto f = open("runs.csv");
    write_csv(f, records.rows);
    if (!f) throw Error(ErrorCode::kIo, "write failed: runs.csv");
  }
  {
    auto f = open("summary.json");
    f << summary_json(config, records).dump(2) << '\n';
  }
  if (!records.combiner_log.empty()) {
    auto f = open("combiner_log.csv");
    write_combiner_log(f, records.combiner_log);
  }
}

}  // namespace lbm
