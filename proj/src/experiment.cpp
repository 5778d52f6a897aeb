#include "tdreg/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "tdreg/evaluation.hpp"
#include "tdreg/features.hpp"

namespace tdreg {

namespace fs = std::filesystem;

std::vector<RunRow> ExperimentResult::reported_rows() const {
  std::vector<RunRow> out;
  for (const TrialResult& t : trials)
    for (const RunRow& r : t.rows) out.push_back(clamp_row(r));
  return out;
}

int ExperimentResult::diverged_count() const {
  return static_cast<int>(std::count_if(trials.begin(), trials.end(),
                                        [](const TrialResult& t) { return t.diverged(); }));
}

namespace {

double action_limit(EnvId id) {
  switch (id) {
    case EnvId::kPendulum: return 2.0;
    case EnvId::kDoublePendulum: return 10.0;
    case EnvId::kLqr: return 1.0;
  }
  return 1.0;
}

class UniformPolicy final : public Policy {
 public:
  UniformPolicy(int obs, int act, double limit) : obs_(obs), act_(act), limit_(limit) {}
  int observation_dim() const override { return obs_; }
  int action_dim() const override { return act_; }
  ActionSample act(const Vec&, Rng& rng, bool) const override {
    return {rng.uniform_vector(act_, -limit_, limit_), 0.0};
  }

 private:
  int obs_, act_;
  double limit_;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path.string());
  os << text;
  if (!os) throw IoError("write failed: " + path.string());
}

}  // namespace

std::vector<Vec> calibration_states(const ExperimentConfig& config) {
  const auto env = make_environment(config);
  UniformPolicy policy(env->observation_dim(), env->action_dim(), action_limit(config.env.id));
  Rng env_rng(config.calibration_seed);
  Rng act_rng(config.calibration_seed + 1);
  std::vector<Vec> states;
  const auto want = static_cast<std::size_t>(std::max(config.calibration_states, 2));
  while (states.size() < want) {
    const Trajectory traj = collect_trajectory(*env, policy, env_rng, act_rng, config.env.horizon);
    for (const Transition& t : traj) {
      if (states.size() == want) break;
      states.push_back(t.state);
    }
  }
  return states;
}

SharedData prepare_shared(const ExperimentConfig& config) {
  SharedData shared;
  if (config.algo.policy_features != FeatureKind::kFourier &&
      config.algo.critic_features != FeatureKind::kFourier)
    return shared;
  const std::string& file = config.calibration_file;
  if (!file.empty() && fs::exists(file)) {
    shared.calibration_states = load_states(file);
  } else {
    shared.calibration_states = calibration_states(config);
    if (!file.empty()) save_states(shared.calibration_states, file);
  }
  Rng rng(config.calibration_seed);
  shared.fourier_bandwidth = mean_pairwise_distance(shared.calibration_states, rng);
  if (!(shared.fourier_bandwidth > 0.0)) throw DataError("calibration states have zero spread");
  return shared;
}

TrialResult run_trial(const ExperimentConfig& config, const SharedData& shared, int trial,
                      const TrialOptions& options) {
  TrialResult result;
  result.trial = trial;
  result.seed = config.seed_base + static_cast<std::uint64_t>(trial);
  const auto env = make_environment(config);
  auto agent = make_agent(config, env, result.seed, shared);

  const int every = std::max(1, config.eval.every);
  bool diverged = false;
  int eval_index = 0;
  auto emit = [&](long long step) {
    RunRow row;
    row.trial = trial;
    row.step = step;
    row.eta = agent->eta();
    if (!diverged) {
      const auto oracle = agent_oracle(config, *agent);
      diverged = detect_divergence(config.env.id, agent->actor_params(), oracle);
      if (!diverged) {
        try {
          const EvalMetrics m = evaluate_agent(config, *env, *agent, result.seed, eval_index);
          row.expected_return = m.reported_return();
          row.mstde_est = m.mstde_est;
          row.mstde_true = m.mstde_true;
          if (!std::isfinite(row.expected_return) && !std::isnan(row.expected_return)) diverged = true;
        } catch (const NumericalError& e) {
          diverged = true;
          result.error = e.what();
        }
      }
    }
    ++eval_index;
    if (diverged) {
      row.expected_return = -std::numeric_limits<double>::infinity();
      row.mstde_est = std::numeric_limits<double>::infinity();
      row.mstde_true = config.env.id == EnvId::kLqr ? std::numeric_limits<double>::infinity()
                                                      : std::nan("");
      row.diverged = true;
    }
    result.rows.push_back(row);
  };

  emit(0);
  for (long long step = 1; step <= config.budget; ++step) {
    if (!diverged) {
      try {
        agent->advance();
      } catch (const NumericalError& e) {
        diverged = true;
        result.error = e.what();
      }
      if (options.record_params) result.param_trace.push_back(agent->actor_params());
    }
    if (step % every == 0 || step == config.budget) emit(step);
  }
  result.stats = agent->stats();
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const TrialOptions& options) {
  config.validate();
  ExperimentResult result;
  result.config = config;
  const SharedData shared = prepare_shared(config);
  const int n = config.trials;
  result.trials.resize(static_cast<std::size_t>(n));
  int threads = config.threads > 0 ? config.threads
                                   : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, std::max(n, 1));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    for (int i = next++; i < n; i = next++) {
      try {
        result.trials[static_cast<std::size_t>(i)] = run_trial(config, shared, i, options);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return result;
}

void export_results(const ExperimentResult& result, const std::string& dir) {
  if (result.trials.empty()) throw UsageError("no trials to export");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
  const fs::path root(dir);
  for (const TrialResult& t : result.trials) {
    std::vector<RunRow> rows;
    for (const RunRow& r : t.rows) rows.push_back(clamp_row(r));
    char name[32];
    std::snprintf(name, sizeof name, "trial_%03d.csv", t.trial);
    write_rows(rows, (root / name).string());
  }
  const std::vector<RunRow> all = result.reported_rows();
  write_rows(all, (root / "runs.csv").string());
  write_text(root / "aggregate.csv", aggregate_to_csv(aggregate(all)));
  write_text(root / "config.cfg", serialize_config(result.config));

  nlohmann::ordered_json meta;
  meta["name"] = result.config.name;
  meta["env"] = to_string(result.config.env.id);
  meta["algorithm"] = to_string(result.config.algo.id);
  meta["regularizer"] = to_string(result.config.algo.regularizer);
  meta["trials"] = result.config.trials;
  meta["seed_base"] = result.config.seed_base;
  meta["diverged"] = result.diverged_count();
  meta["confidence_interval"] = "normal approximation, mean +- 1.96 s / sqrt(n), s = sample std";
  meta["return_floor"] = kReturnFloor;
  meta["mstde_cap"] = kMstdeCap;
  nlohmann::ordered_json stats = nlohmann::ordered_json::array();
  for (const TrialResult& t : result.trials) {
    nlohmann::ordered_json s;
    s["trial"] = t.trial;
    s["seed"] = t.seed;
    s["actor_updates"] = t.stats.actor_updates;
    s["trpo_accepted"] = t.stats.trpo_accepted;
    s["trpo_rejected"] = t.stats.trpo_rejected;
    s["kl_violations"] = t.stats.kl_violations;
    s["max_accepted_kl"] = t.stats.max_accepted_kl;
    s["error"] = t.error;
    stats.push_back(s);
  }
  meta["trial_stats"] = stats;
  write_text(root / "metadata.json", meta.dump(2) + "\n");
}

void write_report(const std::string& dir) {
  const fs::path root(dir);
  const fs::path runs = root / "runs.csv";
  if (!fs::exists(runs)) throw IoError("no runs.csv in " + dir);
  const auto agg = aggregate(read_rows(runs.string()));
  write_text(root / "aggregate.csv", aggregate_to_csv(agg));
  std::ostringstream ret, mstde;
  ret << "# step mean lower upper\n";
  mstde << "# step est_mean est_lower est_upper true_mean true_lower true_upper\n";
  for (const AggregateRow& a : agg) {
    ret << a.step << ' ' << format_double(a.return_mean) << ' '
        << format_double(a.return_mean - a.return_ci) << ' '
        << format_double(a.return_mean + a.return_ci) << '\n';
    mstde << a.step << ' ' << format_double(a.mstde_est_mean) << ' '
          << format_double(a.mstde_est_mean - a.mstde_est_ci) << ' '
          << format_double(a.mstde_est_mean + a.mstde_est_ci) << ' '
          << format_double(a.mstde_true_mean) << ' '
          << format_double(a.mstde_true_mean - a.mstde_true_ci) << ' '
          << format_double(a.mstde_true_mean + a.mstde_true_ci) << '\n';
  }
  write_text(root / "return.dat", ret.str());
  write_text(root / "mstde.dat", mstde.str());
}

std::string resolve_grid_key(const std::string& key) {
  if (key == "kappa" || key == "eta0") return "penalty." + key;
  return key;
}

std::vector<ExperimentResult> run_sweep(const ExperimentConfig& base, const std::string& key,
                                        const std::vector<std::string>& values,
                                        const std::string& dir) {
  const std::string full = resolve_grid_key(key);
  std::vector<ExperimentConfig> configs;
  for (const std::string& v : values) {
    ExperimentConfig c = base;
    set_config_value(c, full, v);
    c.validate();
    configs.push_back(c);
  }
  std::vector<ExperimentResult> out;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    out.push_back(run_experiment(configs[i]));
    const std::string sub = (fs::path(dir) / (key + "=" + values[i])).string();
    export_results(out.back(), sub);
    write_report(sub);
  }
  return out;
}

}  // namespace tdreg
