#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "tdreg/experiment.hpp"

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed_base;
  std::optional<int> trials;
  std::optional<int> threads;
  std::string out;
  std::vector<std::string> set;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed-base", o.seed_base, "First trial seed");
  cmd->add_option("--trials", o.trials, "Number of trials");
  cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--set", o.set, "Extra key=value overrides");
}

tdreg::ExperimentConfig load(const std::string& path, const Overrides& o) {
  tdreg::ExperimentConfig cfg = tdreg::load_config(path);
  if (o.seed_base) cfg.seed_base = *o.seed_base;
  if (o.trials) cfg.trials = *o.trials;
  if (o.threads) cfg.threads = *o.threads;
  if (!o.out.empty()) cfg.output = o.out;
  for (const std::string& kv : o.set) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw tdreg::ConfigError("--set expects key=value: " + kv);
    tdreg::set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

void summarize(const tdreg::ExperimentResult& r, const std::string& label) {
  std::vector<double> finals;
  for (const auto& t : r.trials) finals.push_back(tdreg::clamp_row(t.rows.back()).expected_return);
  const auto [mean, ci] = tdreg::mean_ci(finals);
  std::printf("%s: trials=%zu diverged=%d final_return=%s +- %s\n", label.c_str(), r.trials.size(),
              r.diverged_count(), tdreg::format_double(mean).c_str(),
              tdreg::format_double(ci).c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TD-regularized actor-critic experiments"};
  app.require_subcommand(1);

  Overrides run_o;
  std::string run_cfg;
  auto* run = app.add_subcommand("run", "Run every trial of one config");
  run->add_option("config", run_cfg, "Config file")->required()->check(CLI::ExistingFile);
  add_overrides(run, run_o);

  Overrides sweep_o;
  std::string sweep_cfg, grid;
  auto* sweep = app.add_subcommand("sweep", "Run one config per grid value");
  sweep->add_option("config", sweep_cfg, "Config file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--grid", grid, "key=v1,v2,...")->required();
  add_overrides(sweep, sweep_o);

  std::string report_dir;
  auto* report = app.add_subcommand("report", "Rebuild aggregate and plot data from runs.csv");
  report->add_option("dir", report_dir, "Results directory")->required()->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto cfg = load(run_cfg, run_o);
      const auto result = tdreg::run_experiment(cfg);
      tdreg::export_results(result, cfg.output);
      tdreg::write_report(cfg.output);
      summarize(result, cfg.name);
    } else if (*sweep) {
      const auto cfg = load(sweep_cfg, sweep_o);
      const auto eq = grid.find('=');
      if (eq == std::string::npos) throw tdreg::ConfigError("--grid expects key=v1,v2,...");
      const std::string key = grid.substr(0, eq);
      std::vector<std::string> values;
      std::stringstream ss(grid.substr(eq + 1));
      for (std::string v; std::getline(ss, v, ',');)
        if (!v.empty()) values.push_back(v);
      if (values.empty()) throw tdreg::ConfigError("--grid has no values");
      const auto results = tdreg::run_sweep(cfg, key, values, cfg.output);
      for (std::size_t i = 0; i < results.size(); ++i) summarize(results[i], key + "=" + values[i]);
    } else if (*report) {
      tdreg::write_report(report_dir);
      std::printf("wrote %s/aggregate.csv\n", report_dir.c_str());
    }
  } catch (const tdreg::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const tdreg::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
