#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tdreg/config.hpp"
#include "tdreg/records.hpp"
#include "tdreg/training.hpp"

namespace tdreg {

struct TrialOptions {
  /// Keep actor parameters after every advance() call.
  bool record_params = false;
};

struct TrialResult {
  int trial = 0;
  std::uint64_t seed = 0;
  /// Unclamped evaluation rows.
  std::vector<RunRow> rows;
  AgentStats stats;
  std::vector<Vec> param_trace;
  /// Message of the numerical error that stopped training, if any.
  std::string error;
  bool diverged() const { return !rows.empty() && rows.back().diverged; }
  double final_return() const { return rows.empty() ? std::nan("") : rows.back().expected_return; }
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<TrialResult> trials;

  /// All rows ordered by (trial, step), clamped for reporting.
  std::vector<RunRow> reported_rows() const;
  int diverged_count() const;
};

/// States visited by uniformly random actions, for the Fourier bandwidth.
std::vector<Vec> calibration_states(const ExperimentConfig& config);
/// Calibration data and bandwidth, loaded from `features.calibration_file`
/// when it exists, otherwise generated (and saved there if a path is given).
SharedData prepare_shared(const ExperimentConfig& config);

TrialResult run_trial(const ExperimentConfig& config, const SharedData& shared, int trial,
                      const TrialOptions& options = {});

/// Trials seed_base + i, i < trials, on a pool of `threads` workers.
ExperimentResult run_experiment(const ExperimentConfig& config, const TrialOptions& options = {});

/// Writes runs.csv, trial_NNN.csv, aggregate.csv, config.cfg and metadata.json into `dir`.
void export_results(const ExperimentResult& result, const std::string& dir);

/// Re-reads runs.csv under `dir` and writes aggregate.csv plus gnuplot-style
/// return.dat and mstde.dat.
void write_report(const std::string& dir);

/// One experiment per grid value, each under dir/<key>=<value>.
std::vector<ExperimentResult> run_sweep(const ExperimentConfig& base, const std::string& key,
                                        const std::vector<std::string>& values,
                                        const std::string& dir);

/// Grid shorthands: kappa and eta0 map to penalty.*.
std::string resolve_grid_key(const std::string& key);

}  // namespace tdreg
