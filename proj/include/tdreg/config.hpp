#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace tdreg {

enum class EnvId { kLqr, kPendulum, kDoublePendulum };
enum class AlgorithmId { kReinforce, kSpg, kDpg, kTd3, kTrpo, kPpo };
enum class Regularizer { kNone, kTdReg, kGaeReg };
enum class CriticMode { kSingle, kTarget, kTwin, kDouble };
enum class FeatureKind { kIdentity, kPolynomial, kFourier };

struct EnvConfig {
  EnvId id = EnvId::kLqr;
  double gamma = 0.99;
  int horizon = 150;
  /// LQR transition noise std.
  double transition_noise = 0.1;
  bool observation_noise = false;
  double observation_noise_scale = 0.05;
  /// Double pendulum: "plus" or "minus" velocity update.
  std::string velocity_update = "plus";
  /// Single pendulum observes (cos q, sin q, qdot) instead of (q, qdot).
  bool trig_observation = false;

  bool operator==(const EnvConfig&) const = default;
};

struct AlgorithmConfig {
  AlgorithmId id = AlgorithmId::kDpg;
  Regularizer regularizer = Regularizer::kNone;
  CriticMode critic = CriticMode::kTarget;
  bool retrace = false;
  /// Non-Retrace V-critic runs weight reused samples with untruncated ratios.
  bool importance_weights = true;
  int delay = 2;

  FeatureKind critic_features = FeatureKind::kPolynomial;
  int critic_degree = 2;
  FeatureKind policy_features = FeatureKind::kIdentity;
  int fourier_count = 100;

  // DPG / TD3
  double actor_lr = 0.0005;
  double critic_lr = 0.01;
  bool target_actor = true;
  double tau_actor = 0.01;
  double tau_critic = 1.0;
  int batch_size = 32;
  int warmup = 100;
  double exploration_std = 5.0;
  double exploration_decay = 0.95;
  /// Restart the exploration decay at every episode.
  bool exploration_reset = true;
  double target_noise_std = 2.0;

  // SPG / REINFORCE
  double spg_lr = 0.01;
  int critic_sweeps = 100;
  double critic_tol = 1e-8;

  // Stochastic policy
  std::string covariance = "diagonal";
  double policy_init_std = 2.2360679774997898;
  bool policy_bias = false;

  // Batch algorithms
  int episodes_per_iter = 1;
  int reuse_iterations = 0;
  double lambda = 0.95;
  double max_kl = 0.01;
  double damping = 0.1;
  int cg_iters = 10;
  double clip = 0.05;
  int epochs = 20;
  int minibatch = 64;
  double ppo_lr = 0.0001;

  bool operator==(const AlgorithmConfig&) const = default;
};

struct PenaltyConfig {
  double eta0 = 0.0;
  double kappa = 0.999;

  bool operator==(const PenaltyConfig&) const = default;
};

struct EvalConfig {
  /// Evaluate every `every` steps (DPG/TD3) or iterations (others).
  int every = 100;
  int episodes = 10;
  int horizon = 150;

  bool operator==(const EvalConfig&) const = default;
};

struct ExperimentConfig {
  std::string name = "experiment";
  EnvConfig env;
  AlgorithmConfig algo;
  PenaltyConfig penalty;
  EvalConfig eval;
  int trials = 1;
  std::uint64_t seed_base = 0;
  /// Environment steps (DPG/TD3) or iterations (others).
  int budget = 12000;
  int threads = 0;
  int calibration_states = 10000;
  std::uint64_t calibration_seed = 20190101;
  std::string calibration_file;
  std::string output = "results";

  bool operator==(const ExperimentConfig&) const = default;

  /// Cross-field checks; throws ConfigError.
  void validate() const;
};

/// Parses "key = value" lines; '#' starts a comment. Unknown keys, missing
/// '=' and malformed values throw ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& config);

/// Applies one override on top of an existing config.
void set_config_value(ExperimentConfig& config, const std::string& key, const std::string& value);
std::map<std::string, std::string> config_entries(const ExperimentConfig& config);

std::string to_string(EnvId id);
std::string to_string(AlgorithmId id);
std::string to_string(Regularizer r);
std::string to_string(CriticMode m);
std::string to_string(FeatureKind k);

}  // namespace tdreg
