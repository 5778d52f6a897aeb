#pragma once

#include <functional>
#include <optional>

#include "tdreg/config.hpp"
#include "tdreg/env.hpp"
#include "tdreg/lqr.hpp"

namespace tdreg {

class Agent;

/// Hooks into a learned critic. Either may be empty.
struct CriticProbe {
  std::function<double(const Transition&)> td_error;
  std::function<std::optional<double>(const Vec&, const Vec&)> q;
};

/// Closed-form LQR quantities for the evaluated linear policy.
struct LqrOracle {
  LqrSpec spec;
  Mat gain;
};

struct EvalMetrics {
  /// Monte Carlo mean discounted return.
  double mc_return = 0.0;
  /// Closed-form expected return when an oracle is given, else NaN.
  double true_return = std::nan("");
  double mstde_est = std::nan("");
  double mstde_true = std::nan("");
  std::size_t transitions = 0;

  /// The value written to the return column.
  double reported_return() const { return std::isnan(true_return) ? mc_return : true_return; }
};

/// Rolls out `episodes` episodes with exploration off.
EvalMetrics evaluate_policy(const Environment& env, const Policy& policy, int episodes,
                            int max_steps, Rng& rng, const CriticProbe& critic = {},
                            const std::optional<LqrOracle>& oracle = std::nullopt);

/// LQR: unstable gain or non-finite parameters. Otherwise non-finite parameters.
bool detect_divergence(EnvId env, const Vec& params, const std::optional<LqrOracle>& oracle);

/// Evaluation of one agent at evaluation point `index`.
EvalMetrics evaluate_agent(const ExperimentConfig& config, const Environment& env,
                           const Agent& agent, std::uint64_t seed, int index);
std::optional<LqrOracle> agent_oracle(const ExperimentConfig& config, const Agent& agent);

}  // namespace tdreg
