#pragma once

#include <vector>

#include "tdreg/critic.hpp"
#include "tdreg/env.hpp"

namespace tdreg {

struct EstimatorConfig {
  double gamma = 0.99;
  double lambda = 0.95;
  bool use_retrace = false;

  void validate() const;
};

/// Per-step arrays aligned with one trajectory.
struct AdvantageBatch {
  Vec advantage;
  Vec lambda_return;
  Vec td_error;
  /// Importance weight of each step (1 for on-policy GAE).
  Vec weight;

  Eigen::Index size() const { return advantage.size(); }
};

/// r + gamma Q(s', a'; target) - Q(s, a; w). The bootstrap is dropped on
/// terminal transitions.
double td_error_q(const LinearCritic& critic, const Transition& t, const Vec& next_action,
                  double gamma, bool use_target = true);
/// r + gamma V(s') - V(s), bootstrap dropped on terminal transitions.
double td_error_v(const LinearCritic& critic, const Transition& t, double gamma);

/// Backward recursion A_t = delta_t + gamma lambda c_{t+1} A_{t+1} with
/// A_{T+1} = 0. `log_c` holds log trace coefficients per step (empty means
/// all ones). delta_t uses next_values unless terminal[t].
AdvantageBatch lambda_advantage(const Vec& rewards, const Vec& values, const Vec& next_values,
                                const std::vector<char>& terminal, double gamma, double lambda,
                                const Vec& log_c = Vec());

AdvantageBatch gae_lambda(const LinearCritic& critic, const Trajectory& traj,
                          const EstimatorConfig& config);

/// log w_j = log pi - log beta, capped at 0 when `truncate`. Throws
/// DataError when a ratio is undefined.
Vec importance_log_weights(const Vec& policy_log_probs, const Vec& behavior_log_probs,
                           bool truncate);

/// Importance-weighted lambda advantage with w_j = pi/beta, truncated at 1
/// when `truncate` is set. Weights are accumulated in log space.
AdvantageBatch retrace_advantage(const LinearCritic& critic, const Trajectory& traj,
                                 const EstimatorConfig& config, const Vec& policy_log_probs,
                                 const Vec& behavior_log_probs, bool truncate = true);

/// (y - mean) / population std, or zeros when the std is below 1e-8.
Vec standardize(const Vec& values);

/// sum_{i >= t} gamma^{i-t} r_i along one trajectory.
Vec monte_carlo_returns(const Trajectory& traj, double gamma);

}  // namespace tdreg
