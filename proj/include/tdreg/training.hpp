#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "tdreg/config.hpp"
#include "tdreg/env.hpp"
#include "tdreg/lqr.hpp"
#include "tdreg/policy.hpp"

namespace tdreg {

/// eta = eta0 * kappa^updates.
struct PenaltySchedule {
  double eta0 = 0.0;
  double kappa = 1.0;
  long long updates = 0;

  double eta() const { return updates == 0 ? eta0 : eta0 * std::pow(kappa, static_cast<double>(updates)); }
};

/// One decay step, applied after every actor update.
PenaltySchedule eta_step(PenaltySchedule schedule);

struct AgentStats {
  long long actor_updates = 0;
  long long trpo_accepted = 0;
  long long trpo_rejected = 0;
  long long kl_violations = 0;
  double max_accepted_kl = 0.0;
  double last_train_mstde = std::nan("");
};

/// Data shared by all trials of one experiment.
struct SharedData {
  std::vector<Vec> calibration_states;
  double fourier_bandwidth = 0.0;
};

/// A learner advanced one environment step (DPG, TD3) or one iteration
/// (SPG, REINFORCE, TRPO, PPO) at a time.
class Agent {
 public:
  virtual ~Agent() = default;

  virtual void advance() = 0;
  virtual Vec actor_params() const = 0;
  /// Target policy; evaluate with exploration off.
  virtual const Policy& policy() const = 0;
  virtual double eta() const = 0;
  /// TD error of the learned critic on one transition, or NaN without a critic.
  virtual double critic_td_error(const Transition& t) const = 0;
  /// Learned Q(s, a), if the agent has a Q-critic.
  virtual std::optional<double> critic_q(const Vec& /*s*/, const Vec& /*a*/) const {
    return std::nullopt;
  }
  /// Gain K of a linear state-feedback policy a = K s.
  virtual std::optional<Mat> linear_gain() const { return std::nullopt; }

  const AgentStats& stats() const { return stats_; }

 protected:
  AgentStats stats_;
};

std::shared_ptr<const Environment> make_environment(const ExperimentConfig& config);
LqrSpec make_lqr_spec(const ExperimentConfig& config);

/// Builds the learner for one trial; `seed` selects every random stream.
std::unique_ptr<Agent> make_agent(const ExperimentConfig& config,
                                  std::shared_ptr<const Environment> env, std::uint64_t seed,
                                  const SharedData& shared);

}  // namespace tdreg
