#pragma once

#include <cstddef>
#include <deque>
#include <limits>
#include <memory>
#include <vector>

#include "tdreg/rng.hpp"
#include "tdreg/types.hpp"

namespace tdreg {

/// One environment step as seen by the agent. `state` and `next_state` are
/// observations; rewards are always computed from the true state.
struct Transition {
  Vec state;
  Vec action;
  double reward = 0.0;
  Vec next_state;
  /// Behavior log-density of `action`, recorded at collection time.
  /// Deterministic policies without exploration store 0.
  double log_prob = 0.0;
  int step_index = 1;
  bool is_terminal = false;
};

struct Trajectory {
  std::vector<Transition> transitions;

  std::size_t size() const { return transitions.size(); }
  bool empty() const { return transitions.empty(); }
  const Transition& operator[](std::size_t i) const { return transitions[i]; }
  Transition& operator[](std::size_t i) { return transitions[i]; }
  auto begin() const { return transitions.begin(); }
  auto end() const { return transitions.end(); }

  /// Checks the chaining and step-index invariants; throws DataError.
  void validate() const;
};

struct StepResult {
  Vec next_state;
  double reward = 0.0;
};

/// MDP contract. Implementations are immutable value objects: `step` is a
/// pure function of its arguments and the rng stream.
class Environment {
 public:
  virtual ~Environment() = default;

  /// Dimension of the internal (true) state.
  virtual int state_dim() const = 0;
  /// Dimension of the vector the agent observes.
  virtual int observation_dim() const { return state_dim(); }
  virtual int action_dim() const = 0;
  virtual int horizon() const = 0;
  virtual double discount() const = 0;
  /// Whether reaching the horizon ends the episode for bootstrapping purposes.
  virtual bool time_limit_is_terminal() const = 0;

  virtual Vec sample_initial(Rng& rng) const = 0;
  virtual StepResult step(const Vec& state, const Vec& action, Rng& rng) const = 0;
  virtual Vec observe(const Vec& state, Rng& /*rng*/) const { return state; }
};

/// Observation noise N(0, scale) / clip(s, 0.1, 200), elementwise, applied on
/// top of the wrapped environment's observation.
Vec apply_observation_noise(const Vec& s_true, Rng& rng, double scale = 0.05);
/// Same formula with an explicit N(0, scale) draw per component.
Vec apply_observation_noise(const Vec& s_true, const Vec& draw);

class ObservationNoise final : public Environment {
 public:
  ObservationNoise(std::shared_ptr<const Environment> inner, double scale = 0.05);

  int state_dim() const override { return inner_->state_dim(); }
  int observation_dim() const override { return inner_->observation_dim(); }
  int action_dim() const override { return inner_->action_dim(); }
  int horizon() const override { return inner_->horizon(); }
  double discount() const override { return inner_->discount(); }
  bool time_limit_is_terminal() const override { return inner_->time_limit_is_terminal(); }
  Vec sample_initial(Rng& rng) const override { return inner_->sample_initial(rng); }
  StepResult step(const Vec& s, const Vec& a, Rng& rng) const override {
    return inner_->step(s, a, rng);
  }
  Vec observe(const Vec& state, Rng& rng) const override;

  const Environment& inner() const { return *inner_; }

 private:
  std::shared_ptr<const Environment> inner_;
  double scale_;
};

struct ActionSample {
  Vec action;
  double log_prob = 0.0;
};

/// Anything that maps observations to actions.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual int observation_dim() const = 0;
  virtual int action_dim() const = 0;
  virtual ActionSample act(const Vec& observation, Rng& rng, bool explore) const = 0;
};

/// Rolls out one episode from s1 ~ mu1. Environment noise and observation
/// noise draw from `env_rng`, action noise from `policy_rng`.
Trajectory collect_trajectory(const Environment& env, const Policy& policy, Rng& env_rng,
                              Rng& policy_rng, int max_steps, bool explore = true);
Trajectory collect_trajectory(const Environment& env, const Policy& policy, Rng& rng,
                              int max_steps, bool explore = true);

/// FIFO experience replay with uniform sampling without replacement.
class ReplayMemory {
 public:
  explicit ReplayMemory(std::size_t capacity = std::numeric_limits<std::size_t>::max());

  void push(const Transition& t);
  void push(const std::vector<Transition>& batch);

  /// Draws `batch_size` distinct stored transitions.
  std::vector<Transition> sample(std::size_t batch_size, Rng& rng) const;
  std::vector<Transition> push_sample(const std::vector<Transition>& fresh,
                                      std::size_t batch_size, Rng& rng);

  std::size_t size() const { return buffer_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& operator[](std::size_t i) const { return buffer_[i]; }

 private:
  std::size_t capacity_;
  std::deque<Transition> buffer_;
};

/// k distinct indices from [0, n), uniformly over subsets (Floyd's method).
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng);

}  // namespace tdreg
