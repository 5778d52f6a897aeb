#include "tdreg/env.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

namespace tdreg {

void Trajectory::validate() const {
  for (std::size_t t = 0; t + 1 < transitions.size(); ++t) {
    const auto& cur = transitions[t];
    const auto& nxt = transitions[t + 1];
    if (cur.next_state.size() != nxt.state.size() || cur.next_state != nxt.state) {
      throw DataError("trajectory broken at step " + std::to_string(cur.step_index));
    }
    if (nxt.step_index <= cur.step_index) {
      throw DataError("trajectory step indices not increasing");
    }
  }
}

Vec apply_observation_noise(const Vec& s_true, const Vec& draw) {
  Vec out = s_true;
  for (Eigen::Index i = 0; i < s_true.size(); ++i) {
    out[i] += draw[i] / std::clamp(s_true[i], 0.1, 200.0);
  }
  return out;
}

Vec apply_observation_noise(const Vec& s_true, Rng& rng, double scale) {
  if (scale == 0.0) return s_true;
  return apply_observation_noise(s_true, rng.normal_vector(s_true.size(), scale));
}

ObservationNoise::ObservationNoise(std::shared_ptr<const Environment> inner, double scale)
    : inner_(std::move(inner)), scale_(scale) {
  if (!inner_) throw ConfigError("observation noise wrapper needs an environment");
}

Vec ObservationNoise::observe(const Vec& state, Rng& rng) const {
  return apply_observation_noise(inner_->observe(state, rng), rng, scale_);
}

Trajectory collect_trajectory(const Environment& env, const Policy& policy, Rng& env_rng,
                              Rng& policy_rng, int max_steps, bool explore) {
  if (max_steps < 1) throw ConfigError("max_steps must be at least 1");
  if (policy.action_dim() != env.action_dim() ||
      policy.observation_dim() != env.observation_dim()) {
    throw ConfigError("policy dimensions do not match the environment");
  }
  Trajectory traj;
  traj.transitions.reserve(static_cast<std::size_t>(max_steps));
  Vec state = env.sample_initial(env_rng);
  Vec obs = env.observe(state, env_rng);
  for (int t = 1; t <= max_steps; ++t) {
    ActionSample act = policy.act(obs, policy_rng, explore);
    StepResult res = env.step(state, act.action, env_rng);
    Vec next_obs = env.observe(res.next_state, env_rng);
    Transition tr;
    tr.state = obs;
    tr.action = std::move(act.action);
    tr.reward = res.reward;
    tr.next_state = next_obs;
    tr.log_prob = act.log_prob;
    tr.step_index = t;
    tr.is_terminal = (t == max_steps) && env.time_limit_is_terminal();
    traj.transitions.push_back(std::move(tr));
    state = std::move(res.next_state);
    obs = std::move(next_obs);
  }
  return traj;
}

Trajectory collect_trajectory(const Environment& env, const Policy& policy, Rng& rng,
                              int max_steps, bool explore) {
  return collect_trajectory(env, policy, rng, rng, max_steps, explore);
}

ReplayMemory::ReplayMemory(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw ConfigError("replay capacity must be positive");
}

void ReplayMemory::push(const Transition& t) {
  if (buffer_.size() == capacity_) buffer_.pop_front();
  buffer_.push_back(t);
}

void ReplayMemory::push(const std::vector<Transition>& batch) {
  for (const auto& t : batch) push(t);
}

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng) {
  if (k > n) throw InsufficientDataError("cannot draw " + std::to_string(k) + " of " +
                                         std::to_string(n) + " items");
  std::vector<std::size_t> out;
  out.reserve(k);
  std::unordered_set<std::size_t> chosen;
  for (std::size_t j = n - k; j < n; ++j) {
    std::size_t t = rng.index(j + 1);
    if (chosen.insert(t).second) {
      out.push_back(t);
    } else {
      chosen.insert(j);
      out.push_back(j);
    }
  }
  return out;
}

std::vector<Transition> ReplayMemory::sample(std::size_t batch_size, Rng& rng) const {
  if (buffer_.size() < batch_size) {
    throw InsufficientDataError("replay memory holds " + std::to_string(buffer_.size()) +
                                " transitions, batch needs " + std::to_string(batch_size));
  }
  std::vector<Transition> batch;
  batch.reserve(batch_size);
  for (std::size_t i : sample_without_replacement(buffer_.size(), batch_size, rng)) {
    batch.push_back(buffer_[i]);
  }
  return batch;
}

std::vector<Transition> ReplayMemory::push_sample(const std::vector<Transition>& fresh,
                                                  std::size_t batch_size, Rng& rng) {
  push(fresh);
  return sample(batch_size, rng);
}

}  // namespace tdreg
