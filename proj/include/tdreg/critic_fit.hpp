#pragma once

#include <vector>

#include "tdreg/critic.hpp"
#include "tdreg/env.hpp"
#include "tdreg/optim.hpp"
#include "tdreg/policy.hpp"

namespace tdreg {

inline constexpr double kCriticRidge = 1e-10;

/// argmin_w ||Phi w - y||^2 + ridge ||w||^2.
Vec fit_least_squares(const Mat& phi, const Vec& targets, double ridge = kCriticRidge);

struct IteratedFitResult {
  int sweeps = 0;
  double last_change = 0.0;
  bool converged = false;
};

/// Batch SPG Q-critic: repeated least squares on the fixed targets
/// r + gamma Q(s', mean(s'); w_k), warm-started from the current weights,
/// until the weight change drops below `tol` or `max_sweeps` is reached.
/// Sets target = weights afterwards.
IteratedFitResult fit_q_iterated(LinearCritic& critic, const GaussianPolicy& policy,
                                 const std::vector<Trajectory>& batch, double gamma,
                                 int max_sweeps = 100, double tol = 1e-8,
                                 double ridge = kCriticRidge);

/// One ADAM step on mean (y - Q(s, a; w))^2 / 2 with fixed targets y.
/// `second` selects the twin weights.
double q_critic_adam_step(LinearCritic& critic, AdamState& state,
                          const std::vector<Transition>& batch, const Vec& targets,
                          bool second = false);

}  // namespace tdreg
