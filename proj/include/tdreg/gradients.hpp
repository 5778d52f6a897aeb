#pragma once

#include <vector>

#include "tdreg/critic.hpp"
#include "tdreg/env.hpp"
#include "tdreg/policy.hpp"

namespace tdreg {

/// Gradient pieces of L = J - eta G. `grad_g` is left at zero when eta == 0.
struct GradientTerms {
  Vec grad_j;
  Vec grad_g;
  Vec total;
  double mean_sq_td = 0.0;
};

/// Rescales g to unit norm when its norm exceeds one.
Vec clip_to_unit_norm(const Vec& g);

enum class SpgMode { kSpg, kReinforce };

/// SPG with a Q-critic, or REINFORCE (Monte Carlo Q, eta forced to 0).
/// The expectation over a' is replaced by the policy mean, so
/// delta = r + gamma Q(s', mean(s')) - Q(s, a) and
/// grad G = mean[score(a|s) delta^2 + 2 gamma delta d Q(s', mean(s')) / d theta].
/// The combined gradient is clipped to unit norm.
GradientTerms spg_gradient(const GaussianPolicy& policy, const LinearCritic& critic,
                           const std::vector<Trajectory>& batch, double eta, double gamma,
                           SpgMode mode);

/// Bootstrap actions pi(s') + xi, xi ~ N(0, noise_std^2) clipped to
/// [-sigma_t / 2, sigma_t / 2]. Always draws, even when sigma_t is 0.
std::vector<Vec> target_policy_noise(std::size_t n, int action_dim, double sigma_t, Rng& rng,
                                     double noise_std = 2.0);

/// r + gamma min_j Q(s', a'_i; target_j) (min over twins if present).
/// `argmin` receives 0 or 1 per element when non-null.
Vec q_targets(const LinearCritic& critic, const std::vector<Transition>& batch,
              const std::vector<Vec>& next_actions, double gamma,
              std::vector<int>* argmin = nullptr);

/// TD3 targets: noisy target-policy actions and twin-min bootstrap.
Vec td3_targets(const LinearCritic& critic, const DeterministicPolicy& target_policy,
                const std::vector<Transition>& batch, double sigma_t, Rng& rng, double gamma,
                std::vector<Vec>* noise_out = nullptr);

/// grad J = mean (d pi(s)/d theta)' grad_a Q(s, pi(s); w);
/// grad G = mean 2 gamma delta (d pi(s')/d theta)' grad_a' Q(s', pi(s') + xi; target).
/// `noise` may be empty (xi = 0).
GradientTerms dpg_gradient(const DeterministicPolicy& policy, const LinearCritic& critic,
                           const std::vector<Transition>& batch, const std::vector<Vec>& noise,
                           double eta, double gamma);

/// Flattened on-policy batch for the V-critic algorithms.
struct PolicyBatch {
  Mat phi;      ///< policy features, one row per sample
  Mat actions;  ///< one row per sample
  Vec behavior_log_probs;
  Vec advantage;  ///< standardized
  Vec penalty;    ///< standardized regularizer (delta^2 or A^2)

  Eigen::Index size() const { return phi.rows(); }
};

/// mean_i pi(a_i|s_i)/beta_i * values_i * score_i, at the current theta.
Vec importance_weighted_gradient(const GaussianPolicy& policy, const Mat& phi, const Mat& actions,
                                 const Vec& behavior_log_probs, const Vec& values);

/// Importance-weighted gradient of mean rho A - eta mean rho penalty.
GradientTerms trpo_gradient(const GaussianPolicy& policy, const PolicyBatch& batch, double eta);

/// mean rho (A - eta penalty), rho relative to the behavior log-probs.
double trpo_surrogate(const GaussianPolicy& policy, const PolicyBatch& batch, double eta);

/// Pessimistic clipped objective mean min(rho A, rho_e A) - eta mean max(rho p, rho_e p).
double ppo_objective(const GaussianPolicy& policy, const PolicyBatch& batch, double eta,
                     double clip);

/// Case-wise gradient of ppo_objective. Ties take the unclipped branch.
GradientTerms ppo_gradient(const GaussianPolicy& policy, const PolicyBatch& batch, double eta,
                           double clip);

}  // namespace tdreg
