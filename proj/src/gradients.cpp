#include "tdreg/gradients.hpp"

#include <algorithm>
#include <cmath>

#include "tdreg/estimators.hpp"

namespace tdreg {

Vec clip_to_unit_norm(const Vec& g) {
  const double n = g.norm();
  return n > 1.0 ? Vec(g / n) : g;
}

GradientTerms spg_gradient(const GaussianPolicy& policy, const LinearCritic& critic,
                           const std::vector<Trajectory>& batch, double eta, double gamma,
                           SpgMode mode) {
  if (mode == SpgMode::kReinforce) eta = 0.0;
  std::size_t n = 0;
  for (const auto& traj : batch) n += traj.size();
  if (n == 0) throw InsufficientDataError("empty SPG batch");

  const int f = policy.feature_dim();
  const int d = policy.action_dim();
  Mat phi(n, f), act(n, d);
  Vec wj(n), wg = Vec::Zero(n);
  Vec path = Vec::Zero(policy.num_params());
  double sq = 0.0;
  std::size_t row = 0;
  for (const Trajectory& traj : batch) {
    Vec mc;
    if (mode == SpgMode::kReinforce) mc = monte_carlo_returns(traj, gamma);
    for (std::size_t t = 0; t < traj.size(); ++t, ++row) {
      const Transition& tr = traj[t];
      phi.row(row) = policy.features(tr.state).transpose();
      act.row(row) = tr.action.transpose();
      if (mode == SpgMode::kReinforce) {
        wj[row] = mc[static_cast<Eigen::Index>(t)];
        continue;
      }
      const double q = critic.value(tr.state, tr.action);
      wj[row] = q;
      double delta = tr.reward - q;
      Vec phin, mun;
      if (!tr.is_terminal) {
        phin = policy.features(tr.next_state);
        mun = policy.mean_from_features(phin);
        delta += gamma * critic.value(tr.next_state, mun);
      }
      sq += delta * delta;
      if (eta != 0.0) {
        wg[row] = delta * delta;
        if (!tr.is_terminal)
          path += 2.0 * gamma * delta *
                  policy.mean_vjp(phin, critic.action_gradient(critic.weights, tr.next_state, mun));
      }
    }
  }
  const double inv = 1.0 / static_cast<double>(n);
  GradientTerms out;
  out.mean_sq_td = sq * inv;
  out.grad_j = policy.weighted_score_sum(phi, act, wj) * inv;
  out.grad_g = Vec::Zero(policy.num_params());
  if (eta != 0.0) out.grad_g = (policy.weighted_score_sum(phi, act, wg) + path) * inv;
  out.total = clip_to_unit_norm(eta != 0.0 ? Vec(out.grad_j - eta * out.grad_g) : out.grad_j);
  return out;
}

std::vector<Vec> target_policy_noise(std::size_t n, int action_dim, double sigma_t, Rng& rng,
                                     double noise_std) {
  std::vector<Vec> out;
  out.reserve(n);
  const double c = 0.5 * sigma_t;
  for (std::size_t i = 0; i < n; ++i) {
    Vec xi = rng.normal_vector(action_dim, noise_std);
    out.push_back(xi.cwiseMax(-c).cwiseMin(c));
  }
  return out;
}

Vec q_targets(const LinearCritic& critic, const std::vector<Transition>& batch,
              const std::vector<Vec>& next_actions, double gamma, std::vector<int>* argmin) {
  if (next_actions.size() != batch.size()) throw ConfigError("next actions do not match batch");
  Vec y(static_cast<Eigen::Index>(batch.size()));
  if (argmin) argmin->assign(batch.size(), 0);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Transition& tr = batch[i];
    if (tr.is_terminal) {
      y[i] = tr.reward;
      continue;
    }
    const Vec x = critic.features(tr.next_state, next_actions[i]);
    double q = x.dot(critic.target);
    if (critic.twin) {
      const double q2 = x.dot(critic.twin->target);
      if (q2 < q) {
        q = q2;
        if (argmin) (*argmin)[i] = 1;
      }
    }
    y[i] = tr.reward + gamma * q;
  }
  return y;
}

Vec td3_targets(const LinearCritic& critic, const DeterministicPolicy& target_policy,
                const std::vector<Transition>& batch, double sigma_t, Rng& rng, double gamma,
                std::vector<Vec>* noise_out) {
  if (!critic.twin) throw UsageError("TD3 targets need twin critics");
  std::vector<Vec> xi = target_policy_noise(batch.size(), target_policy.action_dim(), sigma_t, rng);
  std::vector<Vec> next;
  next.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i)
    next.push_back(target_policy.action(batch[i].next_state) + xi[i]);
  Vec y = q_targets(critic, batch, next, gamma);
  if (noise_out) *noise_out = std::move(xi);
  return y;
}

GradientTerms dpg_gradient(const DeterministicPolicy& policy, const LinearCritic& critic,
                           const std::vector<Transition>& batch, const std::vector<Vec>& noise,
                           double eta, double gamma) {
  if (batch.empty()) throw InsufficientDataError("empty DPG batch");
  if (!noise.empty() && noise.size() != batch.size()) throw ConfigError("noise size mismatch");
  const double inv = 1.0 / static_cast<double>(batch.size());
  GradientTerms out;
  out.grad_j = Vec::Zero(policy.num_params());
  out.grad_g = Vec::Zero(policy.num_params());

  std::vector<Vec> next;
  next.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    Vec a = policy.action(batch[i].next_state);
    if (!noise.empty()) a += noise[i];
    next.push_back(std::move(a));
  }
  std::vector<int> which;
  const Vec y = q_targets(critic, batch, next, gamma, &which);

  double sq = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Transition& tr = batch[i];
    const Vec a = policy.action(tr.state);
    out.grad_j += policy.param_vjp(tr.state, critic.action_gradient(critic.weights, tr.state, a));
    const double delta = y[i] - critic.value(tr.state, tr.action);
    sq += delta * delta;
    if (eta != 0.0 && !tr.is_terminal) {
      const Vec& wt = which[i] == 1 ? critic.twin->target : critic.target;
      const Vec ga = critic.action_gradient(wt, tr.next_state, next[i]);
      out.grad_g += 2.0 * gamma * delta * policy.param_vjp(tr.next_state, ga);
    }
  }
  out.grad_j *= inv;
  out.grad_g *= inv;
  out.mean_sq_td = sq * inv;
  out.total = eta != 0.0 ? Vec(out.grad_j - eta * out.grad_g) : out.grad_j;
  return out;
}

Vec importance_weighted_gradient(const GaussianPolicy& policy, const Mat& phi, const Mat& actions,
                                 const Vec& behavior_log_probs, const Vec& values) {
  const Vec rho = (policy.log_prob_batch(phi, actions) - behavior_log_probs).array().exp();
  return policy.weighted_score_sum(phi, actions, rho.cwiseProduct(values)) /
         static_cast<double>(phi.rows());
}

GradientTerms trpo_gradient(const GaussianPolicy& policy, const PolicyBatch& batch, double eta) {
  if (batch.size() == 0) throw InsufficientDataError("empty policy batch");
  const Vec rho =
      (policy.log_prob_batch(batch.phi, batch.actions) - batch.behavior_log_probs).array().exp();
  const double inv = 1.0 / static_cast<double>(batch.size());
  GradientTerms out;
  out.grad_j = policy.weighted_score_sum(batch.phi, batch.actions, rho.cwiseProduct(batch.advantage)) * inv;
  out.grad_g = Vec::Zero(policy.num_params());
  if (eta != 0.0)
    out.grad_g = policy.weighted_score_sum(batch.phi, batch.actions, rho.cwiseProduct(batch.penalty)) * inv;
  out.total = eta != 0.0 ? Vec(out.grad_j - eta * out.grad_g) : out.grad_j;
  return out;
}

double trpo_surrogate(const GaussianPolicy& policy, const PolicyBatch& batch, double eta) {
  const Vec rho =
      (policy.log_prob_batch(batch.phi, batch.actions) - batch.behavior_log_probs).array().exp();
  if (eta == 0.0) return rho.dot(batch.advantage) / static_cast<double>(batch.size());
  return rho.dot(batch.advantage - eta * batch.penalty) / static_cast<double>(batch.size());
}

double ppo_objective(const GaussianPolicy& policy, const PolicyBatch& batch, double eta,
                     double clip) {
  const Vec rho =
      (policy.log_prob_batch(batch.phi, batch.actions) - batch.behavior_log_probs).array().exp();
  double obj = 0.0, pen = 0.0;
  for (Eigen::Index i = 0; i < rho.size(); ++i) {
    const double rc = std::clamp(rho[i], 1.0 - clip, 1.0 + clip);
    obj += std::min(rho[i] * batch.advantage[i], rc * batch.advantage[i]);
    if (eta != 0.0) pen += std::max(rho[i] * batch.penalty[i], rc * batch.penalty[i]);
  }
  const double inv = 1.0 / static_cast<double>(rho.size());
  return obj * inv - eta * pen * inv;
}

GradientTerms ppo_gradient(const GaussianPolicy& policy, const PolicyBatch& batch, double eta,
                           double clip) {
  if (batch.size() == 0) throw InsufficientDataError("empty policy batch");
  const Vec rho =
      (policy.log_prob_batch(batch.phi, batch.actions) - batch.behavior_log_probs).array().exp();
  const Eigen::Index n = rho.size();
  Vec wj = Vec::Zero(n), wg = Vec::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double rc = std::clamp(rho[i], 1.0 - clip, 1.0 + clip);
    const double A = batch.advantage[i];
    if (rho[i] * A <= rc * A) wj[i] = rho[i] * A;
    if (eta != 0.0) {
      const double p = batch.penalty[i];
      if (rho[i] * p >= rc * p) wg[i] = rho[i] * p;
    }
  }
  const double inv = 1.0 / static_cast<double>(n);
  GradientTerms out;
  out.grad_j = policy.weighted_score_sum(batch.phi, batch.actions, wj) * inv;
  out.grad_g = Vec::Zero(policy.num_params());
  if (eta != 0.0) out.grad_g = policy.weighted_score_sum(batch.phi, batch.actions, wg) * inv;
  out.total = eta != 0.0 ? Vec(out.grad_j - eta * out.grad_g) : out.grad_j;
  return out;
}

}  // namespace tdreg
