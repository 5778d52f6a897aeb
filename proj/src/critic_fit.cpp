#include "tdreg/critic_fit.hpp"

#include <cmath>

namespace tdreg {

Vec fit_least_squares(const Mat& phi, const Vec& targets, double ridge) {
  if (phi.rows() != targets.size()) throw ConfigError("least squares shape mismatch");
  if (phi.rows() == 0) throw InsufficientDataError("least squares without samples");
  const Eigen::Index n = phi.rows(), k = phi.cols();
  Mat aug(n + k, k);
  aug.topRows(n) = phi;
  aug.bottomRows(k) = std::sqrt(ridge) * Mat::Identity(k, k);
  Vec rhs = Vec::Zero(n + k);
  rhs.head(n) = targets;
  Vec w = aug.householderQr().solve(rhs);
  if (!w.allFinite()) throw NumericalError("least squares produced non-finite weights");
  return w;
}

IteratedFitResult fit_q_iterated(LinearCritic& critic, const GaussianPolicy& policy,
                                 const std::vector<Trajectory>& batch, double gamma,
                                 int max_sweeps, double tol, double ridge) {
  std::size_t n = 0;
  for (const auto& traj : batch) n += traj.size();
  if (n == 0) throw InsufficientDataError("critic fit without samples");
  const int k = critic.num_weights();
  Mat phi(n, k), phi_next = Mat::Zero(n, k);
  Vec r(n);
  Vec live = Vec::Zero(n);
  std::size_t row = 0;
  for (const auto& traj : batch) {
    for (const Transition& tr : traj) {
      phi.row(row) = critic.features(tr.state, tr.action).transpose();
      r[row] = tr.reward;
      if (!tr.is_terminal) {
        phi_next.row(row) = critic.features(tr.next_state, policy.mean(tr.next_state)).transpose();
        live[row] = 1.0;
      }
      ++row;
    }
  }
  // Factor once; every sweep only changes the right-hand side.
  Mat aug(n + k, k);
  aug.topRows(n) = phi;
  aug.bottomRows(k) = std::sqrt(ridge) * Mat::Identity(k, k);
  const auto qr = aug.householderQr();
  IteratedFitResult out;
  Vec rhs = Vec::Zero(n + k);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    rhs.head(n) = r + gamma * live.cwiseProduct(phi_next * critic.weights);
    Vec w = qr.solve(rhs);
    if (!w.allFinite()) throw NumericalError("critic fit diverged");
    out.last_change = (w - critic.weights).norm();
    critic.weights = std::move(w);
    out.sweeps = sweep + 1;
    if (out.last_change < tol) {
      out.converged = true;
      break;
    }
  }
  critic.target = critic.weights;
  return out;
}

double q_critic_adam_step(LinearCritic& critic, AdamState& state,
                          const std::vector<Transition>& batch, const Vec& targets, bool second) {
  if (batch.empty()) throw InsufficientDataError("empty critic batch");
  if (second && !critic.twin) throw UsageError("no twin critic");
  Vec& w = second ? critic.twin->weights : critic.weights;
  Vec grad = Vec::Zero(w.size());
  double sq = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Vec x = critic.features(batch[i].state, batch[i].action);
    const double delta = targets[static_cast<Eigen::Index>(i)] - x.dot(w);
    sq += delta * delta;
    grad -= delta * x;
  }
  grad /= static_cast<double>(batch.size());
  w = adam_step(state, w, grad);
  return sq / static_cast<double>(batch.size());
}

}  // namespace tdreg
