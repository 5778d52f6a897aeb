#include "tdreg/estimators.hpp"

#include <algorithm>
#include <cmath>

namespace tdreg {

void EstimatorConfig::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must be in [0, 1]");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("lambda must be in [0, 1]");
}

double td_error_q(const LinearCritic& critic, const Transition& t, const Vec& next_action,
                  double gamma, bool use_target) {
  const double q = critic.value(t.state, t.action);
  if (t.is_terminal) return t.reward - q;
  const Vec& w = use_target ? critic.target : critic.weights;
  return t.reward + gamma * critic.value_with(w, t.next_state, next_action) - q;
}

double td_error_v(const LinearCritic& critic, const Transition& t, double gamma) {
  const double v = critic.value(t.state);
  if (t.is_terminal) return t.reward - v;
  return t.reward + gamma * critic.value(t.next_state) - v;
}

AdvantageBatch lambda_advantage(const Vec& rewards, const Vec& values, const Vec& next_values,
                                const std::vector<char>& terminal, double gamma, double lambda,
                                const Vec& log_c) {
  const Eigen::Index n = rewards.size();
  if (n == 0) throw DataError("empty trajectory");
  if (values.size() != n || next_values.size() != n || static_cast<Eigen::Index>(terminal.size()) != n)
    throw ConfigError("advantage inputs differ in length");
  if (log_c.size() != 0 && log_c.size() != n) throw ConfigError("trace coefficients length");
  AdvantageBatch out;
  out.td_error.resize(n);
  out.advantage.resize(n);
  out.weight = log_c.size() ? Vec(log_c.unaryExpr([](double x) { return std::exp(x); }))
                           : Vec(Vec::Ones(n));
  for (Eigen::Index t = 0; t < n; ++t)
    out.td_error[t] = rewards[t] + (terminal[t] ? 0.0 : gamma * next_values[t]) - values[t];
  double next = 0.0;
  for (Eigen::Index t = n - 1; t >= 0; --t) {
    const double c = t + 1 < n ? out.weight[t + 1] : 0.0;
    next = out.td_error[t] + gamma * lambda * c * next;
    out.advantage[t] = next;
  }
  out.lambda_return = out.advantage + values;
  return out;
}

namespace {

void trajectory_values(const LinearCritic& critic, const Trajectory& traj, Vec& r, Vec& v,
                       Vec& vn, std::vector<char>& term) {
  const Eigen::Index n = static_cast<Eigen::Index>(traj.size());
  r.resize(n);
  v.resize(n);
  vn.resize(n);
  term.assign(traj.size(), 0);
  for (Eigen::Index t = 0; t < n; ++t) {
    const Transition& tr = traj[t];
    r[t] = tr.reward;
    v[t] = critic.value(tr.state);
    term[t] = tr.is_terminal ? 1 : 0;
    vn[t] = tr.is_terminal ? 0.0 : critic.value(tr.next_state);
  }
}

}  // namespace

AdvantageBatch gae_lambda(const LinearCritic& critic, const Trajectory& traj,
                          const EstimatorConfig& config) {
  config.validate();
  if (traj.empty()) throw DataError("empty trajectory");
  Vec r, v, vn;
  std::vector<char> term;
  trajectory_values(critic, traj, r, v, vn, term);
  return lambda_advantage(r, v, vn, term, config.gamma, config.lambda);
}

Vec importance_log_weights(const Vec& policy_log_probs, const Vec& behavior_log_probs,
                           bool truncate) {
  if (policy_log_probs.size() != behavior_log_probs.size())
    throw ConfigError("log-probability arrays differ in length");
  Vec log_c(policy_log_probs.size());
  for (Eigen::Index t = 0; t < log_c.size(); ++t) {
    const double lr = policy_log_probs[t] - behavior_log_probs[t];
    if (std::isnan(lr) || !std::isfinite(behavior_log_probs[t]))
      throw DataError("importance ratio is not finite");
    log_c[t] = truncate ? std::min(0.0, lr) : lr;
  }
  return log_c;
}

AdvantageBatch retrace_advantage(const LinearCritic& critic, const Trajectory& traj,
                                 const EstimatorConfig& config, const Vec& policy_log_probs,
                                 const Vec& behavior_log_probs, bool truncate) {
  config.validate();
  if (traj.empty()) throw DataError("empty trajectory");
  const Eigen::Index n = static_cast<Eigen::Index>(traj.size());
  if (policy_log_probs.size() != n || behavior_log_probs.size() != n)
    throw ConfigError("log-probability arrays differ from trajectory length");
  const Vec log_c = importance_log_weights(policy_log_probs, behavior_log_probs, truncate);
  Vec r, v, vn;
  std::vector<char> term;
  trajectory_values(critic, traj, r, v, vn, term);
  return lambda_advantage(r, v, vn, term, config.gamma, config.lambda, log_c);
}

Vec standardize(const Vec& values) {
  if (values.size() == 0) throw ConfigError("standardize needs at least one value");
  const double mean = values.mean();
  Vec c = values.array() - mean;
  const double sd = std::sqrt(c.squaredNorm() / static_cast<double>(values.size()));
  if (sd < 1e-8) return Vec::Zero(values.size());
  return c / sd;
}

Vec monte_carlo_returns(const Trajectory& traj, double gamma) {
  const Eigen::Index n = static_cast<Eigen::Index>(traj.size());
  Vec g(n);
  double acc = 0.0;
  for (Eigen::Index t = n - 1; t >= 0; --t) {
    acc = traj[t].reward + gamma * acc;
    g[t] = acc;
  }
  return g;
}

}  // namespace tdreg
