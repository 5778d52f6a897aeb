#include "tdreg/evaluation.hpp"

#include "tdreg/training.hpp"

namespace tdreg {

EvalMetrics evaluate_policy(const Environment& env, const Policy& policy, int episodes,
                            int max_steps, Rng& rng, const CriticProbe& critic,
                            const std::optional<LqrOracle>& oracle) {
  EvalMetrics out;
  if (episodes < 1) return out;
  const double gamma = env.discount();
  double total = 0.0, sq_est = 0.0, sq_true = 0.0;
  std::size_t n = 0, n_true = 0;
  std::optional<TrueQCoefficients> q_true;
  if (oracle && lqr_is_stable(oracle->spec, oracle->gain)) {
    q_true = lqr_true_q(oracle->spec, oracle->gain);
    out.true_return = lqr_true_return(oracle->spec, oracle->gain);
  } else if (oracle) {
    out.true_return = kNegInfReturn;
  }
  for (int e = 0; e < episodes; ++e) {
    // Policy noise is off, so one stream serves both roles.
    const Trajectory traj = collect_trajectory(env, policy, rng, max_steps, false);
    double discount = 1.0;
    for (const Transition& t : traj) {
      total += discount * t.reward;
      discount *= gamma;
      ++n;
      if (critic.td_error) {
        const double d = critic.td_error(t);
        sq_est += d * d;
      }
      if (q_true && critic.q) {
        if (auto q_hat = critic.q(t.state, t.action)) {
          const double d = q_true->value(t.state, t.action) - *q_hat;
          sq_true += d * d;
          ++n_true;
        }
      }
    }
  }
  out.transitions = n;
  out.mc_return = total / episodes;
  if (critic.td_error && n > 0) out.mstde_est = sq_est / static_cast<double>(n);
  if (n_true > 0) out.mstde_true = sq_true / static_cast<double>(n_true);
  if (oracle && !q_true && critic.q) out.mstde_true = std::numeric_limits<double>::infinity();
  return out;
}

bool detect_divergence(EnvId env, const Vec& params, const std::optional<LqrOracle>& oracle) {
  if (!params.allFinite()) return true;
  if (env == EnvId::kLqr && oracle) {
    if (!oracle->gain.allFinite()) return true;
    return !lqr_is_stable(oracle->spec, oracle->gain);
  }
  return false;
}

std::optional<LqrOracle> agent_oracle(const ExperimentConfig& config, const Agent& agent) {
  if (config.env.id != EnvId::kLqr) return std::nullopt;
  auto K = agent.linear_gain();
  if (!K) return std::nullopt;
  return LqrOracle{make_lqr_spec(config), *K};
}

EvalMetrics evaluate_agent(const ExperimentConfig& config, const Environment& env,
                           const Agent& agent, std::uint64_t seed, int index) {
  Rng rng = Rng::stream(seed, Stream::kEvaluation, static_cast<std::uint64_t>(index));
  CriticProbe probe;
  probe.td_error = [&agent](const Transition& t) { return agent.critic_td_error(t); };
  probe.q = [&agent](const Vec& s, const Vec& a) { return agent.critic_q(s, a); };
  return evaluate_policy(env, agent.policy(), config.eval.episodes, config.eval.horizon, rng, probe,
                         agent_oracle(config, agent));
}

}  // namespace tdreg
