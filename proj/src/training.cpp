#include "tdreg/training.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

#include "tdreg/critic.hpp"
#include "tdreg/critic_fit.hpp"
#include "tdreg/estimators.hpp"
#include "tdreg/features.hpp"
#include "tdreg/gradients.hpp"
#include "tdreg/optim.hpp"
#include "tdreg/pendulum.hpp"
#include "tdreg/trpo.hpp"

namespace tdreg {

PenaltySchedule eta_step(PenaltySchedule schedule) {
  ++schedule.updates;
  return schedule;
}

LqrSpec make_lqr_spec(const ExperimentConfig& config) {
  LqrSpec spec;
  spec.noise_std = config.env.transition_noise;
  spec.gamma = config.env.gamma;
  spec.horizon = config.env.horizon;
  return spec;
}

std::shared_ptr<const Environment> make_environment(const ExperimentConfig& config) {
  switch (config.env.id) {
    case EnvId::kLqr: {
      auto lqr = std::make_shared<const LqrEnv>(make_lqr_spec(config));
      if (config.env.observation_noise)
        return std::make_shared<const ObservationNoise>(lqr, config.env.observation_noise_scale);
      return lqr;
    }
    case EnvId::kPendulum: {
      SinglePendulumSpec spec;
      spec.horizon = config.env.horizon;
      spec.gamma = config.env.gamma;
      spec.trig_observation = config.env.trig_observation;
      return std::make_shared<const SinglePendulumEnv>(spec);
    }
    case EnvId::kDoublePendulum: {
      DoublePendulumSpec spec;
      spec.horizon = config.env.horizon;
      spec.gamma = config.env.gamma;
      spec.velocity_update =
          config.env.velocity_update == "minus" ? VelocityUpdate::kMinus : VelocityUpdate::kPlus;
      return std::make_shared<const DoublePendulumEnv>(spec);
    }
  }
  throw ConfigError("unknown environment");
}

namespace {

CovarianceKind covariance_kind(const std::string& name) {
  if (name == "scalar") return CovarianceKind::kScalar;
  if (name == "full") return CovarianceKind::kFull;
  if (name == "diagonal") return CovarianceKind::kDiagonal;
  throw ConfigError("unknown covariance '" + name + "'");
}

struct FeatureSet {
  FeatureMapPtr policy;
  FeatureMapPtr critic;
};

FeatureSet make_features(const ExperimentConfig& cfg, const Environment& env, bool q_critic,
                         std::uint64_t seed, const SharedData& shared) {
  const int obs = env.observation_dim();
  const int act = env.action_dim();
  const AlgorithmConfig& a = cfg.algo;
  FeatureMapPtr fourier;
  auto get_fourier = [&]() {
    if (!fourier) {
      if (!(shared.fourier_bandwidth > 0.0)) throw ConfigError("fourier features need a bandwidth");
      Rng frng = Rng::stream(seed, Stream::kFeatures);
      fourier = std::make_shared<const FourierBasis>(
          make_fourier_basis(a.fourier_count, shared.fourier_bandwidth, obs, frng));
    }
    return fourier;
  };
  FeatureSet out;
  switch (a.policy_features) {
    case FeatureKind::kIdentity:
      out.policy = std::make_shared<const IdentityMap>(obs);
      break;
    case FeatureKind::kFourier:
      out.policy = get_fourier();
      break;
    case FeatureKind::kPolynomial:
      out.policy = std::make_shared<const PolynomialBasis>(obs, a.critic_degree);
      break;
  }
  if (q_critic) {
    if (a.critic_features != FeatureKind::kPolynomial)
      throw ConfigError("Q-critics use polynomial features");
    out.critic = std::make_shared<const PolynomialBasis>(obs + act, a.critic_degree);
  } else if (a.critic_features == FeatureKind::kFourier) {
    out.critic = get_fourier();
  } else {
    out.critic = std::make_shared<const PolynomialBasis>(obs, a.critic_degree);
  }
  return out;
}

void init_policy_gain(const ExperimentConfig& cfg, const Environment& env, Rng& init, Mat& K) {
  if (cfg.env.id == EnvId::kLqr && cfg.algo.policy_features == FeatureKind::kIdentity)
    K = lqr_initial_gain(env.state_dim(), init);
}

// SPG and REINFORCE: one batch of trajectories per iteration.
class SpgAgent final : public Agent {
 public:
  SpgAgent(const ExperimentConfig& cfg, std::shared_ptr<const Environment> env, std::uint64_t seed,
           const SharedData& shared)
      : cfg_(cfg),
        env_(std::move(env)),
        features_(make_features(cfg, *env_, true, seed, shared)),
        policy_(features_.policy, env_->action_dim(), covariance_kind(cfg.algo.covariance),
                cfg.algo.policy_bias, cfg.algo.policy_init_std),
        critic_(features_.critic, CriticKind::kQ, env_->observation_dim(), env_->action_dim()),
        env_rng_(Rng::stream(seed, Stream::kEnvironment)),
        explore_rng_(Rng::stream(seed, Stream::kExploration)),
        reinforce_(cfg.algo.id == AlgorithmId::kReinforce) {
    Rng init = Rng::stream(seed, Stream::kInit);
    Mat K = policy_.gain();
    init_policy_gain(cfg, *env_, init, K);
    policy_.set_gain(K);
    Rng crng = Rng::stream(seed, Stream::kCritic);
    critic_.init_uniform(crng);
    const bool regularized = !reinforce_ && cfg.algo.regularizer == Regularizer::kTdReg;
    schedule_ = {regularized ? cfg.penalty.eta0 : 0.0, cfg.penalty.kappa, 0};
  }

  void advance() override {
    std::vector<Trajectory> batch;
    for (int e = 0; e < cfg_.algo.episodes_per_iter; ++e)
      batch.push_back(collect_trajectory(*env_, policy_, env_rng_, explore_rng_, cfg_.env.horizon));
    if (!reinforce_) fit_q_iterated(critic_, policy_, batch, cfg_.env.gamma, cfg_.algo.critic_sweeps,
                                    cfg_.algo.critic_tol);
    const GradientTerms g = spg_gradient(policy_, critic_, batch, schedule_.eta(),
                                         cfg_.env.gamma, reinforce_ ? SpgMode::kReinforce : SpgMode::kSpg);
    if (!g.total.allFinite()) throw NumericalError("non-finite SPG gradient");
    policy_.set_params(policy_.params() + cfg_.algo.spg_lr * g.total);
    stats_.last_train_mstde = reinforce_ ? std::nan("") : g.mean_sq_td;
    schedule_ = eta_step(schedule_);
    ++stats_.actor_updates;
  }

  Vec actor_params() const override { return policy_.params(); }
  const Policy& policy() const override { return policy_; }
  double eta() const override { return schedule_.eta(); }

  double critic_td_error(const Transition& t) const override {
    if (reinforce_) return std::nan("");
    return td_error_q(critic_, t, policy_.mean(t.next_state), cfg_.env.gamma, false);
  }
  std::optional<double> critic_q(const Vec& s, const Vec& a) const override {
    if (reinforce_) return std::nullopt;
    return critic_.value(s, a);
  }
  std::optional<Mat> linear_gain() const override {
    if (cfg_.algo.policy_features != FeatureKind::kIdentity || cfg_.algo.policy_bias) return std::nullopt;
    return policy_.gain();
  }

 private:
  ExperimentConfig cfg_;
  std::shared_ptr<const Environment> env_;
  FeatureSet features_;
  GaussianPolicy policy_;
  LinearCritic critic_;
  Rng env_rng_, explore_rng_;
  bool reinforce_;
  PenaltySchedule schedule_;
};

// DPG and TD3: one environment step and one critic/actor update per call.
class DpgAgent final : public Agent {
 public:
  DpgAgent(const ExperimentConfig& cfg, std::shared_ptr<const Environment> env, std::uint64_t seed,
           const SharedData& shared)
      : cfg_(cfg),
        env_(std::move(env)),
        features_(make_features(cfg, *env_, true, seed, shared)),
        policy_(features_.policy, env_->action_dim(), cfg.algo.exploration_std),
        target_policy_(features_.policy, env_->action_dim()),
        critic_(features_.critic, CriticKind::kQ, env_->observation_dim(), env_->action_dim()),
        env_rng_(Rng::stream(seed, Stream::kEnvironment)),
        explore_rng_(Rng::stream(seed, Stream::kExploration)),
        sample_rng_(Rng::stream(seed, Stream::kSampling)),
        td3_(cfg.algo.id == AlgorithmId::kTd3),
        delay_(td3_ ? cfg.algo.delay : 1) {
    Rng init = Rng::stream(seed, Stream::kInit);
    Mat K = policy_.gain();
    init_policy_gain(cfg, *env_, init, K);
    policy_.set_gain(K);
    target_policy_.set_gain(K);
    Rng crng = Rng::stream(seed, Stream::kCritic);
    critic_.init_uniform(crng, td3_);
    adam_critic_ = AdamState(critic_.num_weights(), cfg.algo.critic_lr);
    adam_twin_ = AdamState(critic_.num_weights(), cfg.algo.critic_lr);
    adam_actor_ = AdamState(policy_.num_params(), cfg.algo.actor_lr);
    const bool regularized = cfg.algo.regularizer == Regularizer::kTdReg;
    schedule_ = {regularized ? cfg.penalty.eta0 : 0.0, cfg.penalty.kappa, 0};
    reset_episode();
  }

  void advance() override {
    ActionSample act = policy_.act(obs_, explore_rng_, true);
    StepResult res = env_->step(state_, act.action, env_rng_);
    Vec next_obs = env_->observe(res.next_state, env_rng_);
    ++episode_step_;
    Transition tr;
    tr.state = obs_;
    tr.action = std::move(act.action);
    tr.reward = res.reward;
    tr.next_state = next_obs;
    tr.log_prob = act.log_prob;
    tr.step_index = episode_step_;
    tr.is_terminal = episode_step_ >= cfg_.env.horizon && env_->time_limit_is_terminal();
    memory_.push(tr);
    policy_.decay_exploration(cfg_.algo.exploration_decay);
    if (episode_step_ >= cfg_.env.horizon) {
      reset_episode();
    } else {
      state_ = std::move(res.next_state);
      obs_ = std::move(next_obs);
    }
    ++steps_;
    if (steps_ >= cfg_.algo.warmup && memory_.size() >= static_cast<std::size_t>(cfg_.algo.batch_size))
      learn();
  }

  Vec actor_params() const override { return policy_.params(); }
  const Policy& policy() const override { return policy_; }
  double eta() const override { return schedule_.eta(); }

  double critic_td_error(const Transition& t) const override {
    return td_error_q(critic_, t, policy_.action(t.next_state), cfg_.env.gamma, false);
  }
  std::optional<double> critic_q(const Vec& s, const Vec& a) const override {
    return critic_.value(s, a);
  }
  std::optional<Mat> linear_gain() const override {
    if (cfg_.algo.policy_features != FeatureKind::kIdentity) return std::nullopt;
    return policy_.gain();
  }

 private:
  void reset_episode() {
    state_ = env_->sample_initial(env_rng_);
    obs_ = env_->observe(state_, env_rng_);
    episode_step_ = 0;
    if (cfg_.algo.exploration_reset) policy_.set_exploration_std(cfg_.algo.exploration_std);
  }

  void learn() {
    const std::vector<Transition> batch =
        memory_.sample(static_cast<std::size_t>(cfg_.algo.batch_size), sample_rng_);
    std::vector<Vec> noise;
    if (td3_)
      noise = target_policy_noise(batch.size(), policy_.action_dim(), policy_.exploration_std(),
                                  sample_rng_, cfg_.algo.target_noise_std);
    const DeterministicPolicy& bootstrap = cfg_.algo.target_actor ? target_policy_ : policy_;
    std::vector<Vec> next;
    next.reserve(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      Vec a = bootstrap.action(batch[i].next_state);
      if (td3_) a += noise[i];
      next.push_back(std::move(a));
    }
    const Vec y = q_targets(critic_, batch, next, cfg_.env.gamma);
    stats_.last_train_mstde = q_critic_adam_step(critic_, adam_critic_, batch, y);
    if (td3_) q_critic_adam_step(critic_, adam_twin_, batch, y, true);
    critic_.target = soft_update(critic_.target, critic_.weights, cfg_.algo.tau_critic);
    if (td3_) critic_.twin->target = soft_update(critic_.twin->target, critic_.twin->weights, cfg_.algo.tau_critic);
    ++learn_steps_;
    if (learn_steps_ % delay_ != 0) return;

    const GradientTerms g =
        dpg_gradient(policy_, critic_, batch, noise, schedule_.eta(), cfg_.env.gamma);
    policy_.set_params(adam_step(adam_actor_, policy_.params(), g.total, true));
    if (cfg_.algo.target_actor)
      target_policy_.set_params(soft_update(target_policy_.params(), policy_.params(), cfg_.algo.tau_actor));
    schedule_ = eta_step(schedule_);
    ++stats_.actor_updates;
  }

  ExperimentConfig cfg_;
  std::shared_ptr<const Environment> env_;
  FeatureSet features_;
  DeterministicPolicy policy_;
  DeterministicPolicy target_policy_;
  LinearCritic critic_;
  Rng env_rng_, explore_rng_, sample_rng_;
  bool td3_;
  int delay_;
  AdamState adam_critic_, adam_twin_, adam_actor_;
  ReplayMemory memory_;
  PenaltySchedule schedule_;
  Vec state_, obs_;
  int episode_step_ = 0;
  long long steps_ = 0;
  long long learn_steps_ = 0;
};

// TRPO and PPO with V-critics, GAE/Retrace advantages and sample reuse.
class BatchAgent final : public Agent {
 public:
  BatchAgent(const ExperimentConfig& cfg, std::shared_ptr<const Environment> env, std::uint64_t seed,
             const SharedData& shared)
      : cfg_(cfg),
        env_(std::move(env)),
        features_(make_features(cfg, *env_, false, seed, shared)),
        policy_(features_.policy, env_->action_dim(), covariance_kind(cfg.algo.covariance),
                cfg.algo.policy_bias, cfg.algo.policy_init_std),
        env_rng_(Rng::stream(seed, Stream::kEnvironment)),
        explore_rng_(Rng::stream(seed, Stream::kExploration)),
        sample_rng_(Rng::stream(seed, Stream::kSampling)),
        ppo_(cfg.algo.id == AlgorithmId::kPpo) {
    Rng init = Rng::stream(seed, Stream::kInit);
    Mat K = policy_.gain();
    init_policy_gain(cfg, *env_, init, K);
    policy_.set_gain(K);
    Rng crng = Rng::stream(seed, Stream::kCritic);
    const int n_critics = cfg.algo.critic == CriticMode::kDouble ? 2 : 1;
    for (int i = 0; i < n_critics; ++i) {
      critics_.emplace_back(features_.critic, CriticKind::kV, env_->observation_dim());
      critics_.back().init_uniform(crng);
    }
    adam_ = AdamState(policy_.num_params(), cfg.algo.ppo_lr);
    const bool regularized = cfg.algo.regularizer != Regularizer::kNone;
    schedule_ = {regularized ? cfg.penalty.eta0 : 0.0, cfg.penalty.kappa, 0};
    settings_.max_kl = cfg.algo.max_kl;
    settings_.damping = cfg.algo.damping;
    settings_.cg_iters = cfg.algo.cg_iters;
  }

  void advance() override {
    std::vector<Trajectory> fresh;
    for (int e = 0; e < cfg_.algo.episodes_per_iter; ++e)
      fresh.push_back(collect_trajectory(*env_, policy_, env_rng_, explore_rng_, cfg_.env.horizon));
    history_.push_back(std::move(fresh));
    while (static_cast<int>(history_.size()) > cfg_.algo.reuse_iterations + 1) history_.pop_front();

    std::vector<Cached> data;
    for (const auto& it : history_)
      for (const auto& traj : it) data.push_back(cache(traj));

    int j = 0, src = 0;
    if (critics_.size() == 2) {
      j = static_cast<int>(sample_rng_.index(2));
      src = 1 - j;
    }
    // Critic: least squares on lambda-returns from the source critic.
    {
      std::vector<AdvantageBatch> adv = advantages(critics_[src], data);
      Mat phi = stack_rows(data, [](const Cached& c) -> const Mat& { return c.critic_phi; });
      Vec targets = concat(adv, [](const AdvantageBatch& b) -> const Vec& { return b.lambda_return; });
      critics_[j].weights = fit_least_squares(phi, targets);
      critics_[j].target = critics_[j].weights;
    }
    active_ = j;

    std::vector<AdvantageBatch> adv = advantages(critics_[j], data);
    PolicyBatch batch;
    batch.phi = stack_rows(data, [](const Cached& c) -> const Mat& { return c.policy_phi; });
    batch.actions = stack_rows(data, [](const Cached& c) -> const Mat& { return c.actions; });
    batch.behavior_log_probs = concat_cached(data);
    const Vec A = concat(adv, [](const AdvantageBatch& b) -> const Vec& { return b.advantage; });
    const Vec delta = concat(adv, [](const AdvantageBatch& b) -> const Vec& { return b.td_error; });
    stats_.last_train_mstde = delta.squaredNorm() / static_cast<double>(delta.size());
    batch.advantage = standardize(A);
    switch (cfg_.algo.regularizer) {
      case Regularizer::kNone:
        batch.penalty = Vec::Zero(A.size());
        break;
      case Regularizer::kTdReg:
        batch.penalty = standardize(standardize(delta).array().square().matrix());
        break;
      case Regularizer::kGaeReg:
        batch.penalty = standardize(batch.advantage.array().square().matrix());
        break;
    }

    const double eta = schedule_.eta();
    if (ppo_) {
      ppo_update(batch, eta);
    } else {
      const TrpoStep st = trpo_update(policy_, batch, eta, settings_);
      if (st.accepted) {
        ++stats_.trpo_accepted;
        stats_.max_accepted_kl = std::max(stats_.max_accepted_kl, st.kl);
        if (st.kl > settings_.max_kl) ++stats_.kl_violations;
      } else {
        ++stats_.trpo_rejected;
      }
    }
    if (!policy_.params().allFinite()) throw NumericalError("non-finite policy parameters");
    schedule_ = eta_step(schedule_);
    ++stats_.actor_updates;
  }

  Vec actor_params() const override { return policy_.params(); }
  const Policy& policy() const override { return policy_; }
  double eta() const override { return schedule_.eta(); }

  double critic_td_error(const Transition& t) const override {
    return td_error_v(critics_[active_], t, cfg_.env.gamma);
  }
  std::optional<Mat> linear_gain() const override {
    if (cfg_.algo.policy_features != FeatureKind::kIdentity || cfg_.algo.policy_bias) return std::nullopt;
    return policy_.gain();
  }

 private:
  struct Cached {
    const Trajectory* traj;
    Mat policy_phi;
    Mat actions;
    Mat critic_phi;
    Mat critic_phi_next;
    Vec rewards;
    std::vector<char> terminal;
    Vec behavior;
  };

  Cached cache(const Trajectory& traj) const {
    const Eigen::Index n = static_cast<Eigen::Index>(traj.size());
    Cached c;
    c.traj = &traj;
    c.policy_phi.resize(n, policy_.feature_dim());
    c.actions.resize(n, policy_.action_dim());
    c.critic_phi.resize(n, critics_[0].num_weights());
    c.critic_phi_next.resize(n, critics_[0].num_weights());
    c.rewards.resize(n);
    c.terminal.resize(traj.size());
    c.behavior.resize(n);
    const bool shared = features_.policy == features_.critic;
    for (Eigen::Index t = 0; t < n; ++t) {
      const Transition& tr = traj[t];
      const Vec f = policy_.features(tr.state);
      c.policy_phi.row(t) = f.transpose();
      c.actions.row(t) = tr.action.transpose();
      c.critic_phi.row(t) = (shared ? f : critics_[0].features(tr.state)).transpose();
      c.critic_phi_next.row(t) = critics_[0].features(tr.next_state).transpose();
      c.rewards[t] = tr.reward;
      c.terminal[t] = tr.is_terminal ? 1 : 0;
      c.behavior[t] = tr.log_prob;
    }
    return c;
  }

  std::vector<AdvantageBatch> advantages(const LinearCritic& critic, const std::vector<Cached>& data) const {
    EstimatorConfig ec{cfg_.env.gamma, cfg_.algo.lambda, cfg_.algo.retrace};
    std::vector<AdvantageBatch> out;
    out.reserve(data.size());
    for (const Cached& c : data) {
      const Vec v = c.critic_phi * critic.weights;
      const Vec vn = c.critic_phi_next * critic.weights;
      Vec log_c;
      if (cfg_.algo.retrace || cfg_.algo.importance_weights)
        log_c = importance_log_weights(policy_.log_prob_batch(c.policy_phi, c.actions), c.behavior,
                                       cfg_.algo.retrace);
      out.push_back(lambda_advantage(c.rewards, v, vn, c.terminal, ec.gamma, ec.lambda, log_c));
    }
    return out;
  }

  template <typename F>
  static Mat stack_rows(const std::vector<Cached>& data, F get) {
    Eigen::Index rows = 0;
    for (const auto& c : data) rows += get(c).rows();
    Mat out(rows, get(data.front()).cols());
    Eigen::Index r = 0;
    for (const auto& c : data) {
      out.middleRows(r, get(c).rows()) = get(c);
      r += get(c).rows();
    }
    return out;
  }

  template <typename F>
  static Vec concat(const std::vector<AdvantageBatch>& parts, F get) {
    Eigen::Index n = 0;
    for (const auto& p : parts) n += get(p).size();
    Vec out(n);
    Eigen::Index r = 0;
    for (const auto& p : parts) {
      out.segment(r, get(p).size()) = get(p);
      r += get(p).size();
    }
    return out;
  }

  static Vec concat_cached(const std::vector<Cached>& data) {
    Eigen::Index n = 0;
    for (const auto& c : data) n += c.behavior.size();
    Vec out(n);
    Eigen::Index r = 0;
    for (const auto& c : data) {
      out.segment(r, c.behavior.size()) = c.behavior;
      r += c.behavior.size();
    }
    return out;
  }

  void ppo_update(const PolicyBatch& batch, double eta) {
    const Eigen::Index n = batch.size();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    const Eigen::Index mb = std::max(1, cfg_.algo.minibatch);
    for (int epoch = 0; epoch < cfg_.algo.epochs; ++epoch) {
      std::iota(order.begin(), order.end(), Eigen::Index{0});
      // Fisher-Yates with our own draws so the order is library independent.
      for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[sample_rng_.index(i)]);
      for (Eigen::Index start = 0; start < n; start += mb) {
        const Eigen::Index len = std::min(mb, n - start);
        PolicyBatch sub;
        sub.phi.resize(len, batch.phi.cols());
        sub.actions.resize(len, batch.actions.cols());
        sub.behavior_log_probs.resize(len);
        sub.advantage.resize(len);
        sub.penalty.resize(len);
        for (Eigen::Index k = 0; k < len; ++k) {
          const Eigen::Index i = order[static_cast<std::size_t>(start + k)];
          sub.phi.row(k) = batch.phi.row(i);
          sub.actions.row(k) = batch.actions.row(i);
          sub.behavior_log_probs[k] = batch.behavior_log_probs[i];
          sub.advantage[k] = batch.advantage[i];
          sub.penalty[k] = batch.penalty[i];
        }
        const GradientTerms g = ppo_gradient(policy_, sub, eta, cfg_.algo.clip);
        policy_.set_params(adam_step(adam_, policy_.params(), g.total, true));
      }
    }
  }

  ExperimentConfig cfg_;
  std::shared_ptr<const Environment> env_;
  FeatureSet features_;
  GaussianPolicy policy_;
  std::vector<LinearCritic> critics_;
  Rng env_rng_, explore_rng_, sample_rng_;
  bool ppo_;
  AdamState adam_;
  TrpoSettings settings_;
  PenaltySchedule schedule_;
  std::deque<std::vector<Trajectory>> history_;
  int active_ = 0;
};

}  // namespace

std::unique_ptr<Agent> make_agent(const ExperimentConfig& config,
                                  std::shared_ptr<const Environment> env, std::uint64_t seed,
                                  const SharedData& shared) {
  config.validate();
  switch (config.algo.id) {
    case AlgorithmId::kReinforce:
    case AlgorithmId::kSpg:
      return std::make_unique<SpgAgent>(config, std::move(env), seed, shared);
    case AlgorithmId::kDpg:
    case AlgorithmId::kTd3:
      return std::make_unique<DpgAgent>(config, std::move(env), seed, shared);
    case AlgorithmId::kTrpo:
    case AlgorithmId::kPpo:
      return std::make_unique<BatchAgent>(config, std::move(env), seed, shared);
  }
  throw ConfigError("unknown algorithm");
}

}  // namespace tdreg
