#include <cstring>

#include "doctest.h"
#include "oracles.hpp"
#include "tdreg/config.hpp"
#include "tdreg/critic_fit.hpp"
#include "tdreg/experiment.hpp"
#include "tdreg/lqr.hpp"
#include "tdreg/training.hpp"

using namespace tdreg;

namespace {

const char* kSpg = R"(
env.id = lqr
algo.id = spg
algo.critic = single
algo.critic_degree = 2
run.budget = 15
eval.every = 5
)";

const char* kDpg = R"(
env.id = lqr
algo.id = dpg
algo.critic = target
algo.critic_degree = 3
algo.target_actor = false
run.budget = 400
eval.every = 100
)";

const char* kTd3 = R"(
env.id = lqr
algo.id = td3
algo.critic = twin
algo.critic_degree = 3
algo.delay = 2
run.budget = 400
eval.every = 100
)";

const char* kTrpo = R"(
env.id = pendulum
env.horizon = 150
algo.id = trpo
algo.critic = double
algo.critic_features = fourier
algo.policy_features = fourier
algo.policy_bias = true
algo.covariance = diagonal
algo.policy_init_std = 1
algo.episodes_per_iter = 2
algo.reuse_iterations = 2
algo.retrace = true
features.calibration_states = 400
run.budget = 6
eval.every = 3
eval.episodes = 2
)";

const char* kPpo = R"(
env.id = pendulum
env.horizon = 150
algo.id = ppo
algo.critic = single
algo.critic_features = fourier
algo.policy_features = fourier
algo.policy_bias = true
algo.covariance = diagonal
algo.policy_init_std = 1
algo.episodes_per_iter = 2
algo.epochs = 2
features.calibration_states = 400
run.budget = 4
eval.every = 2
eval.episodes = 2
)";

bool same_bits(const std::vector<Vec>& a, const std::vector<Vec>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size()) return false;
    if (std::memcmp(a[i].data(), b[i].data(), sizeof(double) * static_cast<std::size_t>(a[i].size())) != 0) return false;
  }
  return true;
}

std::vector<Vec> trace(const ExperimentConfig& cfg, int trial = 0) {
  const SharedData shared = prepare_shared(cfg);
  TrialOptions opt;
  opt.record_params = true;
  return run_trial(cfg, shared, trial, opt).param_trace;
}

}  // namespace

TEST_CASE("penalty schedule") {
  PenaltySchedule s{0.1, 0.999, 0};
  CHECK(s.eta() == 0.1);
  s = eta_step(s);
  CHECK(s.eta() == doctest::Approx(0.0999).epsilon(1e-15));
  for (int n = 1; n < 500; ++n) s = eta_step(s);
  CHECK(s.eta() == 0.1 * std::pow(0.999, 500));
  PenaltySchedule flat{0.3, 1.0, 0};
  for (int n = 0; n < 100; ++n) flat = eta_step(flat);
  CHECK(flat.eta() == 0.3);
}

TEST_CASE("least squares recovers representable targets") {
  Rng rng(1);
  PolynomialBasis basis(4, 2);
  const Vec w_true = rng.normal_vector(basis.output_dim());
  Mat phi(200, basis.output_dim());
  for (int i = 0; i < 200; ++i) phi.row(i) = basis.evaluate(rng.uniform_vector(4, -2, 2)).transpose();
  const Vec y = phi * w_true;
  const Vec w = fit_least_squares(phi, y);
  CHECK((phi * w - y).cwiseAbs().maxCoeff() < 1e-8);
  CHECK_THROWS_AS(fit_least_squares(Mat(0, 3), Vec(0)), InsufficientDataError);
}

TEST_CASE("least squares on true LQR Q targets") {
  LqrSpec spec;
  Mat K(2, 2);
  K << -0.6, 0.1, -0.1, -0.7;
  const auto q = lqr_true_q(spec, K);
  PolynomialBasis basis(4, 2);
  Rng rng(2);
  Mat phi(300, basis.output_dim());
  Vec y(300);
  for (int i = 0; i < 300; ++i) {
    Vec s = rng.uniform_vector(2, -10, 10), a = rng.uniform_vector(2, -10, 10);
    phi.row(i) = polynomial_features(basis, s, a).transpose();
    y[i] = q.value(s, a);
  }
  const Vec w = fit_least_squares(phi, y);
  for (int i = 0; i < 100; ++i) {
    Vec s = rng.uniform_vector(2, -10, 10), a = rng.uniform_vector(2, -10, 10);
    CHECK(std::abs(polynomial_features(basis, s, a).dot(w) - q.value(s, a)) < 1e-6);
  }
}

TEST_CASE("iterated Q fit converges to the true Q of the policy mean") {
  LqrSpec spec;
  spec.noise_std = 0.0;
  Mat K(2, 2);
  K << -0.5, 0.0, 0.1, -0.6;
  GaussianPolicy policy(std::make_shared<IdentityMap>(2), 2, CovarianceKind::kDiagonal, false, 2.0);
  policy.set_gain(K);
  LinearCritic critic(std::make_shared<PolynomialBasis>(4, 2), CriticKind::kQ, 2, 2);
  Rng rng(3);
  critic.init_uniform(rng);
  LqrEnv env(spec);
  std::vector<Trajectory> batch;
  for (int e = 0; e < 3; ++e) batch.push_back(collect_trajectory(env, policy, rng, 30, true));
  const auto res = fit_q_iterated(critic, policy, batch, spec.gamma, 20000, 1e-12);
  CHECK(res.converged);
  CHECK(critic.target == critic.weights);
  const auto q = lqr_true_q(spec, K);
  for (int i = 0; i < 50; ++i) {
    Vec s = rng.uniform_vector(2, -5, 5), a = rng.uniform_vector(2, -5, 5);
    CHECK(critic.value(s, a) == doctest::Approx(q.value(s, a)).epsilon(1e-6));
  }
}

TEST_CASE("critic ADAM step reduces the squared error") {
  Rng rng(4);
  LinearCritic critic(std::make_shared<PolynomialBasis>(4, 2), CriticKind::kQ, 2, 2);
  critic.init_uniform(rng, true);
  std::vector<Transition> batch;
  Vec y(32);
  for (int i = 0; i < 32; ++i) {
    Transition t;
    t.state = rng.uniform_vector(2, -1, 1);
    t.action = rng.uniform_vector(2, -1, 1);
    t.next_state = t.state;
    batch.push_back(t);
    y[i] = rng.uniform(-3, 3);
  }
  AdamState s(critic.num_weights(), 0.01), s2(critic.num_weights(), 0.01);
  const Vec twin_before = critic.twin->weights;
  double first = q_critic_adam_step(critic, s, batch, y);
  double last = first;
  for (int k = 0; k < 200; ++k) last = q_critic_adam_step(critic, s, batch, y);
  CHECK(last < first);
  CHECK(critic.twin->weights == twin_before);
  q_critic_adam_step(critic, s2, batch, y, true);
  CHECK(critic.twin->weights != twin_before);
}

TEST_CASE("zero penalty reproduces the vanilla parameter trace bit for bit") {
  struct Case {
    const char* text;
    std::vector<std::string> regs;
  };
  const std::vector<Case> cases = {
      {kSpg, {"td-reg"}}, {kDpg, {"td-reg"}}, {kTd3, {"td-reg"}}, {kTrpo, {"td-reg", "gae-reg"}}, {kPpo, {"td-reg", "gae-reg"}}};
  for (const auto& c : cases) {
    ExperimentConfig vanilla = parse_config(c.text);
    vanilla.algo.regularizer = Regularizer::kNone;
    const auto base = trace(vanilla, 3);
    REQUIRE(!base.empty());
    for (const auto& reg : c.regs) {
      ExperimentConfig zero = vanilla;
      set_config_value(zero, "algo.regularizer", reg);
      set_config_value(zero, "penalty.eta0", "0");
      CAPTURE(to_string(zero.algo.id));
      CAPTURE(reg);
      CHECK(same_bits(base, trace(zero, 3)));
      set_config_value(zero, "penalty.eta0", "0.5");
      CHECK_FALSE(same_bits(base, trace(zero, 3)));
    }
  }
}

TEST_CASE("shared seeds give shared initial parameters") {
  auto initial = [](const char* text, const std::string& reg) {
    ExperimentConfig cfg = parse_config(text);
    set_config_value(cfg, "algo.regularizer", reg);
    const SharedData shared = prepare_shared(cfg);
    auto agent = make_agent(cfg, make_environment(cfg), 77, shared);
    return agent->actor_params();
  };
  CHECK(initial(kDpg, "none") == initial(kDpg, "td-reg"));
  CHECK(initial(kDpg, "none") == initial(kTd3, "none"));
  CHECK(initial(kTrpo, "none") == initial(kTrpo, "gae-reg"));
  CHECK(initial(kTrpo, "none") == initial(kPpo, "td-reg"));
  ExperimentConfig reinforce = parse_config(kSpg);
  set_config_value(reinforce, "algo.id", "reinforce");
  auto a = make_agent(reinforce, make_environment(reinforce), 77, {});
  CHECK(a->actor_params() == initial(kSpg, "td-reg"));
}

TEST_CASE("DPG exploration schedule and eta decay per actor update") {
  ExperimentConfig cfg = parse_config(kDpg);
  set_config_value(cfg, "algo.regularizer", "td-reg");
  set_config_value(cfg, "penalty.eta0", "0.1");
  set_config_value(cfg, "penalty.kappa", "0.99");
  auto agent = make_agent(cfg, make_environment(cfg), 1, {});
  // The 100th transition completes the warm-up and triggers the first update.
  for (int i = 0; i < 99; ++i) agent->advance();
  CHECK(agent->stats().actor_updates == 0);
  CHECK(agent->eta() == 0.1);
  for (int i = 0; i < 51; ++i) agent->advance();
  CHECK(agent->stats().actor_updates == 51);
  CHECK(agent->eta() == 0.1 * std::pow(0.99, 51));

  ExperimentConfig td3 = parse_config(kTd3);
  auto t = make_agent(td3, make_environment(td3), 1, {});
  for (int i = 0; i < 150; ++i) t->advance();
  // 51 learn steps; the actor moves on every second one.
  CHECK(t->stats().actor_updates == 25);
}

TEST_CASE("REINFORCE forces the penalty off") {
  ExperimentConfig cfg = parse_config(kSpg);
  set_config_value(cfg, "algo.id", "reinforce");
  set_config_value(cfg, "penalty.eta0", "0.5");
  auto agent = make_agent(cfg, make_environment(cfg), 5, {});
  CHECK(agent->eta() == 0.0);
  ExperimentConfig bad = cfg;
  set_config_value(bad, "algo.regularizer", "td-reg");
  CHECK_THROWS_AS(make_agent(bad, make_environment(bad), 5, {}), ConfigError);
}

TEST_CASE("TRPO accepted steps stay inside the trust region") {
  ExperimentConfig cfg = parse_config(kTrpo);
  set_config_value(cfg, "algo.regularizer", "gae-reg");
  set_config_value(cfg, "penalty.eta0", "0.1");
  const SharedData shared = prepare_shared(cfg);
  auto agent = make_agent(cfg, make_environment(cfg), 2, shared);
  for (int i = 0; i < 6; ++i) agent->advance();
  const AgentStats& st = agent->stats();
  CHECK(st.trpo_accepted + st.trpo_rejected == 6);
  CHECK(st.kl_violations == 0);
  CHECK(st.max_accepted_kl <= 0.01);
}
