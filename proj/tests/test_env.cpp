#include <cstring>
#include <set>

#include "doctest.h"
#include "tdreg/env.hpp"
#include "tdreg/features.hpp"
#include "tdreg/lqr.hpp"
#include "tdreg/pendulum.hpp"
#include "tdreg/policy.hpp"

using namespace tdreg;

namespace {

// Pins the initial state so rollouts are hand-checkable.
class FixedStart final : public Environment {
 public:
  FixedStart(std::shared_ptr<const Environment> inner, Vec s0) : inner_(std::move(inner)), s0_(std::move(s0)) {}
  int state_dim() const override { return inner_->state_dim(); }
  int observation_dim() const override { return inner_->observation_dim(); }
  int action_dim() const override { return inner_->action_dim(); }
  int horizon() const override { return inner_->horizon(); }
  double discount() const override { return inner_->discount(); }
  bool time_limit_is_terminal() const override { return inner_->time_limit_is_terminal(); }
  Vec sample_initial(Rng&) const override { return s0_; }
  StepResult step(const Vec& s, const Vec& a, Rng& rng) const override { return inner_->step(s, a, rng); }
  Vec observe(const Vec& s, Rng& rng) const override { return inner_->observe(s, rng); }

 private:
  std::shared_ptr<const Environment> inner_;
  Vec s0_;
};

DeterministicPolicy linear_policy(int dim, const Mat& K) {
  DeterministicPolicy p(std::make_shared<IdentityMap>(dim), dim);
  p.set_gain(K);
  return p;
}

Transition make_transition(double tag) {
  Transition t;
  t.state = Vec::Constant(1, tag);
  t.action = Vec::Zero(1);
  t.next_state = Vec::Constant(1, tag);
  t.reward = tag;
  return t;
}

std::string bytes_of(const Trajectory& traj) {
  std::string out;
  auto put = [&](const Vec& v) {
    out.append(reinterpret_cast<const char*>(v.data()), sizeof(double) * static_cast<std::size_t>(v.size()));
  };
  for (const auto& t : traj) {
    put(t.state);
    put(t.action);
    put(t.next_state);
    out.append(reinterpret_cast<const char*>(&t.reward), sizeof(double));
    out.append(reinterpret_cast<const char*>(&t.log_prob), sizeof(double));
  }
  return out;
}

}  // namespace

TEST_CASE("zero gain on noiseless LQR holds the state") {
  LqrSpec spec;
  spec.noise_std = 0.0;
  auto env = std::make_shared<FixedStart>(std::make_shared<LqrEnv>(spec), Vec::Ones(2));
  auto policy = linear_policy(2, Mat::Zero(2, 2));
  Rng rng(1);
  Trajectory traj = collect_trajectory(*env, policy, rng, 3, false);
  REQUIRE(traj.size() == 3);
  for (const auto& t : traj) {
    CHECK(t.state == Vec::Ones(2));
    CHECK(t.next_state == Vec::Ones(2));
    CHECK(t.reward == -2.0);
  }
  CHECK(traj[0].step_index == 1);
  CHECK(traj[2].step_index == 3);
}

TEST_CASE("pendulum at the goal with zero torque stays put") {
  auto env = std::make_shared<FixedStart>(std::make_shared<SinglePendulumEnv>(), Vec::Zero(2));
  DeterministicPolicy policy(std::make_shared<IdentityMap>(2), 1);
  Rng rng(3);
  Trajectory traj = collect_trajectory(*env, policy, rng, 20, false);
  for (const auto& t : traj) {
    CHECK(t.next_state == Vec::Zero(2));
    CHECK(t.reward == 0.0);
  }
}

TEST_CASE("fixed seed gives identical trajectory bytes") {
  LqrEnv env;
  auto policy = linear_policy(2, -0.5 * Mat::Identity(2, 2));
  Rng a(7), b(7);
  const Trajectory ta = collect_trajectory(env, policy, a, 150, false);
  const Trajectory tb = collect_trajectory(env, policy, b, 150, false);
  CHECK(bytes_of(ta) == bytes_of(tb));
  Rng c(8);
  CHECK(bytes_of(collect_trajectory(env, policy, c, 150, false)) != bytes_of(ta));
}

TEST_CASE("trajectories chain exactly") {
  LqrEnv lqr;
  DoublePendulumEnv dbl;
  GaussianPolicy gp(std::make_shared<IdentityMap>(6), 2, CovarianceKind::kDiagonal, true, 1.0);
  auto dp = linear_policy(2, -0.3 * Mat::Identity(2, 2));
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng r1(seed), r2(seed + 100);
    const Trajectory t1 = collect_trajectory(lqr, dp, r1, 150, true);
    const Trajectory t2 = collect_trajectory(dbl, gp, r2, 60, true);
    for (const Trajectory* tr : {&t1, &t2}) {
      CHECK_NOTHROW(tr->validate());
      for (std::size_t t = 0; t + 1 < tr->size(); ++t) {
        CHECK(std::memcmp((*tr)[t].next_state.data(), (*tr)[t + 1].state.data(),
                          sizeof(double) * static_cast<std::size_t>((*tr)[t].next_state.size())) == 0);
        CHECK((*tr)[t].step_index < (*tr)[t + 1].step_index);
      }
    }
    CHECK(t2.transitions.back().is_terminal);
    CHECK_FALSE(t1.transitions.back().is_terminal);
  }
}

TEST_CASE("broken chain is rejected") {
  Trajectory traj;
  traj.transitions = {make_transition(1.0), make_transition(2.0)};
  traj[1].step_index = 2;
  CHECK_THROWS_AS(traj.validate(), DataError);
}

TEST_CASE("dimension mismatch is a config error") {
  LqrEnv env;
  DeterministicPolicy p(std::make_shared<IdentityMap>(3), 2);
  Rng rng(0);
  CHECK_THROWS_AS(collect_trajectory(env, p, rng, 5), ConfigError);
}

TEST_CASE("replay sampling") {
  SUBCASE("warm-up batch has distinct elements") {
    ReplayMemory mem;
    for (int i = 0; i < 100; ++i) mem.push(make_transition(i));
    Rng rng(11);
    const auto batch = mem.sample(32, rng);
    std::set<double> tags;
    for (const auto& t : batch) tags.insert(t.reward);
    CHECK(tags.size() == 32);
  }
  SUBCASE("too few samples") {
    ReplayMemory mem;
    for (int i = 0; i < 3; ++i) mem.push(make_transition(i));
    Rng rng(0);
    CHECK_THROWS_AS(mem.sample(5, rng), InsufficientDataError);
  }
  SUBCASE("FIFO eviction") {
    ReplayMemory mem(10);
    for (int i = 0; i < 11; ++i) mem.push(make_transition(i));
    CHECK(mem.size() == 10);
    for (std::size_t i = 0; i < mem.size(); ++i) CHECK(mem[i].reward != 0.0);
    CHECK(mem[0].reward == 1.0);
    CHECK(mem[9].reward == 10.0);
    mem.push(make_transition(11));
    CHECK(mem[0].reward == 2.0);
  }
  SUBCASE("uniform frequencies") {
    ReplayMemory mem;
    for (int i = 0; i < 10; ++i) mem.push(make_transition(i));
    Rng rng(5);
    std::vector<int> counts(10, 0);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) counts[static_cast<std::size_t>(mem.sample(1, rng)[0].reward)]++;
    for (int c : counts) CHECK(std::abs(double(c) / draws - 0.1) <= 0.005);
  }
  SUBCASE("push then sample") {
    ReplayMemory mem;
    std::vector<Transition> fresh;
    for (int i = 0; i < 4; ++i) fresh.push_back(make_transition(i));
    Rng rng(2);
    CHECK(mem.push_sample(fresh, 4, rng).size() == 4);
    CHECK(mem.size() == 4);
  }
}

TEST_CASE("subset sampling covers pairs evenly") {
  Rng rng(9);
  std::vector<int> counts(5, 0);
  for (int i = 0; i < 50000; ++i) {
    auto idx = sample_without_replacement(5, 2, rng);
    REQUIRE(idx.size() == 2);
    CHECK(idx[0] != idx[1]);
    for (auto j : idx) counts[j]++;
  }
  for (int c : counts) CHECK(std::abs(c / 100000.0 - 0.2) < 0.01);
}

TEST_CASE("observation noise formula") {
  SUBCASE("zero draw is the identity") {
    Vec s(3);
    s << 0.0, 3.0, -4.0;
    CHECK(apply_observation_noise(s, Vec::Zero(3)) == s);
  }
  SUBCASE("divisor clipping") {
    Vec s(2);
    s << 0.0, 400.0;
    Vec out = apply_observation_noise(s, Vec::Ones(2));
    CHECK(out[0] == doctest::Approx(10.0));
    CHECK(out[1] == doctest::Approx(400.005));
  }
  SUBCASE("empirical std") {
    Vec s(2);
    s << 0.0, 400.0;
    Rng rng(4);
    double sum0 = 0, sq0 = 0, sum1 = 0, sq1 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      Vec d = apply_observation_noise(s, rng) - s;
      sum0 += d[0];
      sq0 += d[0] * d[0];
      sum1 += d[1];
      sq1 += d[1] * d[1];
    }
    const double sd0 = std::sqrt(sq0 / n - (sum0 / n) * (sum0 / n));
    const double sd1 = std::sqrt(sq1 / n - (sum1 / n) * (sum1 / n));
    CHECK(sd0 == doctest::Approx(0.5).epsilon(0.01));
    CHECK(sd1 == doctest::Approx(0.00025).epsilon(0.01));
  }
  SUBCASE("zero scale wrapper is the identity") {
    ObservationNoise env(std::make_shared<LqrEnv>(), 0.0);
    Rng rng(1);
    for (int i = 0; i < 10; ++i) {
      Vec s = rng.uniform_vector(2, -10, 10);
      CHECK(env.observe(s, rng) == s);
    }
  }
  SUBCASE("rewards use the true state") {
    LqrSpec spec;
    spec.noise_std = 0.0;
    auto noisy = std::make_shared<FixedStart>(std::make_shared<ObservationNoise>(std::make_shared<LqrEnv>(spec)), Vec::Ones(2));
    auto policy = linear_policy(2, Mat::Zero(2, 2));
    Rng rng(6);
    Trajectory traj = collect_trajectory(*noisy, policy, rng, 5, false);
    for (const auto& t : traj) {
      CHECK(t.reward == -2.0);
      CHECK(t.state != Vec::Ones(2));
    }
  }
}

TEST_CASE("rng streams are independent and reproducible") {
  Rng a = Rng::stream(42, Stream::kEnvironment);
  Rng b = Rng::stream(42, Stream::kEnvironment);
  Rng c = Rng::stream(42, Stream::kExploration);
  Rng d = Rng::stream(42, Stream::kEnvironment, 1);
  const double x = a.normal();
  CHECK(x == b.normal());
  CHECK(x != c.normal());
  CHECK(x != d.normal());
}
