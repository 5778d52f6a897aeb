#pragma once

#include <numbers>

#include "tdreg/env.hpp"

namespace tdreg {

/// Wraps an angle into [-pi, pi).
double wrap_angle(double x);

/// pi - |(|q - q_goal|) - pi| elementwise, always in [0, pi].
Vec wrapped_angle_distance(const Vec& q, const Vec& q_goal);

struct SinglePendulumSpec {
  double g = 10.0;
  double m = 1.0;
  double l = 1.0;
  double dt = 0.05;
  double max_speed = 8.0;
  double max_torque = 2.0;
  int horizon = 50;
  double gamma = 0.99;
  bool trig_observation = false;
};

struct PendulumState {
  double q = 0.0;
  double qdot = 0.0;
  double reward = 0.0;
};

/// Gym-style swing-up step. Reward uses the pre-step state and clipped torque.
PendulumState pendulum_step(const SinglePendulumSpec& spec, double q, double qdot, double a);

/// Internal state is (q, qdot); the observation is the same or (cos q, sin q, qdot).
class SinglePendulumEnv final : public Environment {
 public:
  explicit SinglePendulumEnv(SinglePendulumSpec spec = {}) : spec_(spec) {}

  int state_dim() const override { return 2; }
  int observation_dim() const override { return spec_.trig_observation ? 3 : 2; }
  int action_dim() const override { return 1; }
  int horizon() const override { return spec_.horizon; }
  double discount() const override { return spec_.gamma; }
  bool time_limit_is_terminal() const override { return true; }
  Vec sample_initial(Rng& rng) const override;
  StepResult step(const Vec& s, const Vec& a, Rng& rng) const override;
  Vec observe(const Vec& s, Rng& rng) const override;

  const SinglePendulumSpec& spec() const { return spec_; }

 private:
  SinglePendulumSpec spec_;
};

enum class VelocityUpdate { kPlus, kMinus };

struct DoublePendulumSpec {
  double g = 9.81;
  double m1 = 1.0, m2 = 1.0;
  double l1 = 1.0, l2 = 1.0;
  double I1 = (1.0 + 0.0001) / 3.0;
  double I2 = (1.0 + 0.0001) / 3.0;
  double v1 = 2.5, v2 = 2.5;
  double dt = 0.02;
  double max_speed = 50.0;
  double max_torque = 10.0;
  int horizon = 500;
  double gamma = 0.99;
  /// qdot' = qdot + qddot dt (kPlus) or qdot - qddot dt (kMinus).
  VelocityUpdate velocity_update = VelocityUpdate::kPlus;
  double goal_q1 = std::numbers::pi / 2.0;
  double goal_q2 = 0.0;
};

struct DoublePendulumForces {
  Eigen::Matrix2d M;
  Eigen::Vector2d gravity;
  Eigen::Vector2d coriolis;
  Eigen::Vector2d friction;
};

DoublePendulumForces double_pendulum_forces(const DoublePendulumSpec& spec,
                                            const Eigen::Vector2d& q,
                                            const Eigen::Vector2d& qdot);

struct DoublePendulumState {
  Eigen::Vector2d q;
  Eigen::Vector2d qdot;
  double reward = 0.0;
};

DoublePendulumState double_pendulum_step(const DoublePendulumSpec& spec,
                                         const Eigen::Vector2d& q,
                                         const Eigen::Vector2d& qdot,
                                         const Eigen::Vector2d& a);

/// Internal state (q1, q2, qdot1, qdot2); observation
/// (sin q1, sin q2, cos q1, cos q2, qdot1, qdot2).
class DoublePendulumEnv final : public Environment {
 public:
  explicit DoublePendulumEnv(DoublePendulumSpec spec = {}) : spec_(spec) {}

  int state_dim() const override { return 4; }
  int observation_dim() const override { return 6; }
  int action_dim() const override { return 2; }
  int horizon() const override { return spec_.horizon; }
  double discount() const override { return spec_.gamma; }
  bool time_limit_is_terminal() const override { return true; }
  Vec sample_initial(Rng& rng) const override;
  StepResult step(const Vec& s, const Vec& a, Rng& rng) const override;
  Vec observe(const Vec& s, Rng& rng) const override;

  const DoublePendulumSpec& spec() const { return spec_; }

 private:
  DoublePendulumSpec spec_;
};

}  // namespace tdreg
