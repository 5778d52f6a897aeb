#include "tdreg/pendulum.hpp"

#include <algorithm>
#include <cmath>

namespace tdreg {

namespace {
constexpr double kPi = std::numbers::pi;
}

double wrap_angle(double x) {
  double y = std::fmod(x + kPi, 2.0 * kPi);
  if (y < 0.0) y += 2.0 * kPi;
  return y - kPi;
}

Vec wrapped_angle_distance(const Vec& q, const Vec& q_goal) {
  if (q.size() != q_goal.size()) throw ConfigError("angle vectors differ in size");
  Vec out(q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    // Reduce first so the folding formula holds for any difference.
    const double diff = std::abs(wrap_angle(q[i] - q_goal[i]));
    out[i] = kPi - std::abs(diff - kPi);
  }
  return out;
}

PendulumState pendulum_step(const SinglePendulumSpec& spec, double q, double qdot, double a) {
  const double u = std::clamp(a, -spec.max_torque, spec.max_torque);
  PendulumState out;
  out.reward = -q * q - 0.1 * qdot * qdot - 0.001 * u * u;
  // -sin(q + pi) written as sin(q) so the upright equilibrium is exact.
  const double acc = 3.0 * spec.g / (2.0 * spec.l) * std::sin(q) +
                     3.0 / (spec.m * spec.l * spec.l) * u;
  double new_qdot = qdot + acc * spec.dt;
  double new_q = q + new_qdot * spec.dt;
  out.qdot = std::clamp(new_qdot, -spec.max_speed, spec.max_speed);
  out.q = wrap_angle(new_q);
  return out;
}

Vec SinglePendulumEnv::sample_initial(Rng& rng) const {
  Vec s(2);
  s[0] = rng.uniform(-kPi, kPi);
  s[1] = rng.uniform(-1.0, 1.0);
  return s;
}

Vec SinglePendulumEnv::observe(const Vec& s, Rng& /*rng*/) const {
  if (!spec_.trig_observation) return s;
  Vec o(3);
  o << std::cos(s[0]), std::sin(s[0]), s[1];
  return o;
}

StepResult SinglePendulumEnv::step(const Vec& s, const Vec& a, Rng& /*rng*/) const {
  if (s.size() != 2 || a.size() != 1) throw ConfigError("pendulum step dimension mismatch");
  PendulumState next = pendulum_step(spec_, s[0], s[1], a[0]);
  StepResult out;
  out.next_state = Vec(2);
  out.next_state << next.q, next.qdot;
  out.reward = next.reward;
  return out;
}

DoublePendulumForces double_pendulum_forces(const DoublePendulumSpec& p,
                                            const Eigen::Vector2d& q,
                                            const Eigen::Vector2d& qdot) {
  const double hl1 = p.l1 / 2.0;
  const double hl2 = p.l2 / 2.0;
  const double c2 = std::cos(q[1]);
  const double s2 = std::sin(q[1]);
  DoublePendulumForces f;
  // M11 uses 2 l1 (l2/2)^2 cos(q2).
  f.M(0, 0) = p.m1 * hl1 * hl1 + p.I1 +
              p.m2 * (p.l1 * p.l1 + hl2 * hl2 + 2.0 * p.l1 * hl2 * hl2 * c2) + p.I2;
  f.M(0, 1) = p.m2 * (hl2 * hl2 + p.l1 * hl2 * c2) + p.I2;
  f.M(1, 0) = f.M(0, 1);
  f.M(1, 1) = p.m2 * hl2 * hl2 + p.I2;
  const double c1 = std::cos(q[0]);
  const double c12 = std::cos(q[0] + q[1]);
  f.gravity[0] = p.m1 * p.g * hl1 * c1 + p.m2 * p.g * (p.l1 * c1 + hl2 * c12);
  f.gravity[1] = p.m2 * p.g * hl2 * c12;
  f.coriolis[0] = -p.m2 * p.l1 * hl2 * s2 * (2.0 * qdot[0] * qdot[1] + qdot[1] * qdot[1]);
  f.coriolis[1] = p.m2 * p.l1 * hl2 * s2 * qdot[0] * qdot[0];
  f.friction[0] = p.v1 * qdot[0];
  f.friction[1] = p.v2 * qdot[1];
  return f;
}

DoublePendulumState double_pendulum_step(const DoublePendulumSpec& spec,
                                         const Eigen::Vector2d& q,
                                         const Eigen::Vector2d& qdot,
                                         const Eigen::Vector2d& a) {
  const Eigen::Vector2d u = a.cwiseMax(-spec.max_torque).cwiseMin(spec.max_torque);
  const Eigen::Vector2d goal(spec.goal_q1, spec.goal_q2);
  DoublePendulumState out;
  out.reward = -wrapped_angle_distance(q, goal).squaredNorm() - 0.001 * u.squaredNorm();

  const DoublePendulumForces f = double_pendulum_forces(spec, q, qdot);
  const double det = f.M.determinant();
  if (!(std::abs(det) > 1e-12)) throw NumericalError("double pendulum inertia matrix is singular");
  const Eigen::Vector2d qddot = f.M.inverse() * (u - f.gravity - f.coriolis - f.friction);
  Eigen::Vector2d new_qdot = spec.velocity_update == VelocityUpdate::kPlus
                                 ? Eigen::Vector2d(qdot + qddot * spec.dt)
                                 : Eigen::Vector2d(qdot - qddot * spec.dt);
  Eigen::Vector2d new_q = q + new_qdot * spec.dt;
  out.qdot = new_qdot.cwiseMax(-spec.max_speed).cwiseMin(spec.max_speed);
  out.q = Eigen::Vector2d(wrap_angle(new_q[0]), wrap_angle(new_q[1]));
  return out;
}

Vec DoublePendulumEnv::sample_initial(Rng& rng) const {
  Vec s(4);
  s[0] = rng.uniform(-kPi, kPi);
  s[1] = rng.uniform(-kPi, kPi);
  s[2] = rng.uniform(-1.0, 1.0);
  s[3] = rng.uniform(-1.0, 1.0);
  return s;
}

StepResult DoublePendulumEnv::step(const Vec& s, const Vec& a, Rng& /*rng*/) const {
  if (s.size() != 4 || a.size() != 2) throw ConfigError("double pendulum step dimension mismatch");
  DoublePendulumState next = double_pendulum_step(
      spec_, s.head<2>(), s.tail<2>(), Eigen::Vector2d(a[0], a[1]));
  StepResult out;
  out.next_state = Vec(4);
  out.next_state << next.q, next.qdot;
  out.reward = next.reward;
  return out;
}

Vec DoublePendulumEnv::observe(const Vec& s, Rng& /*rng*/) const {
  Vec o(6);
  o << std::sin(s[0]), std::sin(s[1]), std::cos(s[0]), std::cos(s[1]), s[2], s[3];
  return o;
}

}  // namespace tdreg
