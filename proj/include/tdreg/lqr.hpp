#pragma once

#include <limits>

#include "tdreg/env.hpp"

namespace tdreg {

/// Discrete-time LQR: s' = A s + B a + N(0, noise_std^2 I), r = -s'Xs - a'Ya.
struct LqrSpec {
  Mat A = Mat::Identity(2, 2);
  Mat B = Mat::Identity(2, 2);
  Mat X = Mat::Identity(2, 2);
  Mat Y = Mat::Identity(2, 2);
  double noise_std = 0.1;
  double gamma = 0.99;
  int horizon = 150;
  /// Initial state is uniform in [init_low, init_high]^d.
  double init_low = -10.0;
  double init_high = 10.0;

  int dim() const { return static_cast<int>(A.rows()); }
  void validate() const;
};

/// Q(s,a) = q0 + s'Qss s + a'Qaa a + s'Qsa a for the linear policy a = K s.
struct TrueQCoefficients {
  double q0 = 0.0;
  Mat ss;
  Mat aa;
  Mat sa;

  double value(const Vec& s, const Vec& a) const {
    return q0 + s.dot(ss * s) + a.dot(aa * a) + s.dot(sa * a);
  }
};

/// Quadratic value V(s) = v0 + s'P s (P negative semidefinite here).
struct QuadraticValue {
  double v0 = 0.0;
  Mat P;

  double value(const Vec& s) const { return v0 + s.dot(P * s); }
};

inline constexpr double kNegInfReturn = -std::numeric_limits<double>::infinity();

class LqrEnv final : public Environment {
 public:
  explicit LqrEnv(LqrSpec spec = {});

  int state_dim() const override { return spec_.dim(); }
  int action_dim() const override { return static_cast<int>(spec_.B.cols()); }
  int horizon() const override { return spec_.horizon; }
  double discount() const override { return spec_.gamma; }
  bool time_limit_is_terminal() const override { return false; }
  Vec sample_initial(Rng& rng) const override;
  StepResult step(const Vec& s, const Vec& a, Rng& rng) const override;

  const LqrSpec& spec() const { return spec_; }

 private:
  LqrSpec spec_;
};

/// One transition; `rng` supplies the transition noise.
StepResult lqr_step(const LqrSpec& spec, const Vec& s, const Vec& a, Rng& rng);

/// True iff every eigenvalue of A + B K has modulus strictly below one.
bool lqr_is_stable(const LqrSpec& spec, const Mat& K);

/// Value of the policy a = K s. Throws DivergenceError for unstable K.
QuadraticValue lqr_true_value(const LqrSpec& spec, const Mat& K);
/// Q-function of the policy a = K s. Throws DivergenceError for unstable K.
TrueQCoefficients lqr_true_q(const LqrSpec& spec, const Mat& K);
/// Expected discounted return from the uniform initial distribution, or
/// kNegInfReturn when K is unstable.
double lqr_true_return(const LqrSpec& spec, const Mat& K);
/// Optimal discounted-LQR gain from Riccati iteration.
Mat lqr_optimal_gain(const LqrSpec& spec);

}  // namespace tdreg
