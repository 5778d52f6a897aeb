#include "tdreg/lqr.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

namespace tdreg {

namespace {

constexpr double kFixedPointTol = 1e-12;
constexpr int kMaxLyapunovIters = 10'000'000;
constexpr int kMaxRiccatiIters = 100'000;

bool converged(const Mat& next, const Mat& prev) {
  double scale = std::max(1.0, next.cwiseAbs().maxCoeff());
  return (next - prev).cwiseAbs().maxCoeff() < kFixedPointTol * scale;
}

}  // namespace

void LqrSpec::validate() const {
  const auto d = A.rows();
  if (A.cols() != d || B.rows() != d || X.rows() != d || X.cols() != d ||
      Y.rows() != B.cols() || Y.cols() != B.cols()) {
    throw ConfigError("LQR matrix dimensions are inconsistent");
  }
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("LQR discount must lie in [0, 1)");
  if (noise_std < 0.0) throw ConfigError("LQR noise_std must be non-negative");
  if (horizon < 1) throw ConfigError("LQR horizon must be positive");
  if (!(init_low <= init_high)) throw ConfigError("LQR init range is empty");
}

LqrEnv::LqrEnv(LqrSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

Vec LqrEnv::sample_initial(Rng& rng) const {
  return rng.uniform_vector(spec_.dim(), spec_.init_low, spec_.init_high);
}

StepResult LqrEnv::step(const Vec& s, const Vec& a, Rng& rng) const {
  return lqr_step(spec_, s, a, rng);
}

StepResult lqr_step(const LqrSpec& spec, const Vec& s, const Vec& a, Rng& rng) {
  if (s.size() != spec.dim() || a.size() != spec.B.cols()) {
    throw ConfigError("LQR step dimension mismatch");
  }
  StepResult out;
  out.reward = -s.dot(spec.X * s) - a.dot(spec.Y * a);
  out.next_state = spec.A * s + spec.B * a;
  if (spec.noise_std > 0.0) {
    for (Eigen::Index i = 0; i < out.next_state.size(); ++i) {
      out.next_state[i] += rng.normal(0.0, spec.noise_std);
    }
  }
  return out;
}

bool lqr_is_stable(const LqrSpec& spec, const Mat& K) {
  if (!K.allFinite()) return false;
  Mat closed = spec.A + spec.B * K;
  Eigen::EigenSolver<Mat> es(closed, false);
  if (es.info() != Eigen::Success) return false;
  return es.eigenvalues().cwiseAbs().maxCoeff() < 1.0;
}

QuadraticValue lqr_true_value(const LqrSpec& spec, const Mat& K) {
  if (!lqr_is_stable(spec, K)) throw DivergenceError("closed-loop LQR system is unstable");
  const Mat closed = spec.A + spec.B * K;
  const Mat stage = spec.X + K.transpose() * spec.Y * K;
  // Cost-to-go matrix: P = stage + gamma * closed' P closed.
  Mat P = stage;
  int it = 0;
  for (; it < kMaxLyapunovIters; ++it) {
    Mat next = stage + spec.gamma * closed.transpose() * P * closed;
    bool done = converged(next, P);
    P = std::move(next);
    if (done) break;
  }
  if (it == kMaxLyapunovIters || !P.allFinite()) {
    throw NumericalError("discounted Lyapunov recursion did not converge");
  }
  // The stopping rule bounds the step, not the error; near the stability
  // boundary the remaining gap is step / (1 - rho). One correction solve on
  // the residual removes it.
  const Eigen::Index d = P.rows();
  const Mat residual = stage + spec.gamma * closed.transpose() * P * closed - P;
  const Mat lhs = Mat::Identity(d * d, d * d) -
                  spec.gamma * Eigen::kroneckerProduct(closed.transpose(), closed.transpose()).eval();
  const Vec corr = lhs.partialPivLu().solve(Eigen::Map<const Vec>(residual.data(), d * d));
  P += Eigen::Map<const Mat>(corr.data(), d, d);
  P = 0.5 * (P + P.transpose()).eval();
  const double noise_var = spec.noise_std * spec.noise_std;
  QuadraticValue v;
  v.P = -P;
  v.v0 = -spec.gamma * noise_var * P.trace() / (1.0 - spec.gamma);
  return v;
}

TrueQCoefficients lqr_true_q(const LqrSpec& spec, const Mat& K) {
  const QuadraticValue v = lqr_true_value(spec, K);
  const Mat P = -v.P;
  const double g = spec.gamma;
  TrueQCoefficients q;
  q.ss = -(spec.X + g * spec.A.transpose() * P * spec.A);
  q.aa = -(spec.Y + g * spec.B.transpose() * P * spec.B);
  q.sa = -2.0 * g * spec.A.transpose() * P * spec.B;
  // gamma * (v0 - tr(P Sigma)) collapses to v0 at the fixed point.
  q.q0 = v.v0;
  return q;
}

double lqr_true_return(const LqrSpec& spec, const Mat& K) {
  if (!lqr_is_stable(spec, K)) return kNegInfReturn;
  const QuadraticValue v = lqr_true_value(spec, K);
  const double lo = spec.init_low, hi = spec.init_high;
  const double mean = 0.5 * (lo + hi);
  const double var = (hi - lo) * (hi - lo) / 12.0;
  const int d = spec.dim();
  Mat second = Mat::Constant(d, d, mean * mean);
  second.diagonal().array() += var;
  return v.v0 + (v.P.cwiseProduct(second)).sum();
}

Mat lqr_optimal_gain(const LqrSpec& spec) {
  const double g = spec.gamma;
  const Mat& A = spec.A;
  const Mat& B = spec.B;
  Mat P = spec.X;
  for (int it = 0; it < kMaxRiccatiIters; ++it) {
    Mat gain_den = spec.Y + g * B.transpose() * P * B;
    Mat BtPA = B.transpose() * P * A;
    Mat next = spec.X + g * A.transpose() * P * A -
               g * g * BtPA.transpose() * gain_den.ldlt().solve(BtPA);
    bool done = converged(next, P);
    P = std::move(next);
    if (!P.allFinite()) break;
    if (done) {
      Mat den = spec.Y + g * B.transpose() * P * B;
      return -g * den.ldlt().solve(B.transpose() * P * A);
    }
  }
  throw NumericalError("Riccati iteration did not converge");
}

}  // namespace tdreg
