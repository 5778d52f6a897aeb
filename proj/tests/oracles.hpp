#pragma once

// Reference computations written independently of the library code paths.

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Explicit lambda-return: weighted n-step returns plus the Monte Carlo tail.
// rewards r_0..r_{T-1}, values V(s_0..s_{T-1}); the episode ends after T steps.
inline double lambda_return(const std::vector<double>& r, const std::vector<double>& v, double gamma,
                            double lambda, std::size_t t) {
  const std::size_t T = r.size();
  auto n_step = [&](std::size_t n) {
    double g = 0.0, disc = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      g += disc * r[t + i];
      disc *= gamma;
    }
    if (t + n < T) g += disc * v[t + n];
    return g;
  };
  const std::size_t tail = T - t;
  double out = 0.0;
  for (std::size_t n = 1; n < tail; ++n) out += (1.0 - lambda) * std::pow(lambda, double(n - 1)) * n_step(n);
  out += std::pow(lambda, double(tail - 1)) * n_step(tail);
  return out;
}

// Scalar discounted Riccati for A=B=X=Y=1: p = 1 + gamma p - gamma^2 p^2 / (1 + gamma p).
inline double scalar_riccati(double gamma) {
  double p = 1.0;
  for (int i = 0; i < 100000; ++i) {
    const double next = 1.0 + gamma * p - gamma * gamma * p * p / (1.0 + gamma * p);
    if (std::abs(next - p) < 1e-15) return next;
    p = next;
  }
  return p;
}

// Policy evaluation by brute force for r = -s'Xs - a'Ya and a = K s:
// V(s) = -s'Ps - c, P = sum_t gamma^t (F^t)' (X + K'YK) F^t, F = A + BK,
// c = gamma/(1-gamma) sigma^2 tr(P).
struct LyapunovSeries {
  Mat P;
  double c = 0.0;
};

inline LyapunovSeries lyapunov_series(const Mat& A, const Mat& B, const Mat& X, const Mat& Y,
                                      const Mat& K, double gamma, double sigma, int terms = 20000) {
  const Mat F = A + B * K;
  const Mat cost = X + K.transpose() * Y * K;
  Mat P = Mat::Zero(A.rows(), A.cols());
  Mat Ft = Mat::Identity(A.rows(), A.cols());
  double disc = 1.0;
  for (int t = 0; t < terms && disc > 1e-300; ++t) {
    P += disc * Ft.transpose() * cost * Ft;
    Ft = F * Ft;
    disc *= gamma;
  }
  LyapunovSeries out;
  out.P = P;
  out.c = gamma / (1.0 - gamma) * sigma * sigma * P.trace();
  return out;
}

// Central finite-difference gradient.
inline Vec finite_difference(const std::function<double(const Vec&)>& f, const Vec& x, double h = 1e-6) {
  Vec g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

inline double relative_error(const Vec& a, const Vec& b) {
  const double scale = std::max({a.norm(), b.norm(), 1e-12});
  return (a - b).norm() / scale;
}

// Number of monomials of total degree <= d in n variables, by enumeration.
inline long long count_monomials(int n, int d) {
  long long count = 0;
  std::vector<int> e(static_cast<std::size_t>(n), 0);
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == n) {
      ++count;
      return;
    }
    for (int k = 0; k <= left; ++k) rec(i + 1, left - k);
  };
  rec(0, d);
  return count;
}

// Diagonal Gaussian log-density.
inline double gaussian_log_density(const Vec& x, const Vec& mean, const Mat& cov) {
  const Vec d = x - mean;
  const Eigen::LLT<Mat> llt(cov);
  const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return -0.5 * (d.dot(llt.solve(d)) + logdet + double(x.size()) * std::log(2.0 * M_PI));
}

}  // namespace oracle
