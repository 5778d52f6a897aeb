#pragma once

#include <vector>

#include "tdreg/env.hpp"
#include "tdreg/features.hpp"

namespace tdreg {

enum class CovarianceKind { kScalar, kDiagonal, kFull };

/// Lower bound applied to every standard deviation / Cholesky diagonal entry.
inline constexpr double kCovarianceFloor = 1e-8;

/// pi(a|s) = N(b + K phi(s), Sigma). theta = [vec(K) column-major, b, cov]
/// where cov is sigma (scalar), per-dimension sigmas (diagonal) or the lower
/// triangle of the Cholesky factor L, column-major (full).
class GaussianPolicy final : public Policy {
 public:
  GaussianPolicy(FeatureMapPtr features, int action_dim, CovarianceKind kind, bool use_bias,
                 double init_std);

  int observation_dim() const override { return features_->input_dim(); }
  int action_dim() const override { return action_dim_; }
  int feature_dim() const { return features_->output_dim(); }
  int num_params() const { return static_cast<int>(theta_.size()); }
  int num_mean_params() const { return mean_params_; }
  CovarianceKind covariance_kind() const { return kind_; }
  bool use_bias() const { return use_bias_; }

  const Vec& params() const { return theta_; }
  void set_params(const Vec& theta);
  void set_gain(const Mat& K);
  Mat gain() const;
  Vec bias() const;
  const FeatureMap& feature_map() const { return *features_; }
  const FeatureMapPtr& feature_map_ptr() const { return features_; }

  Vec features(const Vec& obs) const { return features_->evaluate(obs); }
  Vec mean(const Vec& obs) const { return mean_from_features(features(obs)); }
  Vec mean_from_features(const Vec& phi) const;
  /// Lower-triangular factor with the diagonal floor applied.
  Mat cholesky() const;
  Mat covariance() const;

  double log_prob(const Vec& obs, const Vec& a) const {
    return log_prob_from_features(features(obs), a);
  }
  double log_prob_from_features(const Vec& phi, const Vec& a) const;
  /// Log-densities of rows of `actions` given rows of `phi`.
  Vec log_prob_batch(const Mat& phi, const Mat& actions) const;

  /// grad_theta log pi(a|s).
  Vec score(const Vec& obs, const Vec& a) const { return score_from_features(features(obs), a); }
  Vec score_from_features(const Vec& phi, const Vec& a) const;
  /// sum_i w_i grad_theta log pi(a_i|s_i) over rows.
  Vec weighted_score_sum(const Mat& phi, const Mat& actions, const Vec& weights) const;

  ActionSample act(const Vec& obs, Rng& rng, bool explore) const override;

  /// (d mean / d theta)' g at features phi; zero on the covariance block.
  Vec mean_vjp(const Vec& phi, const Vec& g) const;

  /// Fisher information times v, averaged over the rows of `phi`.
  Vec fisher_vector_product(const Mat& phi, const Vec& v) const;
  /// Covariance block of the Fisher matrix (state independent).
  Mat covariance_fisher() const;

 private:
  // d Sigma / d theta_cov for each covariance parameter.
  std::vector<Mat> covariance_derivatives() const;

  FeatureMapPtr features_;
  int action_dim_;
  CovarianceKind kind_;
  bool use_bias_;
  int mean_params_;
  int cov_params_;
  Vec theta_;
};

/// KL(p || q) averaged over the rows of `phi`. Both policies share features.
double mean_kl(const GaussianPolicy& p, const GaussianPolicy& q, const Mat& phi);

/// a = K phi(s), plus N(0, sigma_t^2 I) exploration when acting for the
/// behavior policy. theta = vec(K), column-major.
class DeterministicPolicy final : public Policy {
 public:
  DeterministicPolicy(FeatureMapPtr features, int action_dim, double exploration_std = 0.0);

  int observation_dim() const override { return features_->input_dim(); }
  int action_dim() const override { return action_dim_; }
  int num_params() const { return static_cast<int>(theta_.size()); }

  const Vec& params() const { return theta_; }
  void set_params(const Vec& theta);
  void set_gain(const Mat& K);
  Mat gain() const;
  const FeatureMap& feature_map() const { return *features_; }

  Vec action(const Vec& obs) const;
  /// (d pi / d theta)' g = vec(g phi(s)').
  Vec param_vjp(const Vec& obs, const Vec& g) const;

  double exploration_std() const { return sigma_; }
  void set_exploration_std(double sigma) { sigma_ = sigma; }
  void decay_exploration(double factor) { sigma_ *= factor; }

  ActionSample act(const Vec& obs, Rng& rng, bool explore) const override;

 private:
  FeatureMapPtr features_;
  int action_dim_;
  double sigma_;
  Vec theta_;
};

/// K = -K0' K0 with K0 ~ U[low, high]^{d x d}.
Mat lqr_initial_gain(int dim, Rng& rng, double low = -0.5, double high = -0.1);

/// Density of N(0, sigma^2 I) at `noise`.
double isotropic_gaussian_log_density(const Vec& noise, double sigma);

}  // namespace tdreg
