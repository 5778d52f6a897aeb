#include "tdreg/policy.hpp"

#include <cmath>
#include <numbers>

namespace tdreg {

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

int covariance_param_count(CovarianceKind kind, int d) {
  switch (kind) {
    case CovarianceKind::kScalar:
      return 1;
    case CovarianceKind::kDiagonal:
      return d;
    case CovarianceKind::kFull:
      return d * (d + 1) / 2;
  }
  return 0;
}

double floored(double x) { return x < kCovarianceFloor ? kCovarianceFloor : x; }

}  // namespace

GaussianPolicy::GaussianPolicy(FeatureMapPtr features, int action_dim, CovarianceKind kind,
                               bool use_bias, double init_std)
    : features_(std::move(features)), action_dim_(action_dim), kind_(kind), use_bias_(use_bias) {
  if (!features_) throw ConfigError("policy needs a feature map");
  if (action_dim < 1) throw ConfigError("action dimension must be positive");
  if (!(init_std > 0.0)) throw ConfigError("initial policy std must be positive");
  mean_params_ = action_dim_ * features_->output_dim() + (use_bias_ ? action_dim_ : 0);
  cov_params_ = covariance_param_count(kind_, action_dim_);
  theta_ = Vec::Zero(mean_params_ + cov_params_);
  const int c0 = mean_params_;
  if (kind_ == CovarianceKind::kFull) {
    int idx = c0;
    for (int j = 0; j < action_dim_; ++j)
      for (int i = j; i < action_dim_; ++i) theta_[idx++] = (i == j) ? init_std : 0.0;
  } else {
    theta_.segment(c0, cov_params_).setConstant(init_std);
  }
}

void GaussianPolicy::set_params(const Vec& theta) {
  if (theta.size() != theta_.size()) throw ConfigError("policy parameter size mismatch");
  theta_ = theta;
}

void GaussianPolicy::set_gain(const Mat& K) {
  if (K.rows() != action_dim_ || K.cols() != feature_dim())
    throw ConfigError("gain shape mismatch");
  theta_.head(action_dim_ * feature_dim()) = Eigen::Map<const Vec>(K.data(), K.size());
}

Mat GaussianPolicy::gain() const {
  return Eigen::Map<const Mat>(theta_.data(), action_dim_, feature_dim());
}

Vec GaussianPolicy::bias() const {
  if (!use_bias_) return Vec::Zero(action_dim_);
  return theta_.segment(action_dim_ * feature_dim(), action_dim_);
}

Vec GaussianPolicy::mean_from_features(const Vec& phi) const {
  Eigen::Map<const Mat> K(theta_.data(), action_dim_, feature_dim());
  Vec mu = K * phi;
  if (use_bias_) mu += theta_.segment(action_dim_ * feature_dim(), action_dim_);
  return mu;
}

Mat GaussianPolicy::cholesky() const {
  const int d = action_dim_;
  const int c0 = mean_params_;
  Mat L = Mat::Zero(d, d);
  switch (kind_) {
    case CovarianceKind::kScalar:
      L.diagonal().setConstant(floored(theta_[c0]));
      break;
    case CovarianceKind::kDiagonal:
      for (int i = 0; i < d; ++i) L(i, i) = floored(theta_[c0 + i]);
      break;
    case CovarianceKind::kFull: {
      int idx = c0;
      for (int j = 0; j < d; ++j)
        for (int i = j; i < d; ++i) L(i, j) = (i == j) ? floored(theta_[idx++]) : theta_[idx++];
      break;
    }
  }
  return L;
}

Mat GaussianPolicy::covariance() const {
  Mat L = cholesky();
  return L * L.transpose();
}

double GaussianPolicy::log_prob_from_features(const Vec& phi, const Vec& a) const {
  Mat L = cholesky();
  Vec z = L.triangularView<Eigen::Lower>().solve(a - mean_from_features(phi));
  return -0.5 * z.squaredNorm() - L.diagonal().array().log().sum() - 0.5 * action_dim_ * kLog2Pi;
}

Vec GaussianPolicy::log_prob_batch(const Mat& phi, const Mat& actions) const {
  Mat L = cholesky();
  Eigen::Map<const Mat> K(theta_.data(), action_dim_, feature_dim());
  Mat Y = actions - phi * K.transpose();
  if (use_bias_) Y.rowwise() -= bias().transpose();
  Mat Z = L.triangularView<Eigen::Lower>().solve(Y.transpose());
  const double c = -L.diagonal().array().log().sum() - 0.5 * action_dim_ * kLog2Pi;
  return (-0.5 * Z.colwise().squaredNorm().transpose()).array() + c;
}

Vec GaussianPolicy::score_from_features(const Vec& phi, const Vec& a) const {
  Mat pm(1, phi.size());
  pm.row(0) = phi.transpose();
  Mat am(1, a.size());
  am.row(0) = a.transpose();
  return weighted_score_sum(pm, am, Vec::Ones(1));
}

Vec GaussianPolicy::weighted_score_sum(const Mat& phi, const Mat& actions, const Vec& w) const {
  const int d = action_dim_;
  const int f = feature_dim();
  const Mat L = cholesky();
  const Mat Sigma = L * L.transpose();
  Eigen::Map<const Mat> K(theta_.data(), d, f);
  Mat Y = actions - phi * K.transpose();
  if (use_bias_) Y.rowwise() -= bias().transpose();
  // Rows of Z are (Sigma^-1 y_i)'.
  Mat Z = Sigma.llt().solve(Y.transpose()).transpose();
  Mat Zw = Z.array().colwise() * w.array();

  Vec g = Vec::Zero(theta_.size());
  Mat gK = Zw.transpose() * phi;
  g.head(d * f) = Eigen::Map<const Vec>(gK.data(), gK.size());
  if (use_bias_) g.segment(d * f, d) = Zw.colwise().sum().transpose();

  const int c0 = mean_params_;
  const double wsum = w.sum();
  switch (kind_) {
    case CovarianceKind::kScalar: {
      const double s = L(0, 0);
      if (theta_[c0] >= kCovarianceFloor) {
        Vec y2 = Y.rowwise().squaredNorm();
        g[c0] = w.dot(y2) / (s * s * s) - wsum * d / s;
      }
      break;
    }
    case CovarianceKind::kDiagonal: {
      for (int j = 0; j < d; ++j) {
        if (theta_[c0 + j] < kCovarianceFloor) continue;
        const double s = L(j, j);
        g[c0 + j] = w.dot(Y.col(j).cwiseAbs2()) / (s * s * s) - wsum / s;
      }
      break;
    }
    case CovarianceKind::kFull: {
      Mat G = (Zw.transpose() * Z) * L;
      for (int i = 0; i < d; ++i) G(i, i) -= wsum / L(i, i);
      int idx = c0;
      for (int j = 0; j < d; ++j) {
        for (int i = j; i < d; ++i) {
          const bool clamped = (i == j) && theta_[idx] < kCovarianceFloor;
          g[idx++] = clamped ? 0.0 : G(i, j);
        }
      }
      break;
    }
  }
  return g;
}

Vec GaussianPolicy::mean_vjp(const Vec& phi, const Vec& g) const {
  Vec out = Vec::Zero(theta_.size());
  const Mat G = g * phi.transpose();
  out.head(G.size()) = Eigen::Map<const Vec>(G.data(), G.size());
  if (use_bias_) out.segment(G.size(), action_dim_) = g;
  return out;
}

ActionSample GaussianPolicy::act(const Vec& obs, Rng& rng, bool explore) const {
  const Vec phi = features(obs);
  ActionSample out;
  out.action = mean_from_features(phi);
  if (explore) out.action += cholesky() * rng.normal_vector(action_dim_);
  out.log_prob = log_prob_from_features(phi, out.action);
  return out;
}

std::vector<Mat> GaussianPolicy::covariance_derivatives() const {
  const int d = action_dim_;
  const int c0 = mean_params_;
  const Mat L = cholesky();
  std::vector<Mat> E;
  E.reserve(cov_params_);
  switch (kind_) {
    case CovarianceKind::kScalar: {
      Mat e = Mat::Zero(d, d);
      if (theta_[c0] >= kCovarianceFloor) e.diagonal().setConstant(2.0 * L(0, 0));
      E.push_back(e);
      break;
    }
    case CovarianceKind::kDiagonal:
      for (int j = 0; j < d; ++j) {
        Mat e = Mat::Zero(d, d);
        if (theta_[c0 + j] >= kCovarianceFloor) e(j, j) = 2.0 * L(j, j);
        E.push_back(e);
      }
      break;
    case CovarianceKind::kFull: {
      int idx = c0;
      for (int l = 0; l < d; ++l) {
        for (int k = l; k < d; ++k) {
          Mat e = Mat::Zero(d, d);
          if (!(k == l && theta_[idx] < kCovarianceFloor)) {
            e.row(k) += L.col(l).transpose();
            e.col(k) += L.col(l);
          }
          ++idx;
          E.push_back(e);
        }
      }
      break;
    }
  }
  return E;
}

Mat GaussianPolicy::covariance_fisher() const {
  const Mat Sigma = covariance();
  const auto llt = Sigma.llt();
  std::vector<Mat> SE;
  for (const Mat& e : covariance_derivatives()) SE.push_back(llt.solve(e));
  Mat F(cov_params_, cov_params_);
  for (int i = 0; i < cov_params_; ++i)
    for (int j = 0; j < cov_params_; ++j) F(i, j) = 0.5 * (SE[i] * SE[j]).trace();
  return F;
}

Vec GaussianPolicy::fisher_vector_product(const Mat& phi, const Vec& v) const {
  if (v.size() != theta_.size()) throw ConfigError("fisher product size mismatch");
  const int d = action_dim_;
  const int f = feature_dim();
  const double n = static_cast<double>(phi.rows());
  const Mat Sigma = covariance();
  Eigen::Map<const Mat> VK(v.data(), d, f);
  Mat M = phi * VK.transpose();
  if (use_bias_) M.rowwise() += v.segment(d * f, d).transpose();
  Mat W = Sigma.llt().solve(M.transpose()).transpose();
  Vec out = Vec::Zero(v.size());
  Mat oK = W.transpose() * phi / n;
  out.head(d * f) = Eigen::Map<const Vec>(oK.data(), oK.size());
  if (use_bias_) out.segment(d * f, d) = W.colwise().sum().transpose() / n;
  out.tail(cov_params_) = covariance_fisher() * v.tail(cov_params_);
  return out;
}

double mean_kl(const GaussianPolicy& p, const GaussianPolicy& q, const Mat& phi) {
  if (p.num_params() != q.num_params() || p.action_dim() != q.action_dim())
    throw ConfigError("KL between incompatible policies");
  const int d = p.action_dim();
  const Mat Lp = p.cholesky();
  const Mat Lq = q.cholesky();
  Mat D = phi * (p.gain() - q.gain()).transpose();
  D.rowwise() += (p.bias() - q.bias()).transpose();
  Mat Zq = Lq.triangularView<Eigen::Lower>().solve(D.transpose());
  const double quad = Zq.colwise().squaredNorm().mean();
  Mat T = Lq.triangularView<Eigen::Lower>().solve(Lp);
  const double trace = T.squaredNorm();
  const double logdet = 2.0 * (Lq.diagonal().array().log().sum() - Lp.diagonal().array().log().sum());
  return 0.5 * (trace + quad - d + logdet);
}

DeterministicPolicy::DeterministicPolicy(FeatureMapPtr features, int action_dim,
                                         double exploration_std)
    : features_(std::move(features)), action_dim_(action_dim), sigma_(exploration_std) {
  if (!features_) throw ConfigError("policy needs a feature map");
  if (action_dim < 1) throw ConfigError("action dimension must be positive");
  theta_ = Vec::Zero(action_dim_ * features_->output_dim());
}

void DeterministicPolicy::set_params(const Vec& theta) {
  if (theta.size() != theta_.size()) throw ConfigError("policy parameter size mismatch");
  theta_ = theta;
}

void DeterministicPolicy::set_gain(const Mat& K) {
  if (K.rows() != action_dim_ || K.cols() != features_->output_dim())
    throw ConfigError("gain shape mismatch");
  theta_ = Eigen::Map<const Vec>(K.data(), K.size());
}

Mat DeterministicPolicy::gain() const {
  return Eigen::Map<const Mat>(theta_.data(), action_dim_, features_->output_dim());
}

Vec DeterministicPolicy::action(const Vec& obs) const {
  Eigen::Map<const Mat> K(theta_.data(), action_dim_, features_->output_dim());
  return K * features_->evaluate(obs);
}

Vec DeterministicPolicy::param_vjp(const Vec& obs, const Vec& g) const {
  Mat G = g * features_->evaluate(obs).transpose();
  return Eigen::Map<const Vec>(G.data(), G.size());
}

ActionSample DeterministicPolicy::act(const Vec& obs, Rng& rng, bool explore) const {
  ActionSample out;
  out.action = action(obs);
  if (explore) {
    Vec noise = rng.normal_vector(action_dim_, 1.0) * sigma_;
    out.action += noise;
    out.log_prob = sigma_ > 0.0 ? isotropic_gaussian_log_density(noise, sigma_) : 0.0;
  }
  return out;
}

Mat lqr_initial_gain(int dim, Rng& rng, double low, double high) {
  Mat K0(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) K0(i, j) = rng.uniform(low, high);
  return -K0.transpose() * K0;
}

double isotropic_gaussian_log_density(const Vec& noise, double sigma) {
  const double n = static_cast<double>(noise.size());
  return -0.5 * noise.squaredNorm() / (sigma * sigma) - n * std::log(sigma) - 0.5 * n * kLog2Pi;
}

}  // namespace tdreg
