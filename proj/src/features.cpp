#include "tdreg/features.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

namespace tdreg {

Vec IdentityMap::evaluate(const Vec& x) const {
  if (x.size() != dim_) throw ConfigError("identity map dimension mismatch");
  return x;
}

Mat IdentityMap::jacobian(const Vec& x) const {
  if (x.size() != dim_) throw ConfigError("identity map dimension mismatch");
  return Mat::Identity(dim_, dim_);
}

namespace {

// Exponent vectors of total degree d in lexicographically decreasing order,
// so x1^2 precedes x1 x2 precedes x2^2.
void enumerate_degree(int n, int remaining, int pos, std::vector<int>& cur,
                      std::vector<std::vector<int>>& out) {
  if (pos == n - 1) {
    cur[pos] = remaining;
    out.push_back(cur);
    cur[pos] = 0;
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    cur[pos] = e;
    enumerate_degree(n, remaining - e, pos + 1, cur, out);
  }
  cur[pos] = 0;
}

}  // namespace

PolynomialBasis::PolynomialBasis(int input_dim, int degree)
    : input_dim_(input_dim), degree_(degree) {
  if (input_dim < 1 || degree < 0) throw ConfigError("invalid polynomial basis shape");
  std::vector<int> cur(input_dim, 0);
  for (int d = 0; d <= degree; ++d) enumerate_degree(input_dim, d, 0, cur, exponents_);
}

int PolynomialBasis::index_of(const std::vector<int>& exponent) const {
  for (std::size_t i = 0; i < exponents_.size(); ++i)
    if (exponents_[i] == exponent) return static_cast<int>(i);
  return -1;
}

Vec PolynomialBasis::evaluate(const Vec& x) const {
  if (x.size() != input_dim_) throw ConfigError("polynomial basis dimension mismatch");
  Mat pw(input_dim_, degree_ + 1);
  for (int i = 0; i < input_dim_; ++i) {
    pw(i, 0) = 1.0;
    for (int e = 1; e <= degree_; ++e) pw(i, e) = pw(i, e - 1) * x[i];
  }
  Vec out(output_dim());
  for (std::size_t k = 0; k < exponents_.size(); ++k) {
    double v = 1.0;
    for (int i = 0; i < input_dim_; ++i) v *= pw(i, exponents_[k][i]);
    out[static_cast<Eigen::Index>(k)] = v;
  }
  return out;
}

Mat PolynomialBasis::jacobian(const Vec& x) const {
  if (x.size() != input_dim_) throw ConfigError("polynomial basis dimension mismatch");
  Mat pw(input_dim_, degree_ + 1);
  for (int i = 0; i < input_dim_; ++i) {
    pw(i, 0) = 1.0;
    for (int e = 1; e <= degree_; ++e) pw(i, e) = pw(i, e - 1) * x[i];
  }
  Mat J = Mat::Zero(output_dim(), input_dim_);
  for (std::size_t k = 0; k < exponents_.size(); ++k) {
    const auto& ex = exponents_[k];
    for (int j = 0; j < input_dim_; ++j) {
      if (ex[j] == 0) continue;
      double v = ex[j] * pw(j, ex[j] - 1);
      for (int i = 0; i < input_dim_; ++i)
        if (i != j) v *= pw(i, ex[i]);
      J(static_cast<Eigen::Index>(k), j) = v;
    }
  }
  return J;
}

Vec polynomial_features(const PolynomialBasis& basis, const Vec& s, const Vec& a) {
  if (s.size() + a.size() != basis.input_dim())
    throw ConfigError("state-action dimension does not match polynomial basis");
  Vec x(s.size() + a.size());
  x << s, a;
  return basis.evaluate(x);
}

long long polynomial_feature_count(int input_dim, int degree) {
  long long c = 1;
  for (int k = 1; k <= degree; ++k) c = c * (input_dim + k) / k;
  return c;
}

Vec quadratic_form_weights(const PolynomialBasis& basis, double c, const Mat& H) {
  const int n = basis.input_dim();
  if (basis.degree() < 2) throw ConfigError("quadratic form needs a degree-2 basis");
  if (H.rows() != n || H.cols() != n) throw ConfigError("quadratic form dimension mismatch");
  Vec w = Vec::Zero(basis.output_dim());
  std::vector<int> e(n, 0);
  w[basis.index_of(e)] = c;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      std::fill(e.begin(), e.end(), 0);
      e[i] += 1;
      e[j] += 1;
      w[basis.index_of(e)] = i == j ? H(i, i) : H(i, j) + H(j, i);
    }
  }
  return w;
}

FourierBasis::FourierBasis(Mat W, Vec phase, double bandwidth)
    : W_(std::move(W)), phase_(std::move(phase)), bandwidth_(bandwidth) {
  if (W_.rows() != phase_.size()) throw ConfigError("fourier projection and phase disagree");
}

Vec FourierBasis::evaluate(const Vec& x) const {
  if (x.size() != W_.cols()) throw ConfigError("fourier basis dimension mismatch");
  return (W_ * x + phase_).array().sin().matrix();
}

Mat FourierBasis::jacobian(const Vec& x) const {
  if (x.size() != W_.cols()) throw ConfigError("fourier basis dimension mismatch");
  Vec c = (W_ * x + phase_).array().cos().matrix();
  return c.asDiagonal() * W_;
}

double mean_pairwise_distance(const std::vector<Vec>& samples, Rng& rng, long long max_pairs) {
  const long long n = static_cast<long long>(samples.size());
  if (n < 2) throw DataError("bandwidth needs at least two samples");
  const long long total = n * (n - 1) / 2;
  double sum = 0.0;
  long long count = 0;
  if (total <= max_pairs) {
    for (long long i = 0; i < n; ++i)
      for (long long j = i + 1; j < n; ++j) sum += (samples[i] - samples[j]).norm();
    count = total;
  } else {
    for (long long k = 0; k < max_pairs; ++k) {
      std::size_t i = rng.index(static_cast<std::size_t>(n));
      std::size_t j = rng.index(static_cast<std::size_t>(n - 1));
      if (j >= i) ++j;
      sum += (samples[i] - samples[j]).norm();
    }
    count = max_pairs;
  }
  return sum / static_cast<double>(count);
}

FourierBasis make_fourier_basis(int count, double bandwidth, int input_dim, Rng& rng) {
  if (count < 1 || input_dim < 1) throw ConfigError("invalid fourier basis shape");
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
    throw DataError("fourier bandwidth must be positive");
  Mat W(count, input_dim);
  for (int i = 0; i < count; ++i)
    for (int j = 0; j < input_dim; ++j) W(i, j) = rng.normal() / bandwidth;
  Vec phase(count);
  for (int i = 0; i < count; ++i) phase[i] = rng.uniform(-std::numbers::pi, std::numbers::pi);
  return FourierBasis(std::move(W), std::move(phase), bandwidth);
}

FourierBasis make_fourier_basis(int count, const std::vector<Vec>& samples, Rng& rng) {
  if (samples.empty()) throw DataError("no calibration states");
  double nu = mean_pairwise_distance(samples, rng);
  if (!(nu > 0.0)) throw DataError("calibration states are identical, bandwidth is zero");
  return make_fourier_basis(count, nu, static_cast<int>(samples.front().size()), rng);
}

namespace {
constexpr const char* kBasisHeader = "tdreg-fourier-basis 1";
constexpr const char* kStatesHeader = "tdreg-states 1";
}  // namespace

void save_fourier_basis(const FourierBasis& basis, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << std::setprecision(17);
  out << kBasisHeader << '\n'
      << basis.output_dim() << ' ' << basis.input_dim() << ' ' << basis.bandwidth() << '\n';
  const Mat& W = basis.projection();
  for (Eigen::Index i = 0; i < W.rows(); ++i) {
    for (Eigen::Index j = 0; j < W.cols(); ++j) out << (j ? " " : "") << W(i, j);
    out << '\n';
  }
  for (Eigen::Index i = 0; i < basis.phase().size(); ++i) out << (i ? " " : "") << basis.phase()[i];
  out << '\n';
  if (!out) throw IoError("failed writing " + path);
}

FourierBasis load_fourier_basis(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  std::string header;
  std::getline(in, header);
  if (header != kBasisHeader) throw DataError("unrecognized basis file " + path);
  int count = 0, dim = 0;
  double nu = 0.0;
  in >> count >> dim >> nu;
  if (!in || count < 1 || dim < 1) throw DataError("corrupt basis file " + path);
  Mat W(count, dim);
  for (int i = 0; i < count; ++i)
    for (int j = 0; j < dim; ++j) in >> W(i, j);
  Vec phase(count);
  for (int i = 0; i < count; ++i) in >> phase[i];
  if (!in) throw DataError("truncated basis file " + path);
  return FourierBasis(std::move(W), std::move(phase), nu);
}

void save_states(const std::vector<Vec>& states, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << std::setprecision(17);
  const long long dim = states.empty() ? 0 : states.front().size();
  out << kStatesHeader << '\n' << states.size() << ' ' << dim << '\n';
  for (const Vec& s : states) {
    if (s.size() != dim) throw DataError("states differ in dimension");
    for (Eigen::Index j = 0; j < s.size(); ++j) out << (j ? " " : "") << s[j];
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path);
}

std::vector<Vec> load_states(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  std::string header;
  std::getline(in, header);
  if (header != kStatesHeader) throw DataError("unrecognized states file " + path);
  std::size_t n = 0;
  long long dim = 0;
  in >> n >> dim;
  if (!in) throw DataError("corrupt states file " + path);
  std::vector<Vec> out(n, Vec(dim));
  for (auto& s : out)
    for (long long j = 0; j < dim; ++j) in >> s[j];
  if (!in) throw DataError("truncated states file " + path);
  return out;
}

}  // namespace tdreg
