#pragma once

#include <memory>
#include <string>
#include <vector>

#include "tdreg/rng.hpp"
#include "tdreg/types.hpp"

namespace tdreg {

/// Deterministic map x -> phi(x). Immutable after construction.
class FeatureMap {
 public:
  virtual ~FeatureMap() = default;
  virtual int input_dim() const = 0;
  virtual int output_dim() const = 0;
  virtual Vec evaluate(const Vec& x) const = 0;
  /// d phi / d x, output_dim x input_dim.
  virtual Mat jacobian(const Vec& x) const = 0;

  Vec operator()(const Vec& x) const { return evaluate(x); }
};

using FeatureMapPtr = std::shared_ptr<const FeatureMap>;

class IdentityMap final : public FeatureMap {
 public:
  explicit IdentityMap(int dim) : dim_(dim) {}
  int input_dim() const override { return dim_; }
  int output_dim() const override { return dim_; }
  Vec evaluate(const Vec& x) const override;
  Mat jacobian(const Vec& x) const override;

 private:
  int dim_;
};

/// All monomials of total degree <= degree, graded lexicographic order:
/// 1, x1, ..., xn, x1^2, x1 x2, ..., xn^2, x1^3, ...
class PolynomialBasis final : public FeatureMap {
 public:
  PolynomialBasis(int input_dim, int degree);

  int input_dim() const override { return input_dim_; }
  int output_dim() const override { return static_cast<int>(exponents_.size()); }
  int degree() const { return degree_; }
  Vec evaluate(const Vec& x) const override;
  Mat jacobian(const Vec& x) const override;

  const std::vector<std::vector<int>>& exponents() const { return exponents_; }
  /// Index of the monomial with the given exponent vector, or -1.
  int index_of(const std::vector<int>& exponent) const;

 private:
  int input_dim_;
  int degree_;
  std::vector<std::vector<int>> exponents_;
};

/// Features of the concatenation (s, a).
Vec polynomial_features(const PolynomialBasis& basis, const Vec& s, const Vec& a);

/// C(n + d, d).
long long polynomial_feature_count(int input_dim, int degree);

/// Weights w such that phi(x)' w = c + x' H x for symmetric H. Requires a
/// basis of degree >= 2.
Vec quadratic_form_weights(const PolynomialBasis& basis, double c, const Mat& H);

/// sin(W x + phase), W rows ~ N(0, I) / bandwidth.
class FourierBasis final : public FeatureMap {
 public:
  FourierBasis(Mat W, Vec phase, double bandwidth);

  int input_dim() const override { return static_cast<int>(W_.cols()); }
  int output_dim() const override { return static_cast<int>(W_.rows()); }
  Vec evaluate(const Vec& x) const override;
  Mat jacobian(const Vec& x) const override;

  const Mat& projection() const { return W_; }
  const Vec& phase() const { return phase_; }
  double bandwidth() const { return bandwidth_; }

 private:
  Mat W_;
  Vec phase_;
  double bandwidth_;
};

/// Mean Euclidean distance over all pairs, or over `max_pairs` random pairs
/// when there are more pairs than that.
double mean_pairwise_distance(const std::vector<Vec>& samples, Rng& rng,
                              long long max_pairs = 1000000);

FourierBasis make_fourier_basis(int count, double bandwidth, int input_dim, Rng& rng);
FourierBasis make_fourier_basis(int count, const std::vector<Vec>& samples, Rng& rng);

void save_fourier_basis(const FourierBasis& basis, const std::string& path);
FourierBasis load_fourier_basis(const std::string& path);

void save_states(const std::vector<Vec>& states, const std::string& path);
std::vector<Vec> load_states(const std::string& path);

}  // namespace tdreg
