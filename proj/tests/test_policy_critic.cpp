#include <filesystem>

#include "doctest.h"
#include "oracles.hpp"
#include "tdreg/critic.hpp"
#include "tdreg/lqr.hpp"
#include "tdreg/policy.hpp"

using namespace tdreg;

namespace {

const CovarianceKind kKinds[] = {CovarianceKind::kScalar, CovarianceKind::kDiagonal, CovarianceKind::kFull};

GaussianPolicy random_policy(Rng& rng, CovarianceKind kind, int obs_dim, int act_dim, bool bias) {
  GaussianPolicy p(std::make_shared<PolynomialBasis>(obs_dim, 2), act_dim, kind, bias, 1.0);
  Vec theta = rng.uniform_vector(p.num_params(), -1, 1);
  // Keep the scale entries away from zero so the density is smooth.
  for (int i = p.num_mean_params(); i < p.num_params(); ++i) theta[i] = rng.uniform(0.5, 2.0) * (rng.uniform() < 0.5 ? -1 : 1);
  if (kind == CovarianceKind::kFull) {
    int idx = p.num_mean_params();
    for (int j = 0; j < act_dim; ++j)
      for (int i = j; i < act_dim; ++i, ++idx) theta[idx] = i == j ? rng.uniform(0.5, 2.0) : rng.uniform(-1, 1);
  } else {
    for (int i = p.num_mean_params(); i < p.num_params(); ++i) theta[i] = std::abs(theta[i]);
  }
  p.set_params(theta);
  return p;
}

}  // namespace

TEST_CASE("log density matches the Gaussian formula") {
  Rng rng(1);
  for (auto kind : kKinds) {
    for (int i = 0; i < 20; ++i) {
      GaussianPolicy p = random_policy(rng, kind, 2, 3, true);
      Vec s = rng.uniform_vector(2, -2, 2), a = rng.uniform_vector(3, -3, 3);
      CHECK(p.log_prob(s, a) == doctest::Approx(oracle::gaussian_log_density(a, p.mean(s), p.covariance())).epsilon(1e-12));
    }
  }
}

TEST_CASE("scalar density integrates to one") {
  GaussianPolicy p(std::make_shared<IdentityMap>(1), 1, CovarianceKind::kScalar, true, 0.7);
  Vec theta = p.params();
  theta[0] = 0.4;
  theta[1] = -0.3;
  p.set_params(theta);
  const Vec s = Vec::Constant(1, 1.5);
  double total = 0.0;
  const double h = 1e-3;
  for (double x = -10; x < 10; x += h) total += std::exp(p.log_prob(s, Vec::Constant(1, x + h / 2))) * h;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("score matches finite differences for every covariance kind") {
  Rng rng(2);
  for (auto kind : kKinds) {
    for (int i = 0; i < 100; ++i) {
      GaussianPolicy p = random_policy(rng, kind, 2, 2, i % 2 == 0);
      Vec s = rng.uniform_vector(2, -2, 2);
      Vec a = p.mean(s) + rng.normal_vector(2, 1.0);
      auto f = [&](const Vec& th) {
        GaussianPolicy q = p;
        q.set_params(th);
        return q.log_prob(s, a);
      };
      const Vec fd = oracle::finite_difference(f, p.params(), 1e-6);
      CHECK(oracle::relative_error(p.score(s, a), fd) < 1e-5);
    }
  }
}

TEST_CASE("score special cases") {
  Rng rng(3);
  GaussianPolicy p = random_policy(rng, CovarianceKind::kScalar, 2, 3, true);
  Vec s = rng.uniform_vector(2, -1, 1);
  Vec g = p.score(s, p.mean(s));
  CHECK(g.head(p.num_mean_params()).cwiseAbs().maxCoeff() < 1e-12);
  const double sigma = p.params()[p.num_mean_params()];
  CHECK(g[p.num_mean_params()] == doctest::Approx(-3.0 / sigma).epsilon(1e-12));
}

TEST_CASE("weighted score sum and batch log densities") {
  Rng rng(4);
  GaussianPolicy p = random_policy(rng, CovarianceKind::kFull, 2, 2, true);
  Mat phi(5, p.feature_dim()), act(5, 2);
  Vec w = rng.uniform_vector(5, -1, 1);
  Vec sum = Vec::Zero(p.num_params());
  Vec lp(5);
  for (int i = 0; i < 5; ++i) {
    Vec s = rng.uniform_vector(2, -1, 1), a = rng.uniform_vector(2, -1, 1);
    phi.row(i) = p.features(s).transpose();
    act.row(i) = a.transpose();
    sum += w[i] * p.score(s, a);
    lp[i] = p.log_prob(s, a);
  }
  CHECK(oracle::relative_error(p.weighted_score_sum(phi, act, w), sum) < 1e-12);
  CHECK(oracle::relative_error(p.log_prob_batch(phi, act), lp) < 1e-14);
}

TEST_CASE("Fisher vector product") {
  Rng rng(5);
  for (auto kind : kKinds) {
    GaussianPolicy p = random_policy(rng, kind, 2, 2, true);
    Mat phi(8, p.feature_dim());
    for (int i = 0; i < 8; ++i) phi.row(i) = p.features(rng.uniform_vector(2, -1, 1)).transpose();
    for (int k = 0; k < 10; ++k) {
      Vec u = rng.normal_vector(p.num_params()), v = rng.normal_vector(p.num_params());
      CHECK(std::abs(v.dot(p.fisher_vector_product(phi, u)) - u.dot(p.fisher_vector_product(phi, v))) < 1e-8);
      CHECK(v.dot(p.fisher_vector_product(phi, v)) > 0.0);
      // Curvature of the KL: KL(p || p + eps v) ~ eps^2 / 2 v'Fv.
      const double eps = 1e-4;
      GaussianPolicy q = p;
      q.set_params(p.params() + eps * v);
      const double kl = mean_kl(p, q, phi);
      CHECK(2.0 * kl / (eps * eps) == doctest::Approx(v.dot(p.fisher_vector_product(phi, v))).epsilon(1e-3));
    }
  }
}

TEST_CASE("KL divergence") {
  Rng rng(6);
  GaussianPolicy p = random_policy(rng, CovarianceKind::kFull, 2, 2, true);
  GaussianPolicy q = random_policy(rng, CovarianceKind::kFull, 2, 2, true);
  Mat phi(3, p.feature_dim());
  double expected = 0.0;
  for (int i = 0; i < 3; ++i) {
    Vec s = rng.uniform_vector(2, -1, 1);
    phi.row(i) = p.features(s).transpose();
    const Mat S0 = p.covariance(), S1 = q.covariance();
    const Vec dm = q.mean(s) - p.mean(s);
    const Mat S1inv = S1.inverse();
    expected += 0.5 * ((S1inv * S0).trace() + dm.dot(S1inv * dm) - 2.0 + std::log(S1.determinant() / S0.determinant()));
  }
  CHECK(mean_kl(p, q, phi) == doctest::Approx(expected / 3.0).epsilon(1e-10));
  CHECK(mean_kl(p, p, phi) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
}

TEST_CASE("covariance stays positive definite") {
  Rng rng(7);
  GaussianPolicy p(std::make_shared<IdentityMap>(2), 3, CovarianceKind::kFull, false, 1.0);
  for (int i = 0; i < 200; ++i) {
    Vec theta = p.params() + 0.5 * rng.normal_vector(p.num_params());
    p.set_params(theta);
    const Mat S = p.covariance();
    CHECK((S - S.transpose()).norm() < 1e-12 * S.norm());
    CHECK(p.cholesky().diagonal().minCoeff() >= kCovarianceFloor);
    Eigen::SelfAdjointEigenSolver<Mat> es(S);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("vanishing covariance acts at the mean") {
  Rng rng(8);
  GaussianPolicy p = random_policy(rng, CovarianceKind::kDiagonal, 2, 2, true);
  Vec theta = p.params();
  theta.tail(2).setZero();
  p.set_params(theta);
  Vec s = rng.uniform_vector(2, -1, 1);
  Vec expected = p.bias() + p.gain() * p.features(s);
  CHECK((p.act(s, rng, true).action - expected).norm() < 1e-7);
  CHECK(p.act(s, rng, false).action == p.mean(s));
}

TEST_CASE("mean vjp matches the mean jacobian") {
  Rng rng(9);
  GaussianPolicy p = random_policy(rng, CovarianceKind::kFull, 2, 2, true);
  Vec s = rng.uniform_vector(2, -1, 1), g = rng.normal_vector(2);
  auto f = [&](const Vec& th) {
    GaussianPolicy q = p;
    q.set_params(th);
    return q.mean(s).dot(g);
  };
  CHECK(oracle::relative_error(p.mean_vjp(p.features(s), g), oracle::finite_difference(f, p.params())) < 1e-7);
}

TEST_CASE("pendulum policy parameter counts") {
  Rng rng(10);
  auto single = std::make_shared<FourierBasis>(make_fourier_basis(100, 1.0, 2, rng));
  auto dbl = std::make_shared<FourierBasis>(make_fourier_basis(300, 1.0, 6, rng));
  CHECK(GaussianPolicy(single, 1, CovarianceKind::kDiagonal, true, 1.0).num_params() == 102);
  CHECK(GaussianPolicy(dbl, 2, CovarianceKind::kFull, true, 1.0).num_params() == 605);
}

TEST_CASE("deterministic policy") {
  DeterministicPolicy p(std::make_shared<IdentityMap>(2), 2, 5.0);
  p.set_gain(-Mat::Identity(2, 2));
  Vec s(2);
  s << 2, 1;
  Rng rng(0);
  Vec want(2);
  want << -2, -1;
  CHECK(p.act(s, rng, false).action == want);
  for (int i = 0; i < 10; ++i) p.decay_exploration(0.95);
  CHECK(p.exploration_std() == doctest::Approx(2.99).epsilon(1e-3));
  CHECK(p.exploration_std() == doctest::Approx(5.0 * std::pow(0.95, 10)).epsilon(1e-14));

  DeterministicPolicy cubic(std::make_shared<PolynomialBasis>(2, 3), 2);
  cubic.set_params(rng.normal_vector(cubic.num_params()));
  Vec x = rng.uniform_vector(2, -1, 1), g = rng.normal_vector(2);
  auto f = [&](const Vec& th) {
    DeterministicPolicy q = cubic;
    q.set_params(th);
    return q.action(x).dot(g);
  };
  CHECK(oracle::relative_error(cubic.param_vjp(x, g), oracle::finite_difference(f, cubic.params())) < 1e-7);
}

TEST_CASE("exploration noise density") {
  Vec n(2);
  n << 0.3, -1.2;
  CHECK(isotropic_gaussian_log_density(n, 2.0) ==
        doctest::Approx(oracle::gaussian_log_density(n, Vec::Zero(2), 4.0 * Mat::Identity(2, 2))).epsilon(1e-12));
}

TEST_CASE("linear critic") {
  auto basis = std::make_shared<PolynomialBasis>(4, 2);
  LinearCritic critic(basis, CriticKind::kQ, 2, 2);
  Rng rng(11);
  critic.weights = Vec::Zero(critic.num_weights());
  Vec s = rng.uniform_vector(2, -3, 3), a = rng.uniform_vector(2, -3, 3);
  CHECK(critic.value(s, a) == 0.0);
  critic.weights = rng.uniform_vector(critic.num_weights(), -1, 1);
  const double v = critic.value(s, a);
  critic.weights *= 2.0;
  CHECK(critic.value(s, a) == doctest::Approx(2.0 * v).epsilon(1e-14));
  CHECK_THROWS_AS(critic_value(critic, s), UsageError);

  auto f = [&](const Vec& x) { return critic.value(s, x); };
  CHECK(oracle::relative_error(critic.action_gradient(critic.weights, s, a), oracle::finite_difference(f, a)) < 1e-7);
}

TEST_CASE("true LQR Q is representable by the quadratic critic") {
  LqrSpec spec;
  Mat K(2, 2);
  K << -0.7, 0.2, 0.1, -0.4;
  const auto q = lqr_true_q(spec, K);
  auto basis = std::make_shared<PolynomialBasis>(4, 2);
  Mat H(4, 4);
  H << q.ss, 0.5 * q.sa, 0.5 * q.sa.transpose(), q.aa;
  LinearCritic critic(basis, CriticKind::kQ, 2, 2);
  critic.weights = quadratic_form_weights(*basis, q.q0, H);
  Rng rng(12);
  for (int i = 0; i < 100; ++i) {
    Vec s = rng.uniform_vector(2, -10, 10), a = rng.uniform_vector(2, -10, 10);
    CHECK(std::abs(critic.value(s, a) - q.value(s, a)) < 1e-8);
  }
}

TEST_CASE("critic initialization and twins") {
  auto basis = std::make_shared<PolynomialBasis>(4, 3);
  LinearCritic critic(basis, CriticKind::kQ, 2, 2);
  Rng rng(13);
  critic.init_uniform(rng, true);
  REQUIRE(critic.has_twin());
  CHECK(critic.weights.cwiseAbs().maxCoeff() <= 1.0);
  CHECK(critic.twin->weights.cwiseAbs().maxCoeff() <= 1.0);
  CHECK(critic.target == critic.weights);
  CHECK(critic.twin->weights != critic.weights);
  CHECK(critic.twin->weights.size() == critic.weights.size());
}

TEST_CASE("soft update") {
  Vec w = Vec::Ones(3), t = Vec::Zero(3);
  CHECK(soft_update(t, w, 1.0) == w);
  CHECK(soft_update(t, w, 0.01)[0] == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(soft_update(w, w, 0.3) == w);
  CHECK_THROWS_AS(soft_update(t, w, 0.0), ConfigError);
}

TEST_CASE("checkpoint round trip") {
  Checkpoint cp{"policy", "fourier:basis.txt", Vec::LinSpaced(7, -1.0 / 3.0, 2.0)};
  const auto path = (std::filesystem::temp_directory_path() / "tdreg_cp_test.txt").string();
  save_checkpoint(cp, path);
  Checkpoint back = load_checkpoint(path);
  CHECK(back.kind == cp.kind);
  CHECK(back.basis_ref == cp.basis_ref);
  CHECK(back.values == cp.values);
  std::filesystem::remove(path);
}
