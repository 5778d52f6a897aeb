#include "tdreg/optim.hpp"

#include <cmath>

namespace tdreg {

AdamState::AdamState(Eigen::Index n, double alpha_, double beta1_, double beta2_, double eps_)
    : m(Vec::Zero(n)), v(Vec::Zero(n)), alpha(alpha_), beta1(beta1_), beta2(beta2_), eps(eps_) {}

Vec adam_step(AdamState& s, const Vec& params, const Vec& gradient, bool maximize) {
  if (params.size() != gradient.size()) throw ConfigError("adam gradient size mismatch");
  if (s.m.size() != params.size()) {
    s.m = Vec::Zero(params.size());
    s.v = Vec::Zero(params.size());
    s.t = 0;
  }
  if (!gradient.allFinite()) throw NumericalError("non-finite gradient");
  const Vec g = maximize ? Vec(-gradient) : gradient;
  s.t += 1;
  s.m = s.beta1 * s.m + (1.0 - s.beta1) * g;
  s.v = s.beta2 * s.v + (1.0 - s.beta2) * g.cwiseAbs2();
  const double c1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.t));
  const double c2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.t));
  Vec mhat = s.m / c1;
  Vec vhat = s.v / c2;
  return params - (s.alpha * mhat.array() / (vhat.array().sqrt() + s.eps)).matrix();
}

LinearOperator damped(LinearOperator op, double damping) {
  return [op = std::move(op), damping](const Vec& v) { return Vec(op(v) + damping * v); };
}

CgResult conjugate_gradient_solve(const LinearOperator& op, const Vec& rhs, int max_iters,
                                  double tol) {
  // Conjugate residual form: each iterate minimizes ||rhs - op(x)|| over the
  // Krylov space, so the recorded residuals never increase.
  CgResult out;
  out.x = Vec::Zero(rhs.size());
  Vec r = rhs;
  double rnorm = r.norm();
  out.residual_norms.push_back(rnorm);
  if (!std::isfinite(rnorm)) throw NumericalError("non-finite conjugate gradient input");
  if (rnorm <= tol || max_iters < 1) return out;
  Vec Ar = op(r);
  Vec p = r;
  Vec Ap = Ar;
  double rAr = r.dot(Ar);
  for (int k = 0; k < max_iters; ++k) {
    const double ApAp = Ap.squaredNorm();
    if (!std::isfinite(rAr) || !std::isfinite(ApAp)) throw NumericalError("non-finite conjugate gradient step");
    if (rAr <= 0.0 || ApAp <= 0.0) break;
    const double alpha = rAr / ApAp;
    Vec x_new = out.x + alpha * p;
    Vec r_new = r - alpha * Ap;
    const double norm_new = r_new.norm();
    // Guard against round-off once the residual is at machine precision.
    if (norm_new > rnorm) break;
    out.x = std::move(x_new);
    r = std::move(r_new);
    rnorm = norm_new;
    out.iterations = k + 1;
    out.residual_norms.push_back(rnorm);
    if (rnorm <= tol) break;
    Ar = op(r);
    const double rAr_new = r.dot(Ar);
    const double beta = rAr_new / rAr;
    p = r + beta * p;
    Ap = Ar + beta * Ap;
    rAr = rAr_new;
  }
  if (!out.x.allFinite()) throw NumericalError("non-finite conjugate gradient solution");
  return out;
}

LineSearchResult backtracking_line_search(const SurrogateEval& eval, const Vec& theta,
                                          const Vec& full_step, double base_objective,
                                          double max_kl, int max_backtracks) {
  LineSearchResult out;
  out.params = theta;
  out.objective = base_objective;
  if (!full_step.allFinite()) return out;
  double scale = 1.0;
  for (int k = 0; k <= max_backtracks; ++k) {
    Vec cand = theta + scale * full_step;
    auto [obj, kl] = eval(cand);
    if (std::isfinite(obj) && std::isfinite(kl) && obj > base_objective && kl <= max_kl) {
      out.accepted = true;
      out.params = std::move(cand);
      out.backtracks = k;
      out.objective = obj;
      out.kl = kl;
      return out;
    }
    scale *= 0.5;
  }
  out.backtracks = max_backtracks;
  return out;
}

}  // namespace tdreg
