#include "tdreg/trpo.hpp"

#include <cmath>

namespace tdreg {

TrpoStep trpo_update(GaussianPolicy& policy, const PolicyBatch& batch, double eta,
                     const TrpoSettings& settings) {
  TrpoStep out;
  const GaussianPolicy old = policy;
  const Vec theta = policy.params();
  out.surrogate_before = trpo_surrogate(old, batch, eta);
  out.surrogate_after = out.surrogate_before;

  const Vec g = trpo_gradient(old, batch, eta).total;
  if (!g.allFinite() || g.squaredNorm() == 0.0) return out;
  LinearOperator fvp = [&old, &batch](const Vec& v) {
    return old.fisher_vector_product(batch.phi, v);
  };
  const CgResult cg = conjugate_gradient_solve(damped(fvp, settings.damping), g, settings.cg_iters);
  const double gx = g.dot(cg.x);
  if (!(gx > 0.0) || !std::isfinite(gx)) return out;
  const Vec full = std::sqrt(2.0 * settings.max_kl / gx) * cg.x;

  GaussianPolicy cand = old;
  SurrogateEval eval = [&](const Vec& th) {
    cand.set_params(th);
    return std::make_pair(trpo_surrogate(cand, batch, eta), mean_kl(cand, old, batch.phi));
  };
  const LineSearchResult ls = backtracking_line_search(
      eval, theta, full, out.surrogate_before, settings.max_kl, settings.max_backtracks);
  out.backtracks = ls.backtracks;
  if (!ls.accepted) return out;
  policy.set_params(ls.params);
  out.accepted = true;
  out.kl = ls.kl;
  out.surrogate_after = ls.objective;
  return out;
}

}  // namespace tdreg
