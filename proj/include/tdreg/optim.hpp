#pragma once

#include <functional>
#include <vector>

#include "tdreg/types.hpp"

namespace tdreg {

struct AdamState {
  AdamState() = default;
  AdamState(Eigen::Index n, double alpha, double beta1 = 0.9, double beta2 = 0.999,
            double eps = 1e-8);

  Vec m;
  Vec v;
  long long t = 0;
  double alpha = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Bias-corrected ADAM step. Minimizes unless `maximize`. Throws
/// NumericalError on a non-finite gradient.
Vec adam_step(AdamState& state, const Vec& params, const Vec& gradient, bool maximize = false);

using LinearOperator = std::function<Vec(const Vec&)>;

/// op(v) + damping v.
LinearOperator damped(LinearOperator op, double damping);

struct CgResult {
  Vec x;
  int iterations = 0;
  /// ||rhs - op(x_k)|| for k = 0..iterations.
  std::vector<double> residual_norms;
};

/// Solves op(x) = rhs for symmetric positive definite op (conjugate residual
/// iteration, residual norms non-increasing).
CgResult conjugate_gradient_solve(const LinearOperator& op, const Vec& rhs, int max_iters = 10,
                                  double tol = 1e-10);

struct LineSearchResult {
  bool accepted = false;
  Vec params;
  int backtracks = 0;
  double objective = 0.0;
  double kl = 0.0;
};

/// Returns (surrogate objective, mean KL(new || old)) at a candidate.
using SurrogateEval = std::function<std::pair<double, double>(const Vec&)>;

/// Tries theta + 0.5^k full_step for k = 0..max_backtracks and accepts the
/// first candidate that improves on `base_objective` with KL <= max_kl.
LineSearchResult backtracking_line_search(const SurrogateEval& eval, const Vec& theta,
                                          const Vec& full_step, double base_objective,
                                          double max_kl, int max_backtracks = 10);

}  // namespace tdreg
