#pragma once

#include "tdreg/gradients.hpp"
#include "tdreg/optim.hpp"

namespace tdreg {

struct TrpoSettings {
  double max_kl = 0.01;
  double damping = 0.1;
  int cg_iters = 10;
  int max_backtracks = 10;
};

struct TrpoStep {
  bool accepted = false;
  double kl = 0.0;
  int backtracks = 0;
  double surrogate_before = 0.0;
  double surrogate_after = 0.0;
};

/// Natural-gradient step on mean rho (A - eta penalty) with a KL line search.
/// Leaves the policy unchanged when no candidate is accepted.
TrpoStep trpo_update(GaussianPolicy& policy, const PolicyBatch& batch, double eta,
                     const TrpoSettings& settings = {});

}  // namespace tdreg
