#pragma once

#include <optional>
#include <string>

#include "tdreg/features.hpp"
#include "tdreg/rng.hpp"

namespace tdreg {

enum class CriticKind { kQ, kV };

/// Linear critic phi(s, a)' w (Q) or phi(s)' w (V). A Q-critic's feature map
/// takes the concatenation (s, a). Target weights and an optional twin share
/// the feature map.
class LinearCritic {
 public:
  LinearCritic(FeatureMapPtr features, CriticKind kind, int state_dim, int action_dim = 0);

  CriticKind kind() const { return kind_; }
  int state_dim() const { return state_dim_; }
  int action_dim() const { return action_dim_; }
  int num_weights() const { return features_->output_dim(); }
  const FeatureMap& feature_map() const { return *features_; }

  Vec features(const Vec& s) const;
  Vec features(const Vec& s, const Vec& a) const;

  double value(const Vec& s) const { return features(s).dot(weights); }
  double value(const Vec& s, const Vec& a) const { return features(s, a).dot(weights); }
  double value_with(const Vec& w, const Vec& s, const Vec& a) const {
    return features(s, a).dot(w);
  }
  double value_with(const Vec& w, const Vec& s) const { return features(s).dot(w); }
  /// grad_a of phi(s, a)' w.
  Vec action_gradient(const Vec& w, const Vec& s, const Vec& a) const;

  /// weights ~ U[-1, 1], target = weights. Twin weights drawn afterwards.
  void init_uniform(Rng& rng, bool with_twin = false);
  void enable_twin(Rng& rng);
  bool has_twin() const { return twin.has_value(); }

  Vec weights;
  Vec target;
  struct Twin {
    Vec weights;
    Vec target;
  };
  std::optional<Twin> twin;

 private:
  FeatureMapPtr features_;
  CriticKind kind_;
  int state_dim_;
  int action_dim_;
};

/// phi' w for a V-critic (no action) or Q-critic (action given).
double critic_value(const LinearCritic& critic, const Vec& s, const Vec* a = nullptr);

/// tau * source + (1 - tau) * target, tau in (0, 1].
Vec soft_update(const Vec& target, const Vec& source, double tau);

/// Versioned flat-vector checkpoint with a free-form basis reference.
struct Checkpoint {
  std::string kind;
  std::string basis_ref;
  Vec values;
};

void save_checkpoint(const Checkpoint& cp, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace tdreg
