#include "tdreg/critic.hpp"

#include <fstream>
#include <iomanip>

namespace tdreg {

LinearCritic::LinearCritic(FeatureMapPtr features, CriticKind kind, int state_dim, int action_dim)
    : features_(std::move(features)), kind_(kind), state_dim_(state_dim), action_dim_(action_dim) {
  if (!features_) throw ConfigError("critic needs a feature map");
  const int expected = kind_ == CriticKind::kQ ? state_dim + action_dim : state_dim;
  if (features_->input_dim() != expected)
    throw ConfigError("critic feature map input dimension mismatch");
  weights = Vec::Zero(features_->output_dim());
  target = weights;
}

Vec LinearCritic::features(const Vec& s) const {
  if (kind_ != CriticKind::kV) throw UsageError("Q-critic evaluated without an action");
  return features_->evaluate(s);
}

Vec LinearCritic::features(const Vec& s, const Vec& a) const {
  if (kind_ != CriticKind::kQ) throw UsageError("V-critic evaluated with an action");
  Vec x(s.size() + a.size());
  x << s, a;
  return features_->evaluate(x);
}

Vec LinearCritic::action_gradient(const Vec& w, const Vec& s, const Vec& a) const {
  if (kind_ != CriticKind::kQ) throw UsageError("action gradient of a V-critic");
  Vec x(s.size() + a.size());
  x << s, a;
  Mat J = features_->jacobian(x);
  return J.rightCols(a.size()).transpose() * w;
}

void LinearCritic::init_uniform(Rng& rng, bool with_twin) {
  weights = rng.uniform_vector(num_weights(), -1.0, 1.0);
  target = weights;
  if (with_twin) enable_twin(rng);
}

void LinearCritic::enable_twin(Rng& rng) {
  Twin t;
  t.weights = rng.uniform_vector(num_weights(), -1.0, 1.0);
  t.target = t.weights;
  twin = std::move(t);
}

double critic_value(const LinearCritic& critic, const Vec& s, const Vec* a) {
  if (critic.kind() == CriticKind::kQ) {
    if (!a) throw UsageError("Q-critic called without an action");
    return critic.value(s, *a);
  }
  if (a) throw UsageError("V-critic called with an action");
  return critic.value(s);
}

Vec soft_update(const Vec& target, const Vec& source, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("soft update tau must be in (0, 1]");
  if (target.size() != source.size()) throw ConfigError("soft update size mismatch");
  if (tau == 1.0) return source;
  return tau * source + (1.0 - tau) * target;
}

namespace {
constexpr const char* kCheckpointHeader = "tdreg-checkpoint 1";
}

void save_checkpoint(const Checkpoint& cp, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << std::setprecision(17) << kCheckpointHeader << '\n'
      << "kind " << cp.kind << '\n'
      << "basis " << cp.basis_ref << '\n'
      << "size " << cp.values.size() << '\n';
  for (Eigen::Index i = 0; i < cp.values.size(); ++i) out << cp.values[i] << '\n';
  if (!out) throw IoError("failed writing " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  std::string line, tag;
  std::getline(in, line);
  if (line != kCheckpointHeader) throw DataError("unrecognized checkpoint " + path);
  Checkpoint cp;
  in >> tag >> cp.kind;
  if (tag != "kind") throw DataError("corrupt checkpoint " + path);
  in >> tag;
  std::getline(in, cp.basis_ref);
  if (tag != "basis") throw DataError("corrupt checkpoint " + path);
  if (!cp.basis_ref.empty() && cp.basis_ref.front() == ' ') cp.basis_ref.erase(0, 1);
  long long n = 0;
  in >> tag >> n;
  if (tag != "size" || n < 0) throw DataError("corrupt checkpoint " + path);
  cp.values.resize(n);
  for (long long i = 0; i < n; ++i) in >> cp.values[i];
  if (!in) throw DataError("truncated checkpoint " + path);
  return cp;
}

}  // namespace tdreg
