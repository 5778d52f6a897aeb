#include "tdreg/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include "tdreg/types.hpp"

namespace tdreg {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
  return out;
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& v) {
  Int out = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("key '" + key + "': expected true/false, got '" + v + "'");
}

template <typename E>
struct EnumName {
  E value;
  const char* name;
};

const std::vector<EnumName<EnvId>> kEnvNames = {
    {EnvId::kLqr, "lqr"}, {EnvId::kPendulum, "pendulum"}, {EnvId::kDoublePendulum, "double_pendulum"}};
const std::vector<EnumName<AlgorithmId>> kAlgoNames = {
    {AlgorithmId::kReinforce, "reinforce"}, {AlgorithmId::kSpg, "spg"}, {AlgorithmId::kDpg, "dpg"},
    {AlgorithmId::kTd3, "td3"}, {AlgorithmId::kTrpo, "trpo"}, {AlgorithmId::kPpo, "ppo"}};
const std::vector<EnumName<Regularizer>> kRegNames = {
    {Regularizer::kNone, "none"}, {Regularizer::kTdReg, "td-reg"}, {Regularizer::kGaeReg, "gae-reg"}};
const std::vector<EnumName<CriticMode>> kCriticNames = {{CriticMode::kSingle, "single"},
                                                        {CriticMode::kTarget, "target"},
                                                        {CriticMode::kTwin, "twin"},
                                                        {CriticMode::kDouble, "double"}};
const std::vector<EnumName<FeatureKind>> kFeatureNames = {{FeatureKind::kIdentity, "identity"},
                                                          {FeatureKind::kPolynomial, "polynomial"},
                                                          {FeatureKind::kFourier, "fourier"}};

template <typename E>
std::string enum_name(const std::vector<EnumName<E>>& table, E v) {
  for (const auto& e : table)
    if (e.value == v) return e.name;
  throw ConfigError("unnamed enum value");
}

template <typename E>
E enum_parse(const std::vector<EnumName<E>>& table, const std::string& key, const std::string& v) {
  for (const auto& e : table)
    if (v == e.name) return e.value;
  std::string options;
  for (const auto& e : table) options += std::string(options.empty() ? "" : ", ") + e.name;
  throw ConfigError("key '" + key + "': '" + v + "' is not one of " + options);
}

struct Field {
  std::string key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

template <typename T>
Field double_field(const std::string& key, T ExperimentConfig::*section, double T::*member) {
  return {key, [=](const ExperimentConfig& c) { return fmt(c.*section.*member); },
          [=](ExperimentConfig& c, const std::string& v) { c.*section.*member = parse_double(key, v); }};
}

template <typename T>
Field int_field(const std::string& key, T ExperimentConfig::*section, int T::*member) {
  return {key, [=](const ExperimentConfig& c) { return std::to_string(c.*section.*member); },
          [=](ExperimentConfig& c, const std::string& v) { c.*section.*member = parse_int<int>(key, v); }};
}

template <typename T>
Field bool_field(const std::string& key, T ExperimentConfig::*section, bool T::*member) {
  return {key, [=](const ExperimentConfig& c) { return std::string(c.*section.*member ? "true" : "false"); },
          [=](ExperimentConfig& c, const std::string& v) { c.*section.*member = parse_bool(key, v); }};
}

template <typename T>
Field string_field(const std::string& key, T ExperimentConfig::*section, std::string T::*member) {
  return {key, [=](const ExperimentConfig& c) { return c.*section.*member; },
          [=](ExperimentConfig& c, const std::string& v) { c.*section.*member = v; }};
}

template <typename T, typename E>
Field enum_field(const std::string& key, T ExperimentConfig::*section, E T::*member,
                 const std::vector<EnumName<E>>& table) {
  return {key, [=, &table](const ExperimentConfig& c) { return enum_name(table, c.*section.*member); },
          [=, &table](ExperimentConfig& c, const std::string& v) {
            c.*section.*member = enum_parse(table, key, v);
          }};
}

const std::vector<Field>& fields() {
  using C = ExperimentConfig;
  using A = AlgorithmConfig;
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back({"name", [](const C& c) { return c.name; }, [](C& c, const std::string& v) { c.name = v; }});
    f.push_back({"run.trials", [](const C& c) { return std::to_string(c.trials); },
                 [](C& c, const std::string& v) { c.trials = parse_int<int>("run.trials", v); }});
    f.push_back({"run.seed_base", [](const C& c) { return std::to_string(c.seed_base); },
                 [](C& c, const std::string& v) { c.seed_base = parse_int<std::uint64_t>("run.seed_base", v); }});
    f.push_back({"run.budget", [](const C& c) { return std::to_string(c.budget); },
                 [](C& c, const std::string& v) { c.budget = parse_int<int>("run.budget", v); }});
    f.push_back({"run.threads", [](const C& c) { return std::to_string(c.threads); },
                 [](C& c, const std::string& v) { c.threads = parse_int<int>("run.threads", v); }});
    f.push_back({"run.output", [](const C& c) { return c.output; },
                 [](C& c, const std::string& v) { c.output = v; }});
    f.push_back({"features.calibration_states", [](const C& c) { return std::to_string(c.calibration_states); },
                 [](C& c, const std::string& v) {
                   c.calibration_states = parse_int<int>("features.calibration_states", v);
                 }});
    f.push_back({"features.calibration_seed", [](const C& c) { return std::to_string(c.calibration_seed); },
                 [](C& c, const std::string& v) {
                   c.calibration_seed = parse_int<std::uint64_t>("features.calibration_seed", v);
                 }});
    f.push_back({"features.calibration_file", [](const C& c) { return c.calibration_file; },
                 [](C& c, const std::string& v) { c.calibration_file = v; }});

    f.push_back(enum_field("env.id", &C::env, &EnvConfig::id, kEnvNames));
    f.push_back(double_field("env.gamma", &C::env, &EnvConfig::gamma));
    f.push_back(int_field("env.horizon", &C::env, &EnvConfig::horizon));
    f.push_back(double_field("env.transition_noise", &C::env, &EnvConfig::transition_noise));
    f.push_back(bool_field("env.observation_noise", &C::env, &EnvConfig::observation_noise));
    f.push_back(double_field("env.observation_noise_scale", &C::env, &EnvConfig::observation_noise_scale));
    f.push_back(string_field("env.velocity_update", &C::env, &EnvConfig::velocity_update));
    f.push_back(bool_field("env.trig_observation", &C::env, &EnvConfig::trig_observation));

    f.push_back(enum_field("algo.id", &C::algo, &A::id, kAlgoNames));
    f.push_back(enum_field("algo.regularizer", &C::algo, &A::regularizer, kRegNames));
    f.push_back(enum_field("algo.critic", &C::algo, &A::critic, kCriticNames));
    f.push_back(bool_field("algo.retrace", &C::algo, &A::retrace));
    f.push_back(bool_field("algo.importance_weights", &C::algo, &A::importance_weights));
    f.push_back(int_field("algo.delay", &C::algo, &A::delay));
    f.push_back(enum_field("algo.critic_features", &C::algo, &A::critic_features, kFeatureNames));
    f.push_back(int_field("algo.critic_degree", &C::algo, &A::critic_degree));
    f.push_back(enum_field("algo.policy_features", &C::algo, &A::policy_features, kFeatureNames));
    f.push_back(int_field("algo.fourier_count", &C::algo, &A::fourier_count));
    f.push_back(double_field("algo.actor_lr", &C::algo, &A::actor_lr));
    f.push_back(double_field("algo.critic_lr", &C::algo, &A::critic_lr));
    f.push_back(bool_field("algo.target_actor", &C::algo, &A::target_actor));
    f.push_back(double_field("algo.tau_actor", &C::algo, &A::tau_actor));
    f.push_back(double_field("algo.tau_critic", &C::algo, &A::tau_critic));
    f.push_back(int_field("algo.batch_size", &C::algo, &A::batch_size));
    f.push_back(int_field("algo.warmup", &C::algo, &A::warmup));
    f.push_back(double_field("algo.exploration_std", &C::algo, &A::exploration_std));
    f.push_back(double_field("algo.exploration_decay", &C::algo, &A::exploration_decay));
    f.push_back(bool_field("algo.exploration_reset", &C::algo, &A::exploration_reset));
    f.push_back(double_field("algo.target_noise_std", &C::algo, &A::target_noise_std));
    f.push_back(double_field("algo.spg_lr", &C::algo, &A::spg_lr));
    f.push_back(int_field("algo.critic_sweeps", &C::algo, &A::critic_sweeps));
    f.push_back(double_field("algo.critic_tol", &C::algo, &A::critic_tol));
    f.push_back(string_field("algo.covariance", &C::algo, &A::covariance));
    f.push_back(double_field("algo.policy_init_std", &C::algo, &A::policy_init_std));
    f.push_back(bool_field("algo.policy_bias", &C::algo, &A::policy_bias));
    f.push_back(int_field("algo.episodes_per_iter", &C::algo, &A::episodes_per_iter));
    f.push_back(int_field("algo.reuse_iterations", &C::algo, &A::reuse_iterations));
    f.push_back(double_field("algo.lambda", &C::algo, &A::lambda));
    f.push_back(double_field("algo.max_kl", &C::algo, &A::max_kl));
    f.push_back(double_field("algo.damping", &C::algo, &A::damping));
    f.push_back(int_field("algo.cg_iters", &C::algo, &A::cg_iters));
    f.push_back(double_field("algo.clip", &C::algo, &A::clip));
    f.push_back(int_field("algo.epochs", &C::algo, &A::epochs));
    f.push_back(int_field("algo.minibatch", &C::algo, &A::minibatch));
    f.push_back(double_field("algo.ppo_lr", &C::algo, &A::ppo_lr));

    f.push_back(double_field("penalty.eta0", &C::penalty, &PenaltyConfig::eta0));
    f.push_back(double_field("penalty.kappa", &C::penalty, &PenaltyConfig::kappa));

    f.push_back(int_field("eval.every", &C::eval, &EvalConfig::every));
    f.push_back(int_field("eval.episodes", &C::eval, &EvalConfig::episodes));
    f.push_back(int_field("eval.horizon", &C::eval, &EvalConfig::horizon));
    return f;
  }();
  return table;
}

}  // namespace

std::string to_string(EnvId id) { return enum_name(kEnvNames, id); }
std::string to_string(AlgorithmId id) { return enum_name(kAlgoNames, id); }
std::string to_string(Regularizer r) { return enum_name(kRegNames, r); }
std::string to_string(CriticMode m) { return enum_name(kCriticNames, m); }
std::string to_string(FeatureKind k) { return enum_name(kFeatureNames, k); }

void set_config_value(ExperimentConfig& config, const std::string& key, const std::string& value) {
  for (const Field& f : fields()) {
    if (f.key == key) {
      f.set(config, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

std::map<std::string, std::string> config_entries(const ExperimentConfig& config) {
  std::map<std::string, std::string> out;
  for (const Field& f : fields()) out[f.key] = f.get(config);
  return out;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    set_config_value(cfg, key, value);
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& config) {
  std::string out;
  for (const Field& f : fields()) out += f.key + " = " + f.get(config) + "\n";
  return out;
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw ConfigError("run.trials must be at least 1");
  if (budget < 1) throw ConfigError("run.budget must be at least 1");
  if (eval.every < 1) throw ConfigError("eval.every must be at least 1");
  if (eval.episodes < 1 || eval.horizon < 1) throw ConfigError("eval episodes/horizon must be positive");
  if (env.horizon < 1) throw ConfigError("env.horizon must be positive");
  if (!(env.gamma >= 0.0 && env.gamma < 1.0)) throw ConfigError("env.gamma must be in [0, 1)");
  if (env.velocity_update != "plus" && env.velocity_update != "minus")
    throw ConfigError("env.velocity_update must be plus or minus");
  if (penalty.kappa < 0.0) throw ConfigError("penalty.kappa must be non-negative");
  if (penalty.eta0 < 0.0) throw ConfigError("penalty.eta0 must be non-negative");
  if (algo.covariance != "scalar" && algo.covariance != "diagonal" && algo.covariance != "full")
    throw ConfigError("algo.covariance must be scalar, diagonal or full");
  if (!(algo.lambda >= 0.0 && algo.lambda <= 1.0)) throw ConfigError("algo.lambda must be in [0, 1]");
  if (algo.delay < 1) throw ConfigError("algo.delay must be at least 1");
  if (algo.episodes_per_iter < 1) throw ConfigError("algo.episodes_per_iter must be positive");
  if (algo.reuse_iterations < 0) throw ConfigError("algo.reuse_iterations must be non-negative");
  if (!(algo.tau_actor > 0.0 && algo.tau_actor <= 1.0)) throw ConfigError("algo.tau_actor must be in (0, 1]");
  if (!(algo.tau_critic > 0.0 && algo.tau_critic <= 1.0)) throw ConfigError("algo.tau_critic must be in (0, 1]");

  const bool v_critic = algo.id == AlgorithmId::kTrpo || algo.id == AlgorithmId::kPpo;
  if (algo.regularizer == Regularizer::kGaeReg && !v_critic)
    throw ConfigError("gae-reg needs a V-critic algorithm (trpo or ppo)");
  if (algo.retrace && !v_critic) throw ConfigError("retrace needs a V-critic algorithm (trpo or ppo)");
  if (algo.critic == CriticMode::kDouble && !v_critic)
    throw ConfigError("double critics are only defined for trpo and ppo");
  if (algo.critic == CriticMode::kTwin && algo.id != AlgorithmId::kTd3)
    throw ConfigError("twin critics are only defined for td3");
  if (algo.id == AlgorithmId::kTd3 && algo.critic != CriticMode::kTwin)
    throw ConfigError("td3 needs algo.critic = twin");
  if (algo.id == AlgorithmId::kReinforce && algo.regularizer != Regularizer::kNone)
    throw ConfigError("reinforce has no critic to regularize");
  if (algo.critic_features == FeatureKind::kIdentity)
    throw ConfigError("critic features must be polynomial or fourier");
  if (algo.critic_features == FeatureKind::kPolynomial && algo.critic_degree < 1)
    throw ConfigError("algo.critic_degree must be positive");
  const bool lqr = env.id == EnvId::kLqr;
  if (!lqr && (algo.id == AlgorithmId::kDpg || algo.id == AlgorithmId::kTd3))
    throw ConfigError("dpg and td3 are configured for the LQR only");
  if (env.observation_noise && !lqr) throw ConfigError("observation noise is defined for the LQR");
}

}  // namespace tdreg
