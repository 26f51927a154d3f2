#include "sdax/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace sdax {

using nlohmann::json;

Method method_from_string(const std::string& s) {
  if (s == "sdax-metra") return Method::sdax_metra;
  if (s == "sdax-diayn") return Method::sdax_diayn;
  if (s == "task-only") return Method::task_only;
  if (s == "div-only") return Method::div_only;
  if (s == "rnd") return Method::rnd;
  throw ConfigError("unknown method: " + s);
}

std::string to_string(Method m) {
  switch (m) {
    case Method::sdax_metra: return "sdax-metra";
    case Method::sdax_diayn: return "sdax-diayn";
    case Method::task_only: return "task-only";
    case Method::div_only: return "div-only";
    case Method::rnd: return "rnd";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  method_from_string(method);  // throws on bad value
  try {
    task_from_string(task);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (lambda_mode != "adaptive" && lambda_mode != "fixed")
    throw ConfigError("lambda_mode must be adaptive or fixed");
  if (lambda_mode == "fixed" && lambda_fixed < 0.0)
    throw ConfigError("fixed lambda must be >= 0");
  if (iterations < 1 || num_envs < 1 || skill_dim < 1)
    throw ConfigError("iterations, num_envs, skill_dim must be positive");
  if (seeds.empty()) throw ConfigError("at least one seed required");
  if (ppo.horizon < 1 || ppo.epochs < 1 || ppo.minibatches < 1)
    throw ConfigError("invalid ppo settings");
  if (env.noise.position < 0 || env.noise.rotation < 0 ||
      env.noise.lin_vel < 0 || env.noise.ang_vel < 0 ||
      env.noise.obstacle_dist < 0)
    throw ConfigError("noise amplitudes must be >= 0");
}

namespace {

json to_json(const ExperimentConfig& c) {
  json j;
  j["task"] = c.task;
  j["method"] = c.method;
  j["lambda_mode"] = c.lambda_mode;
  j["lambda_fixed"] = c.lambda_fixed;
  j["lambda_init"] = c.lambda_init;
  j["lambda_beta"] = c.lambda_beta;
  j["lambda_min"] = c.lambda_min;
  j["lambda_max"] = c.lambda_max;
  j["seeds"] = c.seeds;
  j["iterations"] = c.iterations;
  j["num_envs"] = c.num_envs;
  j["skill_dim"] = c.skill_dim;
  j["policy_hidden"] = c.policy_hidden;
  j["value_hidden"] = c.value_hidden;
  j["policy_activation"] = c.policy_activation;
  j["ppo"] = {{"clip", c.ppo.clip},
              {"epochs", c.ppo.epochs},
              {"gae_lambda", c.ppo.gae_lambda},
              {"gamma", c.ppo.gamma},
              {"horizon", c.ppo.horizon},
              {"entropy_coef", c.ppo.entropy_coef},
              {"lr", c.ppo.lr},
              {"minibatches", c.ppo.minibatches},
              {"value_coef", c.ppo.value_coef},
              {"per_sample_dot", c.ppo.per_sample_dot}};
  j["metra"] = {{"hidden", c.metra.hidden},
                {"eps", c.metra.eps},
                {"kappa_init", c.metra.kappa_init},
                {"phi_lr", c.metra.phi_lr},
                {"kappa_lr", c.metra.kappa_lr}};
  j["diayn"] = {{"hidden", c.diayn.hidden}, {"lr", c.diayn.lr}};
  j["rnd"] = {{"hidden", c.rnd.hidden},
              {"embed_dim", c.rnd.embed_dim},
              {"lr", c.rnd.lr}};
  j["env"] = {{"obstacle_count", c.env.obstacle_count},
              {"obstacle_size", c.env.obstacle_size},
              {"first_obstacle_x", c.env.first_obstacle_x},
              {"obstacle_spacing", c.env.obstacle_spacing},
              {"bar_length", c.env.bar_length},
              {"vx_target", c.env.vx_target},
              {"dt", c.env.dt},
              {"timeout_steps", c.env.timeout_steps},
              {"h_min", c.env.h_min},
              {"h_max", c.env.h_max},
              {"h_stand", c.env.h_stand},
              {"force_scale", c.env.force_scale},
              {"impulse_scale", c.env.impulse_scale},
              {"posture_rate", c.env.posture_rate},
              {"torque_scale", c.env.torque_scale},
              {"drag", c.env.drag},
              {"ang_damp", c.env.ang_damp},
              {"kick_angle", c.env.kick_angle},
              {"kick_window", c.env.kick_window},
              {"kick_impulse", c.env.kick_impulse},
              {"spawn_jitter", c.env.spawn_jitter},
              {"noise",
               {{"position", c.env.noise.position},
                {"rotation", c.env.noise.rotation},
                {"lin_vel", c.env.noise.lin_vel},
                {"ang_vel", c.env.noise.ang_vel},
                {"obstacle_dist", c.env.noise.obstacle_dist}}}};
  j["checkpoint_every"] = c.checkpoint_every;
  j["metric_window"] = c.metric_window;
  j["outdir"] = c.outdir;
  return j;
}

template <typename T>
void get_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

ExperimentConfig from_json(const json& j) {
  ExperimentConfig c;
  static const std::set<std::string> known = {
      "task",          "method",        "lambda_mode",   "lambda_fixed",
      "lambda_init",   "lambda_beta",   "lambda_min",    "lambda_max",
      "seeds",         "iterations",    "num_envs",      "skill_dim",
      "policy_hidden", "value_hidden",  "policy_activation", "ppo",
      "metra",         "diayn",         "rnd",           "env",
      "checkpoint_every", "metric_window", "outdir"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key()))
      throw ConfigError("unknown config key: " + it.key());
  get_if(j, "task", c.task);
  get_if(j, "method", c.method);
  get_if(j, "lambda_mode", c.lambda_mode);
  get_if(j, "lambda_fixed", c.lambda_fixed);
  get_if(j, "lambda_init", c.lambda_init);
  get_if(j, "lambda_beta", c.lambda_beta);
  get_if(j, "lambda_min", c.lambda_min);
  get_if(j, "lambda_max", c.lambda_max);
  get_if(j, "seeds", c.seeds);
  get_if(j, "iterations", c.iterations);
  get_if(j, "num_envs", c.num_envs);
  get_if(j, "skill_dim", c.skill_dim);
  get_if(j, "policy_hidden", c.policy_hidden);
  get_if(j, "value_hidden", c.value_hidden);
  get_if(j, "policy_activation", c.policy_activation);
  if (j.contains("ppo")) {
    const auto& p = j.at("ppo");
    get_if(p, "clip", c.ppo.clip);
    get_if(p, "epochs", c.ppo.epochs);
    get_if(p, "gae_lambda", c.ppo.gae_lambda);
    get_if(p, "gamma", c.ppo.gamma);
    get_if(p, "horizon", c.ppo.horizon);
    get_if(p, "entropy_coef", c.ppo.entropy_coef);
    get_if(p, "lr", c.ppo.lr);
    get_if(p, "minibatches", c.ppo.minibatches);
    get_if(p, "value_coef", c.ppo.value_coef);
    get_if(p, "per_sample_dot", c.ppo.per_sample_dot);
  }
  if (j.contains("metra")) {
    const auto& m = j.at("metra");
    get_if(m, "hidden", c.metra.hidden);
    get_if(m, "eps", c.metra.eps);
    get_if(m, "kappa_init", c.metra.kappa_init);
    get_if(m, "phi_lr", c.metra.phi_lr);
    get_if(m, "kappa_lr", c.metra.kappa_lr);
  }
  if (j.contains("diayn")) {
    const auto& d = j.at("diayn");
    get_if(d, "hidden", c.diayn.hidden);
    get_if(d, "lr", c.diayn.lr);
  }
  if (j.contains("rnd")) {
    const auto& r = j.at("rnd");
    get_if(r, "hidden", c.rnd.hidden);
    get_if(r, "embed_dim", c.rnd.embed_dim);
    get_if(r, "lr", c.rnd.lr);
  }
  if (j.contains("env")) {
    const auto& e = j.at("env");
    get_if(e, "obstacle_count", c.env.obstacle_count);
    get_if(e, "obstacle_size", c.env.obstacle_size);
    get_if(e, "first_obstacle_x", c.env.first_obstacle_x);
    get_if(e, "obstacle_spacing", c.env.obstacle_spacing);
    get_if(e, "bar_length", c.env.bar_length);
    get_if(e, "vx_target", c.env.vx_target);
    get_if(e, "dt", c.env.dt);
    get_if(e, "timeout_steps", c.env.timeout_steps);
    get_if(e, "h_min", c.env.h_min);
    get_if(e, "h_max", c.env.h_max);
    get_if(e, "h_stand", c.env.h_stand);
    get_if(e, "force_scale", c.env.force_scale);
    get_if(e, "impulse_scale", c.env.impulse_scale);
    get_if(e, "posture_rate", c.env.posture_rate);
    get_if(e, "torque_scale", c.env.torque_scale);
    get_if(e, "drag", c.env.drag);
    get_if(e, "ang_damp", c.env.ang_damp);
    get_if(e, "kick_angle", c.env.kick_angle);
    get_if(e, "kick_window", c.env.kick_window);
    get_if(e, "kick_impulse", c.env.kick_impulse);
    get_if(e, "spawn_jitter", c.env.spawn_jitter);
    if (e.contains("noise")) {
      const auto& n = e.at("noise");
      get_if(n, "position", c.env.noise.position);
      get_if(n, "rotation", c.env.noise.rotation);
      get_if(n, "lin_vel", c.env.noise.lin_vel);
      get_if(n, "ang_vel", c.env.noise.ang_vel);
      get_if(n, "obstacle_dist", c.env.noise.obstacle_dist);
    }
  }
  get_if(j, "checkpoint_every", c.checkpoint_every);
  get_if(j, "metric_window", c.metric_window);
  get_if(j, "outdir", c.outdir);
  c.validate();  // wraps bad task/method names into ConfigError
  c.env.task = c.task_kind();
  c.env.div_include_x = c.method_kind() == Method::div_only;
  return c;
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  try {
    return from_json(j);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config error: ") + e.what());
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json_text(ss.str());
}

void apply_override(ExperimentConfig& cfg, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override must be key=value: " + kv);
  std::string key = kv.substr(0, eq);
  const std::string val = kv.substr(eq + 1);
  json j = json::parse(config_to_json_text(cfg));
  std::string ptr = "/";
  for (char ch : key) ptr += ch == '.' ? '/' : ch;
  json parsed;
  try {
    parsed = json::parse(val);
  } catch (const json::exception&) {
    parsed = val;  // plain string
  }
  try {
    j[json::json_pointer(ptr)] = parsed;
  } catch (const json::exception& e) {
    throw ConfigError("bad override key " + key + ": " + e.what());
  }
  cfg = from_json(j);
}

std::string config_to_json_text(const ExperimentConfig& cfg) {
  return to_json(cfg).dump(2);
}

}  // namespace sdax
