#pragma once
// Experiment configuration: JSON in, fully materialized defaults out.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdax/env.hpp"
#include "sdax/intrinsic.hpp"
#include "sdax/ppo.hpp"

namespace sdax {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Method { sdax_metra, sdax_diayn, task_only, div_only, rnd };

Method method_from_string(const std::string& s);
std::string to_string(Method m);

struct ExperimentConfig {
  std::string task = "crawl";
  std::string method = "sdax-metra";
  std::string lambda_mode = "adaptive";  // "adaptive" | "fixed"
  double lambda_fixed = 1.0;
  double lambda_init = 10.0;
  double lambda_beta = 1e-2;
  double lambda_min = 1e-4;
  double lambda_max = 100.0;
  std::vector<std::uint64_t> seeds = {0};
  int iterations = 3000;
  int num_envs = 64;
  int skill_dim = 1;
  std::vector<int> policy_hidden = {64, 64};
  std::vector<int> value_hidden = {64, 64};
  std::string policy_activation = "elu";
  PpoConfig ppo;
  MetraConfig metra;
  DiaynConfig diayn;
  RndConfig rnd;
  EnvConfig env;
  int checkpoint_every = 500;
  int metric_window = 64;
  std::string outdir = "runs";

  Method method_kind() const { return method_from_string(method); }
  TaskKind task_kind() const { return task_from_string(task); }
  void validate() const;
};

// Parse from a JSON string / file; missing keys keep defaults, unknown
// top-level keys are a config error.
ExperimentConfig config_from_json_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);
// Apply "a.b.c=value" style overrides.
void apply_override(ExperimentConfig& cfg, const std::string& kv);
std::string config_to_json_text(const ExperimentConfig& cfg);

}  // namespace sdax
