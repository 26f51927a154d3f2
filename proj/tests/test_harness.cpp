#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "sdax/config.hpp"
#include "sdax/evaluate.hpp"
#include "sdax/plot.hpp"
#include "sdax/trainer.hpp"

using namespace sdax;
namespace fs = std::filesystem;

namespace {

ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.iterations = 3;
  cfg.num_envs = 2;
  cfg.skill_dim = 1;
  cfg.policy_hidden = {8};
  cfg.value_hidden = {8};
  cfg.metra.hidden = {8};
  cfg.diayn.hidden = {8};
  cfg.rnd.hidden = {8};
  cfg.ppo.horizon = 8;
  cfg.ppo.epochs = 2;
  cfg.ppo.minibatches = 2;
  cfg.env.task = TaskKind::crawl;
  return cfg;
}

fs::path fresh_dir(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("sdax_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const int st = std::system((std::string(SDAX_CLI_PATH) + " " + args +
                              " >/dev/null 2>&1")
                                 .c_str());
  return WEXITSTATUS(st);
}

}  // namespace

TEST_CASE("training is bitwise reproducible for a fixed seed") {
  ExperimentConfig cfg = tiny_config();
  Trainer a(cfg, 7), b(cfg, 7);
  for (int i = 0; i < 3; ++i) {
    a.train_iteration();
    b.train_iteration();
  }
  REQUIRE(a.theta().size() == b.theta().size());
  for (std::size_t i = 0; i < a.theta().size(); ++i)
    CHECK(a.theta()[i] == b.theta()[i]);
  CHECK(Trainer::metrics_row(a.stats()) == Trainer::metrics_row(b.stats()));
  CHECK(a.lambda_state().lambda == b.lambda_state().lambda);
}

TEST_CASE("different seeds give different parameters") {
  ExperimentConfig cfg = tiny_config();
  Trainer a(cfg, 1), b(cfg, 2);
  a.train_iteration();
  b.train_iteration();
  bool any_diff = false;
  for (std::size_t i = 0; i < a.theta().size(); ++i)
    any_diff = any_diff || a.theta()[i] != b.theta()[i];
  CHECK(any_diff);
}

TEST_CASE("task-only equals the discovery method pinned at lambda zero") {
  ExperimentConfig base = tiny_config();
  base.method = "task-only";
  ExperimentConfig pinned = tiny_config();
  pinned.method = "sdax-metra";
  pinned.lambda_mode = "fixed";
  pinned.lambda_fixed = 0.0;

  Trainer a(base, 11), b(pinned, 11);
  for (int i = 0; i < 3; ++i) {
    a.train_iteration();
    b.train_iteration();
  }
  for (std::size_t i = 0; i < a.theta().size(); ++i)
    CHECK(a.theta()[i] == b.theta()[i]);
  CHECK(a.lambda_state().lambda == 0.0);
  CHECK(b.lambda_state().lambda == 0.0);
}

TEST_CASE("lambda mode resolution per method") {
  ExperimentConfig cfg = tiny_config();
  Trainer adaptive(cfg, 1);
  CHECK(adaptive.lambda_state().lambda == cfg.lambda_init);
  CHECK_FALSE(adaptive.lambda_state().fixed);

  cfg.method = "task-only";
  Trainer task(cfg, 1);
  CHECK(task.lambda_state().lambda == 0.0);
  CHECK(task.lambda_state().fixed);
  CHECK(task.intrinsic() == nullptr);

  cfg.method = "div-only";
  cfg.lambda_fixed = 2.5;
  Trainer div(cfg, 1);
  CHECK(div.lambda_state().lambda == 2.5);
  CHECK(div.lambda_state().fixed);

  cfg.method = "sdax-metra";
  cfg.lambda_mode = "fixed";
  cfg.lambda_fixed = 0.1;
  Trainer fixed(cfg, 1);
  CHECK(fixed.lambda_state().lambda == 0.1);
  CHECK(fixed.lambda_state().fixed);
}

TEST_CASE("adaptive lambda moves after an update") {
  ExperimentConfig cfg = tiny_config();
  cfg.iterations = 5;
  Trainer t(cfg, 3);
  for (int i = 0; i < 5; ++i) t.train_iteration();
  CHECK(t.lambda_state().lambda != cfg.lambda_init);
  CHECK(t.stats().meta_grad == t.lambda_state().last_grad);
}

TEST_CASE("checkpoints round-trip bitwise and reproduce rollouts") {
  fs::path dir = fresh_dir("ckpt");
  ExperimentConfig cfg = tiny_config();
  Trainer t(cfg, 5);
  for (int i = 0; i < 2; ++i) t.train_iteration();
  Checkpoint ck = t.make_checkpoint();
  const std::string path = (dir / "ck.json").string();
  save_checkpoint(ck, path);
  Checkpoint back = load_checkpoint(path);

  CHECK(back.iteration == ck.iteration);
  CHECK(back.seed == ck.seed);
  CHECK(back.kappa == ck.kappa);
  CHECK(back.lambda.lambda == ck.lambda.lambda);
  REQUIRE(back.theta.size() == ck.theta.size());
  for (std::size_t i = 0; i < ck.theta.size(); ++i)
    CHECK(back.theta[i] == ck.theta[i]);
  REQUIRE(back.phi.size() == ck.phi.size());
  for (std::size_t i = 0; i < ck.phi.size(); ++i)
    CHECK(back.phi[i] == ck.phi[i]);

  const std::string csv1 = (dir / "t1.csv").string();
  const std::string csv2 = (dir / "t2.csv").string();
  Vec z = {0.7};
  auto s1 = evaluate_rollout(ck, z, csv1);
  auto s2 = evaluate_rollout(back, z, csv2);
  CHECK(s1.obstacles_passed == s2.obstacles_passed);
  CHECK(s1.steps == s2.steps);
  CHECK(s1.episode_return_task == s2.episode_return_task);
  CHECK(slurp(csv1) == slurp(csv2));
}

TEST_CASE("deterministic rollouts ignore configured noise and jitter") {
  ExperimentConfig cfg = tiny_config();
  cfg.env.noise.position = 0.1;
  cfg.env.spawn_jitter = 0.3;
  Trainer t(cfg, 6);
  t.train_iteration();
  Checkpoint ck = t.make_checkpoint();
  Vec z = {0.0};
  auto s1 = evaluate_rollout(ck, z);
  auto s2 = evaluate_rollout(ck, z);
  CHECK(s1.steps == s2.steps);
  CHECK(s1.episode_return_task == s2.episode_return_task);
}

TEST_CASE("success-ratio evaluation is deterministic and well-formed") {
  ExperimentConfig cfg = tiny_config();
  Trainer t(cfg, 8);
  t.train_iteration();
  Checkpoint ck = t.make_checkpoint();
  auto r1 = evaluate_positive_collapse(ck, 10, 3, 99);
  auto r2 = evaluate_positive_collapse(ck, 10, 3, 99);
  CHECK(r1.mean == r2.mean);
  CHECK(r1.stddev == r2.stddev);
  REQUIRE(r1.per_repeat.size() == 3);
  for (double p : r1.per_repeat) {
    CHECK(p >= 0.0);
    CHECK(p <= 100.0);
  }
}

TEST_CASE("run writes a parseable metrics file and checkpoints") {
  fs::path dir = fresh_dir("run");
  ExperimentConfig cfg = tiny_config();
  cfg.checkpoint_every = 2;
  Trainer t(cfg, 9);
  const std::string metrics = (dir / "m.csv").string();
  t.run(metrics, (dir / "ck").string());
  auto cols = parse_metrics_csv(metrics);
  REQUIRE(cols.count("iteration"));
  REQUIRE(cols.count("lambda"));
  REQUIRE(cols.at("iteration").size() == 3);
  CHECK(cols.at("iteration")[0] == 1.0);
  CHECK(cols.at("iteration")[2] == 3.0);
  CHECK(fs::exists(dir / "ck" / "ckpt_2.json"));
  CHECK(fs::exists(dir / "ck" / "ckpt_3.json"));
}

TEST_CASE("early-stop callback halts the run") {
  ExperimentConfig cfg = tiny_config();
  cfg.iterations = 50;
  Trainer t(cfg, 10);
  t.run("", "", [](const IterStats& s) { return s.iteration < 2; });
  CHECK(t.iteration() == 2);
}

TEST_CASE("config errors: unknown keys, bad values") {
  CHECK_THROWS_AS(config_from_json_text("{\"nope\": 1}"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text("{\"method\": \"magic\"}"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text("{\"task\": \"swim\"}"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text("{\"iterations\": 0}"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text("{\"lambda_mode\": \"maybe\"}"),
                  ConfigError);
  CHECK_THROWS_AS(config_from_json_text("not json"), ConfigError);
}

TEST_CASE("config json round-trips and wires the env task") {
  ExperimentConfig cfg = config_from_json_text(
      "{\"task\": \"leap\", \"method\": \"div-only\", \"skill_dim\": 2}");
  CHECK(cfg.env.task == TaskKind::leap);
  CHECK(cfg.env.div_include_x);  // div-only appends x to the features
  ExperimentConfig back = config_from_json_text(config_to_json_text(cfg));
  CHECK(config_to_json_text(back) == config_to_json_text(cfg));
}

TEST_CASE("dotted overrides reach nested fields") {
  ExperimentConfig cfg = tiny_config();
  apply_override(cfg, "ppo.lr=0.001");
  CHECK(cfg.ppo.lr == 0.001);
  apply_override(cfg, "env.obstacle_count=5");
  CHECK(cfg.env.obstacle_count == 5);
  apply_override(cfg, "task=climb");
  CHECK(cfg.env.task == TaskKind::climb);
  apply_override(cfg, "seeds=[3,4]");
  REQUIRE(cfg.seeds.size() == 2);
  CHECK(cfg.seeds[1] == 4);
  CHECK_THROWS_AS(apply_override(cfg, "no_equals_sign"), ConfigError);
  CHECK_THROWS_AS(apply_override(cfg, "iterations=0"), ConfigError);
}

TEST_CASE("cli: inspect, train, eval, collapse, plot, and exit codes") {
  fs::path dir = fresh_dir("cli");
  const std::string cfg_path = (dir / "cfg.json").string();
  {
    std::ofstream out(cfg_path);
    out << "{\"iterations\": 2, \"num_envs\": 2, \"seeds\": [1],\n"
        << " \"policy_hidden\": [8], \"value_hidden\": [8],\n"
        << " \"metra\": {\"hidden\": [8]}, \"checkpoint_every\": 2,\n"
        << " \"ppo\": {\"horizon\": 8, \"epochs\": 2, \"minibatches\": 2},\n"
        << " \"outdir\": \"" << (dir / "runs").string() << "\"}\n";
  }
  CHECK(run_cli("inspect-config -c " + cfg_path) == 0);
  CHECK(run_cli("inspect-config -c " + (dir / "absent.json").string()) == 2);
  CHECK(run_cli("inspect-config -c " + cfg_path + " --set method=magic") == 2);

  CHECK(run_cli("train -q -c " + cfg_path) == 0);
  const fs::path metrics = dir / "runs" / "sdax-metra_crawl_seed1.csv";
  const fs::path ckpt = dir / "runs" / "sdax-metra_crawl_seed1_ckpt" / "ckpt_2.json";
  REQUIRE(fs::exists(metrics));
  REQUIRE(fs::exists(ckpt));

  const std::string traj = (dir / "traj.csv").string();
  CHECK(run_cli("eval " + ckpt.string() + " -z zero -o " + traj) == 0);
  CHECK(fs::exists(traj));
  std::string head = slurp(traj).substr(0, 40);
  CHECK(head.rfind("t,x,z,vx,vz,body_angle,r_task,r_div", 0) == 0);
  CHECK(run_cli("eval " + (dir / "absent.json").string()) == 2);

  CHECK(run_cli("collapse " + ckpt.string() + " --skills 5 --repeats 2") == 0);

  const std::string svg = (dir / "curve.svg").string();
  CHECK(run_cli("plot " + metrics.string() + " --column lambda -o " + svg) == 0);
  std::string svg_text = slurp(svg);
  CHECK(svg_text.find("<svg") != std::string::npos);
  CHECK(run_cli("plot " + metrics.string() + " --column bogus -o " + svg) == 2);
}
