// Command-line front end: train / eval / collapse / plot / inspect-config.
// Exit codes: 0 success, 2 configuration error, 3 numerical fault.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sdax/config.hpp"
#include "sdax/evaluate.hpp"
#include "sdax/plot.hpp"
#include "sdax/trainer.hpp"

namespace {

sdax::ExperimentConfig resolve_config(const std::string& config_path,
                                      const std::vector<std::string>& sets) {
  sdax::ExperimentConfig cfg;
  if (!config_path.empty()) cfg = sdax::load_config(config_path);
  for (const auto& kv : sets) sdax::apply_override(cfg, kv);
  cfg.validate();
  return cfg;
}

std::string run_tag(const sdax::ExperimentConfig& cfg, std::uint64_t seed) {
  return cfg.method + "_" + cfg.task + "_seed" + std::to_string(seed);
}

int cmd_train(const sdax::ExperimentConfig& cfg, bool quiet) {
  for (std::uint64_t seed : cfg.seeds) {
    const std::string tag = run_tag(cfg, seed);
    const std::string metrics = cfg.outdir + "/" + tag + ".csv";
    const std::string ckpts = cfg.outdir + "/" + tag + "_ckpt";
    sdax::Trainer trainer(cfg, seed);
    if (!quiet)
      std::printf("[train] %s -> %s\n", tag.c_str(), metrics.c_str());
    trainer.run(metrics, ckpts, [&](const sdax::IterStats& s) {
      if (!quiet && s.iteration % 100 == 0)
        std::printf(
            "  it %5d  r_task %8.3f  obstacles %5.2f  lambda %8.4f  kappa %6.2f\n",
            s.iteration, s.mean_r_task, s.obstacles_passed, s.lambda, s.kappa);
      return true;
    });
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Skill-discovery exploration lab"};
  app.require_subcommand(1);

  std::string config_path, checkpoint_path, out_path, skill_arg = "random";
  std::vector<std::string> sets, metric_files;
  std::string column = "obstacles_passed";
  std::uint64_t eval_seed = 1234;
  int n_skills = 100, n_repeats = 10;
  bool quiet = false;

  auto* train = app.add_subcommand("train", "Train per config (one run per seed)");
  train->add_option("-c,--config", config_path, "JSON config file");
  train->add_option("--set", sets, "Override config entries, key.path=value");
  train->add_flag("-q,--quiet", quiet, "Suppress progress output");

  auto* eval = app.add_subcommand("eval", "Deterministic rollout of a checkpoint");
  eval->add_option("checkpoint", checkpoint_path, "Checkpoint JSON")->required();
  eval->add_option("-z,--skill", skill_arg,
                   "Skill: 'random', 'zero', or comma-separated values");
  eval->add_option("-o,--trajectory", out_path, "Trajectory CSV output path");
  eval->add_option("--seed", eval_seed, "Seed for random skill draw");

  auto* collapse = app.add_subcommand(
      "collapse", "Success ratio over random skills (mean +/- std)");
  collapse->add_option("checkpoint", checkpoint_path, "Checkpoint JSON")->required();
  collapse->add_option("--skills", n_skills, "Skills per repeat");
  collapse->add_option("--repeats", n_repeats, "Number of repeats");
  collapse->add_option("--seed", eval_seed, "Evaluation seed");

  auto* plot = app.add_subcommand("plot", "Render SVG curves from metrics CSVs");
  plot->add_option("files", metric_files, "Metrics CSV files")->required();
  plot->add_option("--column", column, "Metric column to plot");
  plot->add_option("-o,--out", out_path, "Output SVG path");

  auto* inspect = app.add_subcommand("inspect-config",
                                     "Print the fully materialized config");
  inspect->add_option("-c,--config", config_path, "JSON config file");
  inspect->add_option("--set", sets, "Override config entries, key.path=value");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return cmd_train(resolve_config(config_path, sets), quiet);
    if (*inspect) {
      std::cout << sdax::config_to_json_text(resolve_config(config_path, sets))
                << "\n";
      return 0;
    }
    if (*eval) {
      const sdax::Checkpoint ck = sdax::load_checkpoint(checkpoint_path);
      sdax::Vec z(ck.cfg.skill_dim, 0.0);
      if (skill_arg == "random") {
        sdax::Rng rng(eval_seed);
        for (auto& v : z) v = rng.normal();
      } else if (skill_arg != "zero") {
        std::stringstream ss(skill_arg);
        std::string cell;
        std::size_t i = 0;
        while (std::getline(ss, cell, ',') && i < z.size()) z[i++] = std::stod(cell);
      }
      const auto sum = sdax::evaluate_rollout(ck, z, out_path);
      std::printf(
          "obstacles_passed=%d return_task=%.4f return_div=%.4f steps=%d "
          "termination=%s\n",
          sum.obstacles_passed, sum.episode_return_task,
          sum.episode_return_div, sum.steps, sdax::to_string(sum.cause).c_str());
      return 0;
    }
    if (*collapse) {
      const sdax::Checkpoint ck = sdax::load_checkpoint(checkpoint_path);
      const auto res =
          sdax::evaluate_positive_collapse(ck, n_skills, n_repeats, eval_seed);
      std::printf("success_ratio=%.1f +/- %.1f %%\n", res.mean, res.stddev);
      return 0;
    }
    if (*plot) {
      if (out_path.empty()) out_path = column + ".svg";
      sdax::plot_metric_svg(metric_files, column, column, out_path);
      std::printf("wrote %s\n", out_path.c_str());
      return 0;
    }
  } catch (const sdax::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const sdax::NumericalFault& e) {
    std::fprintf(stderr, "numerical fault: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
