#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "swarm/errors.hpp"
#include "swarm/harness.hpp"

namespace {

uint64_t resolve_seed(uint64_t cli_seed, bool cli_seed_set, uint64_t config_seed) {
  // SWARM_SEED overrides everything, then --seed, then the config value.
  if (const char* env = std::getenv("SWARM_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw swarm::ConfigError(std::string("bad SWARM_SEED value: ") + env);
    }
  }
  return cli_seed_set ? cli_seed : config_seed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-UAV pathfinding trainer and evaluator"};
  app.require_subcommand(1);

  // train
  std::string train_config, train_mode = "ctfde-mpc", train_out = "out";
  uint64_t train_seed = 0;
  bool train_seed_set = false;
  auto* train = app.add_subcommand("train", "train policies for a mode");
  train->add_option("--config", train_config, "config file")->required();
  train->add_option("--mode", train_mode, "ctpde|ctfde|ctfde-mpc|dec-ddpg");
  train->add_option("--seed", train_seed, "master seed")->each([&](const std::string&) {
    train_seed_set = true;
  });
  train->add_option("--out", train_out, "output directory")->required();

  // eval
  std::string eval_ck, eval_out = "out";
  int eval_instances = 1, eval_interval = 0, eval_uavs = 0, eval_threads = 1;
  uint64_t eval_seed = 0;
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  eval->add_option("--checkpoint", eval_ck, "checkpoint file or directory")->required();
  eval->add_option("--instances", eval_instances, "instance count");
  eval->add_option("--interval", eval_interval, "hazard change interval override");
  eval->add_option("--uavs", eval_uavs, "UAV count override");
  eval->add_option("--seed", eval_seed, "evaluation seed");
  eval->add_option("--threads", eval_threads, "parallel instance workers");
  eval->add_option("--out", eval_out, "output directory")->required();

  // generalize
  std::string gen_ck, gen_out = "out";
  std::vector<int> gen_uavs{8, 10, 12};
  std::vector<int> gen_intervals{5, 10, 15};
  int gen_instances = 1;
  uint64_t gen_seed = 0;
  auto* gen = app.add_subcommand("generalize", "deploy a checkpoint to larger swarms");
  gen->add_option("--checkpoint", gen_ck, "checkpoint file or directory")->required();
  gen->add_option("--uavs", gen_uavs, "target swarm sizes");
  gen->add_option("--interval", gen_intervals, "hazard change intervals");
  gen->add_option("--instances", gen_instances, "instances per cell");
  gen->add_option("--seed", gen_seed, "evaluation seed");
  gen->add_option("--out", gen_out, "output directory")->required();

  // render
  std::string render_log, render_proj = "top", render_out = "trajectory.svg";
  auto* render = app.add_subcommand("render", "render a trajectory log to SVG");
  render->add_option("--log", render_log, "trajectory json file")->required();
  render->add_option("--projection", render_proj, "top|iso");
  render->add_option("--out", render_out, "output SVG file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      auto cfg = swarm::config::load(train_config);
      const auto mode = swarm::agents::mode_from_name(train_mode);
      const uint64_t seed = resolve_seed(train_seed, train_seed_set, cfg.train.seed);
      const auto result = swarm::harness::train_run(cfg, mode, seed, train_out);
      std::printf("trained %zu episodes; checkpoint: %s\n", result.episodes.size(),
                  result.checkpoint_path.string().c_str());
      if (!result.episodes.empty())
        std::printf("final episode return: %.6g\n", result.episodes.back().episode_return);
    } else if (eval->parsed()) {
      swarm::harness::EvalOptions opts;
      opts.instances = eval_instances;
      opts.interval = eval_interval;
      opts.uavs = eval_uavs;
      opts.seed = resolve_seed(eval_seed, true, eval_seed);
      opts.threads = eval_threads;
      const auto res = swarm::harness::evaluate_run(std::filesystem::path(eval_ck), opts, eval_out);
      double ret = 0.0;
      long long col = 0;
      for (const auto& r : res.rows) {
        ret += r.episode_return;
        col += r.collisions;
      }
      std::printf("evaluated %zu instances: mean return %.6g, collisions %lld, decision time %.6fs\n",
                  res.rows.size(), ret / std::max<size_t>(res.rows.size(), 1), col,
                  res.decision_seconds);
    } else if (gen->parsed()) {
      swarm::harness::EvalOptions base;
      base.instances = gen_instances;
      base.seed = resolve_seed(gen_seed, true, gen_seed);
      const auto rows = swarm::harness::generalize_run(std::filesystem::path(gen_ck), gen_uavs,
                                                       gen_intervals, base, gen_out);
      std::printf("generalization grid: %zu rows written\n", rows.size());
    } else if (render->parsed()) {
      const auto log = swarm::harness::load_trajectory(render_log);
      const auto svg = swarm::harness::render_trajectory_svg(
          log, swarm::harness::projection_from_name(render_proj));
      std::ofstream out(render_out, std::ios::binary | std::ios::trunc);
      if (!out) throw swarm::IoError("cannot write " + render_out);
      out << svg;
      std::printf("wrote %s\n", render_out.c_str());
    }
  } catch (const swarm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
