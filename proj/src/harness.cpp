#include "swarm/harness.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <thread>

#include "swarm/errors.hpp"
#include "swarm/ifds.hpp"

namespace swarm::harness {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string expected_layout(const config::Config& cfg, agents::Mode mode) {
  return obs::layout_version(cfg.env.hazard_slots, agents::mode_uses_extended_obs(mode),
                             cfg.mean_field_kinematic());
}

int actor_obs_dim(const config::Config& cfg, agents::Mode mode) {
  return agents::mode_uses_extended_obs(mode) ? obs::extended_dim(cfg.env.hazard_slots)
                                              : obs::local_dim(cfg.env.hazard_slots);
}

checkpoint::Checkpoint build_checkpoint(const config::Config& cfg, agents::Mode mode,
                                        const agents::AgentSet& agent_set,
                                        const mbrl::VirtualModel* model, uint64_t episode,
                                        const Rng& rng) {
  checkpoint::Checkpoint ck;
  ck.mode = agents::mode_name(mode);
  ck.layout = expected_layout(cfg, mode);
  ck.config_text = config::serialize(cfg);
  ck.config_hash = config::hash(cfg);
  ck.episode = episode;
  ck.rng_state = rng.state();
  for (int i = 0; i < agent_set.n_agents; ++i) {
    const auto tag = std::to_string(i);
    checkpoint::add_mlp(ck, "actor" + tag, agent_set.actors[i]);
    checkpoint::add_mlp(ck, "actor_target" + tag, agent_set.actor_targets[i]);
    checkpoint::add_mlp(ck, "critic" + tag, agent_set.critics[i]);
    checkpoint::add_mlp(ck, "critic_target" + tag, agent_set.critic_targets[i]);
  }
  if (model) {
    checkpoint::add_mlp(ck, "model_transition", model->transition);
    checkpoint::add_mlp(ck, "model_reward", model->reward);
  }
  return ck;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

std::vector<obs::ObsVector> DecisionPipeline::observe(const env::WorldState& world) const {
  const auto& c = *cfg;
  const int n = static_cast<int>(world.uavs.size());
  std::vector<obs::LocalObservation> locals(n);
  for (int i = 0; i < n; ++i)
    locals[i] = obs::local_observation(world, c.env, i, c.env.hazard_slots);

  std::vector<obs::ObsVector> out(n);
  if (!agents::mode_uses_extended_obs(mode)) {
    for (int i = 0; i < n; ++i) out[i] = obs::encode(locals[i]);
    return out;
  }
  for (int i = 0; i < n; ++i) {
    const auto [nbr_uavs, nbr_hazards] = env::neighbor_sets(world, c.env, i);
    (void)nbr_hazards;
    std::vector<Vec3> positions;
    std::vector<obs::LocalObservation> nbr_obs;
    positions.reserve(nbr_uavs.size());
    nbr_obs.reserve(nbr_uavs.size());
    for (int j : nbr_uavs) {
      positions.push_back(world.uavs[j].p);
      nbr_obs.push_back(locals[j]);
    }
    const auto weights = obs::neighbor_weights(world.uavs[i].p, positions);
    out[i] = obs::encode(
        obs::extend_observation(locals[i], nbr_obs, weights, c.mean_field_kinematic()));
  }
  return out;
}

std::vector<Vec3> DecisionPipeline::plan(const env::WorldState& world,
                                         const std::vector<std::array<double, 3>>& actions,
                                         long* saturation_events) const {
  const auto& e = cfg->env;
  std::vector<Vec3> planned;
  for (const auto& uav : world.uavs) {
    if (uav.done) continue;
    const auto [nbr_uavs, nbr_hazards] = env::neighbor_sets(world, e, uav.id);
    std::vector<ifds::Obstacle> obstacles;
    obstacles.reserve(nbr_uavs.size() + nbr_hazards.size());
    for (int j : nbr_uavs) obstacles.push_back({world.uavs[j].p, e.rho_uav_pair()});
    for (int k : nbr_hazards) obstacles.push_back({world.hazards[k].p, e.rho_uav_hazard()});
    const auto& a = actions[uav.id];
    planned.push_back(ifds::plan_position(uav.p, uav.p_end, obstacles, {a[0], a[1], a[2]}, e.dt,
                                          e.v_max, e.v_max, saturation_events));
  }
  return planned;
}

TrainResult train_run(config::Config cfg, agents::Mode mode, uint64_t seed,
                      const std::filesystem::path& out_dir) {
  cfg.train.seed = seed;
  cfg.validate(mode);
  std::filesystem::create_directories(out_dir);

  const bool mpc = mode == agents::Mode::ctfde_mpc;
  const int n = cfg.env.uavs;
  const int local = obs::local_dim(cfg.env.hazard_slots);
  const int obs_dim = actor_obs_dim(cfg, mode);

  Rng init_rng(mix_seed(seed, 0xA110));
  agents::AgentConfig agent_cfg{cfg.agent.actor_hidden, cfg.agent.critic_hidden, cfg.train.lr,
                                cfg.train.actor_lr, cfg.train.action_reg, cfg.critic_extended()};
  auto agent_set = agents::AgentSet::init(mode, n, obs_dim, local, agent_cfg, init_rng);
  mbrl::VirtualModel model;
  if (mpc)
    model = mbrl::VirtualModel::init(n * obs_dim, n * agents::AgentSet::act_dim, n,
                                     cfg.model.hidden,
                                     cfg.model.lr > 0.0 ? cfg.model.lr : cfg.train.lr,
                                     cfg.model.residual_transition, init_rng);

  agents::ReplayBuffer buffer(static_cast<size_t>(cfg.train.buffer_capacity));
  agents::NoiseProcess noise{cfg.train.noise_sigma, cfg.train.noise_decay,
                             Rng(mix_seed(seed, 0xB0153))};
  Rng sampler(mix_seed(seed, 0x5A3B1E));

  DecisionPipeline pipeline{&cfg, mode};
  TrainResult result;
  result.checkpoint_path = out_dir / "checkpoint.bin";

  for (int e = 0; e < cfg.train.episodes; ++e) {
    const int instance = e % cfg.train.instances;
    auto world = env::init_instance(cfg.env, mix_seed(seed, 0x1000 + instance));
    auto obs_vecs = pipeline.observe(world);

    EpisodeStats stats;
    stats.episode = e;
    stats.instance_id = instance;
    stats.sigma = noise.sigma;

    for (int t = 0; t < cfg.env.t_max; ++t) {
      std::vector<std::array<double, 3>> actions(n);
      for (int i = 0; i < n; ++i) actions[i] = agent_set.act_array(i, obs_vecs[i], &noise);
      const auto planned = pipeline.plan(world, actions, &stats.saturations);
      const auto sr = env::step(world, cfg.env, planned);
      const bool terminal = sr.all_done || t + 1 == cfg.env.t_max;
      auto next_obs = pipeline.observe(world);

      agents::Transition tr;
      tr.obs = obs_vecs;
      tr.actions = actions;
      tr.rewards.reserve(n);
      for (const auto& r : sr.rewards) {
        tr.rewards.push_back(r.total);
        stats.episode_return += r.total;
      }
      tr.next_obs = next_obs;
      tr.done.assign(sr.done.begin(), sr.done.end());
      tr.terminal = terminal;
      buffer.push(std::move(tr));

      stats.collisions += sr.collisions;
      stats.steps = t + 1;
      obs_vecs = std::move(next_obs);

      if ((t + 1) % cfg.train.update_every == 0) {
        for (int round = 0; round < cfg.train.update_rounds; ++round) {
          const auto batch = buffer.sample(static_cast<size_t>(cfg.train.batch), sampler);
          if (batch.empty()) {
            // Warmup: the virtual model already fits on small batches while
            // the critics wait for a full one.
            if (mpc && buffer.size() >= 16) {
              const auto small = buffer.sample(buffer.size() / 2, sampler);
              if (!small.empty()) mbrl::model_update(model, small);
            }
            break;
          }
          if (mpc) {
            const auto msr = mbrl::multistep_critic_update(agent_set, model, batch,
                                                           cfg.train.gamma, cfg.horizon);
            agents::actor_update(agent_set, batch);
            if (cfg.train.actor_on_model) {
              std::vector<std::vector<double>> rows;
              rows.reserve(batch.size());
              for (const auto* b : batch) {
                std::vector<double> z, a;
                for (const auto& o : b->obs) z.insert(z.end(), o.begin(), o.end());
                for (const auto& av : b->actions)
                  for (double v : av) a.push_back(v);
                rows.push_back(mbrl::model_predict(model, z, a).first);
              }
              agents::actor_update_on(agent_set, rows);
            }
            for (int m = 0; m < cfg.model.updates_per_round; ++m) {
              if (m > 0) {
                const auto extra = buffer.sample(static_cast<size_t>(cfg.train.batch), sampler);
                if (extra.empty()) break;
                mbrl::model_update(model, extra);
              } else {
                mbrl::model_update(model, batch);
              }
            }
            stats.updates++;
            stats.l_transition += msr.losses.transition;
            stats.l_reward += msr.losses.reward;
            stats.deviation += msr.deviation;
            stats.mean_horizon_raw += msr.horizon_raw;
            stats.mean_horizon += msr.horizon;
          } else {
            agents::critic_update(agent_set, batch, cfg.train.gamma);
            agents::actor_update(agent_set, batch);
          }
          agents::update_targets(agent_set, cfg.train.zeta);
        }
      }
      if (sr.all_done) break;
    }

    if (stats.updates > 0) {
      stats.l_transition /= stats.updates;
      stats.l_reward /= stats.updates;
      stats.deviation /= stats.updates;
      stats.mean_horizon_raw /= stats.updates;
      stats.mean_horizon /= stats.updates;
    }
    noise.end_episode();
    result.episodes.push_back(stats);

    const auto ck = build_checkpoint(cfg, mode, agent_set, mpc ? &model : nullptr,
                                     static_cast<uint64_t>(e + 1), noise.rng);
    checkpoint::save(ck, result.checkpoint_path);
  }

  std::string curve = "episode,instance,steps,return,collisions,sigma,saturations\n";
  for (const auto& s : result.episodes) {
    curve += std::to_string(s.episode) + "," + std::to_string(s.instance_id) + "," +
             std::to_string(s.steps) + "," + fmt(s.episode_return) + "," +
             std::to_string(s.collisions) + "," + fmt(s.sigma) + "," +
             std::to_string(s.saturations) + "\n";
  }
  write_text(out_dir / "train_curve.csv", curve);

  if (mpc) {
    std::string log = "episode,l_lambda,l_mu,deviation,mean_n_raw,mean_n\n";
    for (const auto& s : result.episodes) {
      log += std::to_string(s.episode) + "," + fmt(s.l_transition) + "," + fmt(s.l_reward) + "," +
             fmt(s.deviation) + "," + fmt(s.mean_horizon_raw) + "," + fmt(s.mean_horizon) + "\n";
    }
    write_text(out_dir / "model_log.csv", log);
  }
  return result;
}

namespace {

struct InstanceOutcome {
  MetricsRow row;
  TrajectoryLog log;
  long long decisions = 0;
  double decision_seconds = 0.0;
};

InstanceOutcome run_instance(const config::Config& cfg, agents::Mode mode,
                             const agents::AgentSet& agent_set, int instance_id, uint64_t seed) {
  const int n = cfg.env.uavs;
  DecisionPipeline pipeline{&cfg, mode};
  auto world = env::init_instance(cfg.env, mix_seed(seed, 0x2000 + instance_id));

  InstanceOutcome out;
  out.log.uavs.resize(n);
  for (int i = 0; i < n; ++i) {
    out.log.uavs[i].id = i;
    out.log.uavs[i].start = world.uavs[i].p_start;
    out.log.uavs[i].target = world.uavs[i].p_end;
    out.log.uavs[i].positions.push_back(world.uavs[i].p);
  }
  out.log.epochs.push_back({0, world.hazards});

  double ret = 0.0;
  for (int t = 0; t < cfg.env.t_max; ++t) {
    const auto t0 = Clock::now();
    const auto obs_vecs = pipeline.observe(world);
    std::vector<std::array<double, 3>> actions(n);
    for (int i = 0; i < n; ++i) actions[i] = agent_set.act_array(i, obs_vecs[i], nullptr);
    const auto planned = pipeline.plan(world, actions, nullptr);
    out.decision_seconds += seconds_since(t0);
    out.decisions += static_cast<long long>(planned.size());

    const auto sr = env::step(world, cfg.env, planned);
    for (int i = 0; i < n; ++i) {
      ret += sr.rewards[i].total;
      out.log.uavs[i].positions.push_back(world.uavs[i].p);
      out.log.uavs[i].rewards.push_back({sr.rewards[i].intrinsic, sr.rewards[i].avoidance,
                                         sr.rewards[i].constraint, sr.rewards[i].total});
    }
    if (world.t % cfg.env.change_interval == 0)
      out.log.epochs.push_back({world.t, world.hazards});
    if (sr.all_done) break;
  }

  out.row = {instance_id, agents::mode_name(mode), n, cfg.env.change_interval, seed,
             out.decision_seconds, ret, world.collision_count};
  return out;
}

}  // namespace

EvalResult evaluate_run(const checkpoint::Checkpoint& ck, const EvalOptions& opts,
                        const std::filesystem::path& out_dir) {
  auto cfg = config::parse(ck.config_text);
  const auto mode = agents::mode_from_name(ck.mode);
  if (ck.layout != expected_layout(cfg, mode))
    throw CheckpointError("observation layout mismatch: checkpoint has '" + ck.layout +
                          "', scenario expects '" + expected_layout(cfg, mode) + "'");

  const int trained_uavs = cfg.env.uavs;
  if (opts.uavs > 0 && opts.uavs != trained_uavs && !agents::mode_decentralized_exec(mode))
    throw ModeError("ctpde checkpoints are bound to their trained swarm size");
  if (opts.uavs > 0) cfg.env.uavs = opts.uavs;
  if (opts.interval > 0) cfg.env.change_interval = opts.interval;
  cfg.validate(mode);

  const int n = cfg.env.uavs;
  const int local = obs::local_dim(cfg.env.hazard_slots);
  const int obs_dim = actor_obs_dim(cfg, mode);
  Rng scratch(0);
  agents::AgentConfig agent_cfg{cfg.agent.actor_hidden, cfg.agent.critic_hidden, cfg.train.lr,
                                cfg.train.actor_lr, cfg.train.action_reg, cfg.critic_extended()};
  auto agent_set = agents::AgentSet::init(mode, n, obs_dim, local, agent_cfg, scratch);
  for (int i = 0; i < n; ++i) {
    const auto actor = checkpoint::read_mlp(ck, "actor" + std::to_string(i % trained_uavs));
    if (actor.in_dim() != obs_dim)
      throw CheckpointError("actor input dimension mismatch against scenario layout");
    agent_set.actors[i] = actor;
  }

  const int count = opts.instances;
  std::vector<InstanceOutcome> outcomes(count);
  const int workers = std::max(1, std::min(opts.threads, count));
  if (workers == 1) {
    for (int k = 0; k < count; ++k) outcomes[k] = run_instance(cfg, mode, agent_set, k, opts.seed);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int k = next.fetch_add(1); k < count; k = next.fetch_add(1))
          outcomes[k] = run_instance(cfg, mode, agent_set, k, opts.seed);
      });
    }
    for (auto& th : pool) th.join();
  }

  EvalResult res;
  for (auto& oc : outcomes) {
    res.rows.push_back(oc.row);
    res.trajectories.push_back(std::move(oc.log));
    res.decisions += oc.decisions;
    res.decision_seconds += oc.decision_seconds;
  }
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    export_csv(res.rows, out_dir / "metrics.csv");
    export_json(res.rows, out_dir / "metrics.json");
    if (opts.write_trajectories) {
      for (size_t k = 0; k < res.trajectories.size(); ++k) {
        char name[64];
        std::snprintf(name, sizeof(name), "trajectory_%03zu.json", k);
        save_trajectory(res.trajectories[k], out_dir / name);
      }
    }
  }
  return res;
}

EvalResult evaluate_run(const std::filesystem::path& checkpoint_path, const EvalOptions& opts,
                        const std::filesystem::path& out_dir) {
  auto path = checkpoint_path;
  if (std::filesystem::is_directory(path)) path /= "checkpoint.bin";
  return evaluate_run(checkpoint::load(path), opts, out_dir);
}

std::vector<MetricsRow> generalize_run(const std::filesystem::path& checkpoint_path,
                                       const std::vector<int>& uav_counts,
                                       const std::vector<int>& intervals, EvalOptions base,
                                       const std::filesystem::path& out_dir) {
  auto path = checkpoint_path;
  if (std::filesystem::is_directory(path)) path /= "checkpoint.bin";
  const auto ck = checkpoint::load(path);
  const auto mode = agents::mode_from_name(ck.mode);
  if (!agents::mode_decentralized_exec(mode))
    throw ModeError("generalization requires a decentralized checkpoint; got " + ck.mode);

  base.write_trajectories = false;
  std::vector<MetricsRow> rows;
  for (int uavs : uav_counts) {
    for (int interval : intervals) {
      EvalOptions opts = base;
      opts.uavs = uavs;
      opts.interval = interval;
      auto res = evaluate_run(ck, opts, "");
      rows.insert(rows.end(), res.rows.begin(), res.rows.end());
    }
  }
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    export_csv(rows, out_dir / "metrics_grid.csv");
    export_json(rows, out_dir / "metrics_grid.json");
  }
  return rows;
}

}  // namespace swarm::harness
