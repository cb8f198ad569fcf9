#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "swarm/agents.hpp"
#include "swarm/checkpoint.hpp"
#include "swarm/config.hpp"
#include "swarm/env.hpp"
#include "swarm/mbrl.hpp"
#include "swarm/obs.hpp"

namespace swarm::harness {

// One evaluation metrics row; the CSV/JSON column set is fixed.
struct MetricsRow {
  int instance_id = 0;
  std::string method;
  int uavs = 0;
  int interval = 0;
  uint64_t seed = 0;
  double time_s = 0.0;  // decision computation only
  double episode_return = 0.0;
  long long collisions = 0;
};

struct RewardRow {
  double intrinsic = 0.0;
  double avoidance = 0.0;
  double constraint = 0.0;
  double total = 0.0;
};

struct TrajectoryLog {
  struct UavTrack {
    int id = 0;
    Vec3 start, target;
    std::vector<Vec3> positions;  // index 0 is the initial position
    std::vector<RewardRow> rewards;
  };
  struct HazardEpoch {
    int t = 0;
    std::vector<env::Hazard> hazards;
  };
  std::vector<UavTrack> uavs;
  std::vector<HazardEpoch> epochs;
};

void export_csv(const std::vector<MetricsRow>& rows, const std::filesystem::path& path);
void export_json(const std::vector<MetricsRow>& rows, const std::filesystem::path& path);
std::vector<MetricsRow> parse_csv(const std::filesystem::path& path);
std::vector<MetricsRow> parse_json(const std::filesystem::path& path);

void save_trajectory(const TrajectoryLog& log, const std::filesystem::path& path);
TrajectoryLog load_trajectory(const std::filesystem::path& path);

enum class Projection { top, iso };
Projection projection_from_name(const std::string& name);

// Deterministic static render: one polyline per UAV, hazard circles per
// regeneration epoch, start and target markers.
std::string render_trajectory_svg(const TrajectoryLog& log, Projection projection);

// Builds per-UAV actor observations and IFDS planned positions; shared by
// the trainer and the evaluator.
struct DecisionPipeline {
  const config::Config* cfg = nullptr;
  agents::Mode mode = agents::Mode::ctfde;

  std::vector<obs::ObsVector> observe(const env::WorldState& world) const;
  // Planned positions for non-done UAVs in ascending id order.
  std::vector<Vec3> plan(const env::WorldState& world,
                         const std::vector<std::array<double, 3>>& actions,
                         long* saturation_events) const;
};

struct EpisodeStats {
  int episode = 0;
  int instance_id = 0;
  int steps = 0;
  double episode_return = 0.0;
  long long collisions = 0;
  double sigma = 0.0;
  long saturations = 0;
  // Model diagnostics, averaged over the episode's update rounds (MPC mode).
  int updates = 0;
  double l_transition = 0.0;
  double l_reward = 0.0;
  double deviation = 0.0;
  double mean_horizon_raw = 0.0;
  double mean_horizon = 0.0;
};

struct TrainResult {
  std::vector<EpisodeStats> episodes;
  std::filesystem::path checkpoint_path;
};

// Runs the full training loop for the given mode, writing checkpoint.bin,
// train_curve.csv and (in MPC mode) model_log.csv under out_dir. Fully
// reproducible from (config, seed).
TrainResult train_run(config::Config cfg, agents::Mode mode, uint64_t seed,
                      const std::filesystem::path& out_dir);

struct EvalOptions {
  int instances = 1;
  int interval = 0;  // 0 keeps the checkpoint's change interval
  int uavs = 0;      // 0 keeps the checkpoint's UAV count
  uint64_t seed = 0;
  int threads = 1;
  bool write_trajectories = true;
};

struct EvalResult {
  std::vector<MetricsRow> rows;
  std::vector<TrajectoryLog> trajectories;
  long long decisions = 0;        // per-UAV decision count
  double decision_seconds = 0.0;  // summed decision time over all instances
};

EvalResult evaluate_run(const checkpoint::Checkpoint& ck, const EvalOptions& opts,
                        const std::filesystem::path& out_dir);
EvalResult evaluate_run(const std::filesystem::path& checkpoint_path, const EvalOptions& opts,
                        const std::filesystem::path& out_dir);

// Deploys a decentralized checkpoint across larger swarm sizes and interval
// settings; rejects centralized (ctpde) checkpoints.
std::vector<MetricsRow> generalize_run(const std::filesystem::path& checkpoint_path,
                                       const std::vector<int>& uav_counts,
                                       const std::vector<int>& intervals, EvalOptions base,
                                       const std::filesystem::path& out_dir);

}  // namespace swarm::harness
