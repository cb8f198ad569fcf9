#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "swarm/rng.hpp"
#include "swarm/vec3.hpp"

namespace swarm::env {

struct EnvConfig {
  int uavs = 6;
  int destinations = 4;
  int hazards_min = 3;
  int hazards_max = 5;
  int change_interval = 15;  // steps between hazard regenerations
  double uav_radius = 0.1;
  double hazard_radius = 0.3;
  double neighbor_dist = 1.5;    // d_nei
  double threat_dist = 0.2;      // d_thr, threat-shell width
  double completion_dist = 0.2;  // d_com
  double dt = 0.1;               // sampling time
  double v_max = 1.0;
  double segment_min = 0.01;      // minimum segment length on heading change
  double path_total_max = 50.0;   // total path length budget
  double h_min = 0.2;
  double h_max = 2.5;
  int t_max = 300;
  double reward_a = 1.0;  // threat-zone entry penalty offset
  double reward_b = 5.0;  // completion bonus
  double reward_c = 1.0;  // constraint violation penalty
  Vec3 arena{5.0, 5.0, 3.0};
  int hazard_slots = 3;        // observation slots for nearest hazards
  double min_start_goal = 0.5;  // instance generation: shortest start-target leg

  // Combined radii: UAV-UAV and UAV-hazard.
  double rho_uav_pair() const { return 2.0 * uav_radius; }
  double rho_uav_hazard() const { return uav_radius + hazard_radius; }

  void validate() const;  // throws ConfigError on violated invariants
};

struct UavState {
  int id = 0;
  Vec3 p;
  Vec3 p_start;
  Vec3 p_end;
  Vec3 v;
  double path_length_total = 0.0;
  bool done = false;
  // Unit direction of the last nonzero displacement; zero before first move.
  Vec3 last_dir;
};

struct Hazard {
  Vec3 p;
  double radius = 0.3;
};

struct WorldState {
  std::vector<UavState> uavs;
  std::vector<Hazard> hazards;
  int t = 0;
  Rng rng;
  long long collision_count = 0;  // cumulative collision events
};

struct ConstraintStatus {
  bool violated = false;
  bool segment = false;       // heading changed with a too-short segment
  bool altitude = false;      // outside [h_min, h_max]
  bool total_length = false;  // path budget exceeded
};

struct RewardBreakdown {
  double intrinsic = 0.0;   // progress toward the target, plus completion bonus
  double avoidance = 0.0;   // threat-zone penalties from hazards and UAVs
  double constraint = 0.0;  // path-constraint penalty
  double total = 0.0;       // intrinsic + avoidance + constraint
};

struct StepResult {
  std::vector<RewardBreakdown> rewards;  // one per UAV
  std::vector<bool> done;                // per-UAV done flags after the step
  int collisions = 0;                    // events recorded this step
  bool all_done = false;
};

// Builds a world with distinct UAV starts, destination assignments
// (round-robin when uavs > destinations), and an initial hazard draw.
// Identical (config, seed) gives a bit-identical world.
WorldState init_instance(const EnvConfig& cfg, uint64_t seed);

// Indices of UAVs and hazards strictly closer than neighbor_dist to UAV i.
std::pair<std::vector<int>, std::vector<int>> neighbor_sets(const WorldState& world,
                                                            const EnvConfig& cfg, int i);

// Replaces the hazard set with a fresh draw from world.rng; every hazard
// keeps clearance rho_uav_hazard() from every UAV.
void regenerate_hazards(WorldState& world, const EnvConfig& cfg);

ConstraintStatus check_path_constraints(const UavState& uav, const Vec3& p_next,
                                        const EnvConfig& cfg);

RewardBreakdown compute_reward(const WorldState& world, const EnvConfig& cfg, int i,
                               const ConstraintStatus& status);

// Advances the world one step. planned holds one position per non-done UAV in
// ascending id order; displacements are speed-capped to v_max * dt.
StepResult step(WorldState& world, const EnvConfig& cfg, const std::vector<Vec3>& planned);

}  // namespace swarm::env
