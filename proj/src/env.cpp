#include "swarm/env.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "swarm/errors.hpp"

namespace swarm::env {

namespace {

constexpr int kPlacementAttempts = 1000;
// Heading changes larger than 15 degrees count as an attitude change for the
// minimum-segment constraint.
constexpr double kHeadingChangeCos = 0.9659258262890683;

Vec3 sample_point(Rng& rng, const Vec3& lo, const Vec3& hi) {
  return {rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y), rng.uniform(lo.z, hi.z)};
}

}  // namespace

void EnvConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("env config: " + msg); };
  if (uavs < 1) fail("uavs must be >= 1");
  if (destinations < 1) fail("destinations must be >= 1");
  if (hazards_min < 0 || hazards_max < hazards_min) fail("hazard count range invalid");
  if (change_interval < 1) fail("change_interval must be >= 1");
  if (uav_radius <= 0.0 || hazard_radius <= 0.0) fail("radii must be positive");
  if (neighbor_dist <= uav_radius + hazard_radius) fail("neighbor_dist must exceed uav_radius + hazard_radius");
  if (threat_dist <= 0.0) fail("threat_dist must be positive");
  if (completion_dist <= 0.0) fail("completion_dist must be positive");
  if (dt <= 0.0 || v_max <= 0.0) fail("dt and v_max must be positive");
  if (segment_min <= 0.0) fail("segment_min must be positive");
  if (path_total_max <= 0.0) fail("path_total_max must be positive");
  if (h_min >= h_max) fail("h_min must be below h_max");
  if (t_max < 1) fail("t_max must be >= 1");
  if (arena.x <= 0.0 || arena.y <= 0.0 || arena.z <= 0.0) fail("arena must be positive");
  if (hazard_slots < 1) fail("hazard_slots must be >= 1");
  if (min_start_goal < 0.0) fail("min_start_goal must be >= 0");
}

WorldState init_instance(const EnvConfig& cfg, uint64_t seed) {
  cfg.validate();
  WorldState world;
  world.rng = Rng(seed);

  const double m = cfg.uav_radius;  // wall margin for placements
  const Vec3 lo{m, m, std::max(m, cfg.h_min)};
  const Vec3 hi{cfg.arena.x - m, cfg.arena.y - m, std::min(cfg.arena.z - m, cfg.h_max)};
  if (lo.x >= hi.x || lo.y >= hi.y || lo.z >= hi.z)
    throw PlacementError("arena too small for any placement");

  // Whole-layout rejection sampling: destinations first (mutually separated),
  // then starts with pairwise clearance and a minimum leg to the assigned
  // destination (UAV i flies to destination i mod D). A failed layout is
  // retried from scratch so tight arenas still converge.
  const double min_leg = std::max(cfg.min_start_goal, 2.0 * cfg.completion_dist);
  constexpr int kLayoutAttempts = 200;
  constexpr int kPointAttempts = 200;
  for (int attempt = 0; attempt < kLayoutAttempts; ++attempt) {
    std::vector<Vec3> destinations;
    bool layout_ok = true;
    for (int d = 0; d < cfg.destinations && layout_ok; ++d) {
      bool placed = false;
      for (int a = 0; a < kPointAttempts && !placed; ++a) {
        const Vec3 cand = sample_point(world.rng, lo, hi);
        placed = std::all_of(destinations.begin(), destinations.end(), [&](const Vec3& q) {
          return norm(cand - q) > cfg.rho_uav_pair();
        });
        if (placed) destinations.push_back(cand);
      }
      layout_ok = placed;
    }
    std::vector<Vec3> starts;
    for (int i = 0; i < cfg.uavs && layout_ok; ++i) {
      const Vec3 target = destinations[i % cfg.destinations];
      bool placed = false;
      for (int a = 0; a < kPointAttempts && !placed; ++a) {
        const Vec3 cand = sample_point(world.rng, lo, hi);
        bool clear = norm(cand - target) > min_leg;
        for (const auto& s : starts) clear = clear && norm(cand - s) > cfg.rho_uav_pair();
        if (clear) {
          starts.push_back(cand);
          placed = true;
        }
      }
      layout_ok = placed;
    }
    if (!layout_ok) continue;
    for (int i = 0; i < cfg.uavs; ++i) {
      UavState uav;
      uav.id = i;
      uav.p = uav.p_start = starts[i];
      uav.p_end = destinations[i % cfg.destinations];
      world.uavs.push_back(uav);
    }
    regenerate_hazards(world, cfg);
    return world;
  }
  throw PlacementError("cannot place " + std::to_string(cfg.uavs) +
                       " UAVs with pairwise clearance; arena too small");
}

std::pair<std::vector<int>, std::vector<int>> neighbor_sets(const WorldState& world,
                                                            const EnvConfig& cfg, int i) {
  if (i < 0 || i >= static_cast<int>(world.uavs.size()))
    throw DimensionError("neighbor_sets: uav id out of range");
  std::vector<int> uav_ids;
  std::vector<int> hazard_ids;
  const Vec3 p = world.uavs[i].p;
  for (const auto& u : world.uavs) {
    if (u.id != i && norm(p - u.p) < cfg.neighbor_dist) uav_ids.push_back(u.id);
  }
  for (int k = 0; k < static_cast<int>(world.hazards.size()); ++k) {
    if (norm(p - world.hazards[k].p) < cfg.neighbor_dist) hazard_ids.push_back(k);
  }
  return {uav_ids, hazard_ids};
}

void regenerate_hazards(WorldState& world, const EnvConfig& cfg) {
  const int count = cfg.hazards_min + (cfg.hazards_max > cfg.hazards_min
                                           ? world.rng.uniform_int(cfg.hazards_max - cfg.hazards_min + 1)
                                           : 0);
  const Vec3 lo{0.0, 0.0, 0.0};
  // Targets stay approachable: hazards keep a completion-sized margin away
  // from every destination in addition to the UAV no-encompass rule.
  const double dest_clear = cfg.rho_uav_hazard() + cfg.threat_dist + cfg.completion_dist;
  std::vector<Hazard> fresh;
  for (int k = 0; k < count; ++k) {
    bool placed = false;
    for (int a = 0; a < kPlacementAttempts && !placed; ++a) {
      Hazard h{sample_point(world.rng, lo, cfg.arena), cfg.hazard_radius};
      placed = std::all_of(world.uavs.begin(), world.uavs.end(), [&](const UavState& u) {
        return norm(h.p - u.p) > cfg.rho_uav_hazard() && norm(h.p - u.p_end) > dest_clear;
      });
      if (placed) fresh.push_back(h);
    }
    if (!placed)
      throw SamplingExhaustedError("hazard placement failed after " +
                                   std::to_string(kPlacementAttempts) + " attempts");
  }
  world.hazards = std::move(fresh);
}

ConstraintStatus check_path_constraints(const UavState& uav, const Vec3& p_next,
                                        const EnvConfig& cfg) {
  ConstraintStatus st;
  const Vec3 seg = p_next - uav.p;
  const double seg_len = norm(seg);

  if (seg_len > 0.0 && norm2(uav.last_dir) > 0.0) {
    const double c = dot(seg / seg_len, uav.last_dir);
    if (c < kHeadingChangeCos && seg_len < cfg.segment_min) st.segment = true;
  }
  if (p_next.z < cfg.h_min || p_next.z > cfg.h_max) st.altitude = true;
  if (uav.path_length_total + seg_len > cfg.path_total_max) st.total_length = true;

  st.violated = st.segment || st.altitude || st.total_length;
  return st;
}

RewardBreakdown compute_reward(const WorldState& world, const EnvConfig& cfg, int i,
                               const ConstraintStatus& status) {
  const UavState& uav = world.uavs.at(i);
  RewardBreakdown r;

  const auto [nbr_uavs, nbr_hazards] = neighbor_sets(world, cfg, i);
  const double rho_ik = cfg.rho_uav_hazard();
  for (int k : nbr_hazards) {
    const double d = norm(uav.p - world.hazards[k].p);
    if (d < rho_ik + cfg.threat_dist)
      r.avoidance += (d - (rho_ik + cfg.threat_dist)) / rho_ik - cfg.reward_a;
  }
  const double rho_ij = cfg.rho_uav_pair();
  for (int j : nbr_uavs) {
    const double d = norm(uav.p - world.uavs[j].p);
    if (d < rho_ij + cfg.threat_dist)
      r.avoidance += (d - (rho_ij + cfg.threat_dist)) / rho_ij - cfg.reward_a;
  }

  const double dist_end = norm(uav.p - uav.p_end);
  const double total = std::max(norm(uav.p_start - uav.p_end), 1e-9);
  r.intrinsic = -dist_end / total;
  if (dist_end < cfg.completion_dist) r.intrinsic += cfg.reward_b;

  r.constraint = status.violated ? -cfg.reward_c : 0.0;
  r.total = r.intrinsic + r.avoidance + r.constraint;
  return r;
}

StepResult step(WorldState& world, const EnvConfig& cfg, const std::vector<Vec3>& planned) {
  const int n = static_cast<int>(world.uavs.size());
  int active = 0;
  for (const auto& u : world.uavs) active += u.done ? 0 : 1;
  if (active == 0) throw EpisodeFinishedError("step called after all UAVs done");
  if (static_cast<int>(planned.size()) != active)
    throw DimensionError("step: expected one planned position per non-done UAV");

  std::vector<bool> was_done(n);
  std::vector<ConstraintStatus> status(n);

  int next_plan = 0;
  for (int i = 0; i < n; ++i) {
    UavState& uav = world.uavs[i];
    was_done[i] = uav.done;
    if (uav.done) continue;

    const Vec3 target = planned[next_plan++];
    const Vec3 motion = clamp_norm(target - uav.p, cfg.v_max * cfg.dt);
    const Vec3 p_next = uav.p + motion;

    status[i] = check_path_constraints(uav, p_next, cfg);

    const double seg_len = norm(motion);
    uav.path_length_total += seg_len;
    if (seg_len > 1e-12) uav.last_dir = motion / seg_len;
    uav.v = motion / cfg.dt;
    uav.p = p_next;
  }
  world.t += 1;

  StepResult result;
  result.rewards.resize(n);
  result.done.resize(n);
  for (int i = 0; i < n; ++i) {
    result.rewards[i] = compute_reward(world, cfg, i, status[i]);
    if (was_done[i]) {
      // Done UAVs hold position and stop accruing intrinsic reward.
      result.rewards[i].intrinsic = 0.0;
      result.rewards[i].total = result.rewards[i].avoidance + result.rewards[i].constraint;
    }
    UavState& uav = world.uavs[i];
    if (!uav.done && norm(uav.p - uav.p_end) < cfg.completion_dist) uav.done = true;
    result.done[i] = uav.done;
  }

  // Collision events: one per UAV-hazard or UAV-UAV incidence per step.
  for (int i = 0; i < n; ++i) {
    for (const auto& h : world.hazards)
      if (norm(world.uavs[i].p - h.p) < cfg.rho_uav_hazard()) result.collisions++;
    for (int j = 0; j < n; ++j)
      if (j != i && norm(world.uavs[i].p - world.uavs[j].p) < cfg.rho_uav_pair())
        result.collisions++;
  }
  world.collision_count += result.collisions;

  if (world.t % cfg.change_interval == 0) regenerate_hazards(world, cfg);

  result.all_done = std::all_of(result.done.begin(), result.done.end(), [](bool d) { return d; });
  return result;
}

}  // namespace swarm::env
