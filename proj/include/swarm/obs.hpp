#pragma once

#include <string>
#include <vector>

#include "swarm/env.hpp"
#include "swarm/vec3.hpp"

namespace swarm::obs {

// One hazard slot: position relative to the observing UAV plus a validity
// flag. The flag is a real so weighted means of observations stay in the
// same layout (a fractional flag reads as neighborhood hazard density).
struct HazardSlot {
  Vec3 rel;
  double valid = 0.0;
};

struct LocalObservation {
  Vec3 p;
  std::vector<HazardSlot> slots;  // nearest neighboring hazards, ascending distance
  Vec3 p_start;
  Vec3 p_end;
  Vec3 v;
};

struct ExtendedObservation {
  LocalObservation own;
  LocalObservation neighbor_mean;  // distance-weighted mean of neighbor observations
  int neighbor_count = 0;
};

using ObsVector = std::vector<double>;

// Flat encoding layout (doubles, in order):
//   [0..2]   p
//   then per slot s in [0, max_slots): [3+4s..5+4s] rel, [6+4s] valid
//   [3+4S..5+4S] p_start, [+3] p_end, [+3] v        with S = max_slots
// Extended observations append the neighbor-mean block in the same layout
// followed by one entry holding neighbor_count.
inline int local_dim(int max_slots) { return 12 + 4 * max_slots; }
inline int extended_dim(int max_slots) { return 2 * local_dim(max_slots) + 1; }

// Version string embedded in checkpoints; loading rejects mismatches.
std::string layout_version(int max_slots, bool extended, bool kinematic_mean);

// Local observation of UAV i: own kinematic fields plus the max_slots
// nearest neighboring hazards (relative positions, ties by hazard index).
LocalObservation local_observation(const env::WorldState& world, const env::EnvConfig& cfg,
                                   int i, int max_slots);

// Normalized inverse-distance weights; distances are clamped below by eps_d.
std::vector<double> neighbor_weights(const Vec3& p, const std::vector<Vec3>& neighbor_positions,
                                     double eps_d = 1e-3);

// Weighted elementwise mean of the neighbors' observations next to the
// UAV's own. kinematic_mean drops the neighbors' hazard slots from the mean.
ExtendedObservation extend_observation(const LocalObservation& own,
                                       const std::vector<LocalObservation>& neighbors,
                                       const std::vector<double>& weights,
                                       bool kinematic_mean = false);

ObsVector encode(const LocalObservation& o);
ObsVector encode(const ExtendedObservation& o);

}  // namespace swarm::obs
