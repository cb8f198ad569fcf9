#include "swarm/obs.hpp"

#include <algorithm>
#include <cmath>

#include "swarm/errors.hpp"

namespace swarm::obs {

std::string layout_version(int max_slots, bool extended, bool kinematic_mean) {
  std::string s = "obs-v1;slots=" + std::to_string(max_slots);
  s += extended ? ";actor=extended" : ";actor=local";
  if (extended) s += kinematic_mean ? ";mean=kinematic" : ";mean=full";
  return s;
}

LocalObservation local_observation(const env::WorldState& world, const env::EnvConfig& cfg,
                                   int i, int max_slots) {
  const auto& uav = world.uavs.at(i);
  LocalObservation o;
  o.p = uav.p;
  o.p_start = uav.p_start;
  o.p_end = uav.p_end;
  o.v = uav.v;
  o.slots.resize(max_slots);

  const auto [nbr_uavs, nbr_hazards] = env::neighbor_sets(world, cfg, i);
  (void)nbr_uavs;
  std::vector<std::pair<double, int>> ranked;
  ranked.reserve(nbr_hazards.size());
  for (int k : nbr_hazards) ranked.emplace_back(norm(uav.p - world.hazards[k].p), k);
  std::sort(ranked.begin(), ranked.end());

  const int filled = std::min<int>(max_slots, static_cast<int>(ranked.size()));
  for (int s = 0; s < filled; ++s) {
    o.slots[s].rel = world.hazards[ranked[s].second].p - uav.p;
    o.slots[s].valid = 1.0;
  }
  return o;
}

std::vector<double> neighbor_weights(const Vec3& p, const std::vector<Vec3>& neighbor_positions,
                                     double eps_d) {
  std::vector<double> w(neighbor_positions.size());
  double sum = 0.0;
  for (size_t j = 0; j < w.size(); ++j) {
    w[j] = 1.0 / std::max(norm(p - neighbor_positions[j]), eps_d);
    sum += w[j];
  }
  for (auto& v : w) v /= sum;
  return w;
}

ExtendedObservation extend_observation(const LocalObservation& own,
                                       const std::vector<LocalObservation>& neighbors,
                                       const std::vector<double>& weights,
                                       bool kinematic_mean) {
  if (neighbors.size() != weights.size())
    throw DimensionError("extend_observation: neighbor/weight count mismatch");

  ExtendedObservation ext;
  ext.own = own;
  ext.neighbor_count = static_cast<int>(neighbors.size());
  ext.neighbor_mean.slots.resize(own.slots.size());
  for (size_t j = 0; j < neighbors.size(); ++j) {
    const auto& nb = neighbors[j];
    if (nb.slots.size() != own.slots.size())
      throw DimensionError("extend_observation: slot count mismatch");
    const double w = weights[j];
    auto& m = ext.neighbor_mean;
    m.p += nb.p * w;
    m.p_start += nb.p_start * w;
    m.p_end += nb.p_end * w;
    m.v += nb.v * w;
    if (!kinematic_mean) {
      for (size_t s = 0; s < m.slots.size(); ++s) {
        m.slots[s].rel += nb.slots[s].rel * w;
        m.slots[s].valid += nb.slots[s].valid * w;
      }
    }
  }
  return ext;
}

namespace {
void append(ObsVector& v, const Vec3& p) {
  v.push_back(p.x);
  v.push_back(p.y);
  v.push_back(p.z);
}
void append_local(ObsVector& v, const LocalObservation& o) {
  append(v, o.p);
  for (const auto& s : o.slots) {
    append(v, s.rel);
    v.push_back(s.valid);
  }
  append(v, o.p_start);
  append(v, o.p_end);
  append(v, o.v);
}
}  // namespace

ObsVector encode(const LocalObservation& o) {
  ObsVector v;
  v.reserve(local_dim(static_cast<int>(o.slots.size())));
  append_local(v, o);
  return v;
}

ObsVector encode(const ExtendedObservation& o) {
  ObsVector v;
  v.reserve(extended_dim(static_cast<int>(o.own.slots.size())));
  append_local(v, o.own);
  append_local(v, o.neighbor_mean);
  v.push_back(static_cast<double>(o.neighbor_count));
  return v;
}

}  // namespace swarm::obs
