#pragma once

#include <vector>

#include "swarm/vec3.hpp"

namespace swarm::ifds {

// Learned planner-shaping action: two positive flow gains plus the tangent
// direction angle in the horizontal plane.
struct ShapingAction {
  double repulsive_gain = 1.0;   // scales the normal-cancellation decay
  double tangential_gain = 1.0;  // scales the tangential-deflection decay
  double tangent_angle = 0.0;    // radians in [-pi, pi]
};

struct ActionBounds {
  double gain_min = 0.1;
  double gain_max = 3.0;
  // tangent_angle spans [-pi, pi]
};

struct FlowParams {
  double repulsive = 1.0;   // eta
  double tangential = 1.0;  // tau
  Vec3 tangent_axis{1.0, 0.0, 0.0};
  bool saturated = false;  // exponent argument hit the clamp
};

struct Obstacle {
  Vec3 center;
  double radius = 0.0;  // combined radius (body + obstacle)
};

// Gain shaping: both gains scale with exp(1 - 1/(dist_goal * dist_surface)),
// so shaping weakens close to the goal and close to the obstacle surface.
// Throws PenetrationError when p is on or inside the obstacle sphere.
FlowParams shaping_params(const Vec3& p, const Vec3& goal, const Vec3& obstacle_center,
                          double combined_radius, const ShapingAction& action);

// Disturbed flow around one spherical obstacle: free flow toward the goal
// with its normal component attenuated and a tangential deflection added,
// both fading with (dist/radius)^2 raised to the inverse gains. A degenerate
// tangent axis (parallel to the radial direction) drops the tangential term.
Vec3 disturbed_speed(const Vec3& p, const Vec3& goal, const Obstacle& obstacle,
                     const FlowParams& flow, double v_cruise);

// Averages the obstacle contributions (falling back to free flow toward the
// goal when there are none), caps the speed, and integrates one step.
Vec3 next_position(const Vec3& p, const Vec3& goal, const std::vector<Vec3>& contributions,
                   double dt, double v_max, double v_cruise);

// Full per-UAV planning step: builds one contribution per obstacle,
// substituting a radial escape velocity for penetrated obstacles, and
// returns the next planned position. Obstacles the UAV sits exactly on are
// pushed straight up. saturation_events, when given, counts exponent clamps.
Vec3 plan_position(const Vec3& p, const Vec3& goal, const std::vector<Obstacle>& obstacles,
                   const ShapingAction& action, double dt, double v_max, double v_cruise,
                   long* saturation_events = nullptr);

}  // namespace swarm::ifds
