#include "swarm/ifds.hpp"

#include <algorithm>
#include <cmath>

#include "swarm/errors.hpp"

namespace swarm::ifds {

namespace {
constexpr double kExpClamp = 50.0;
constexpr double kTiny = 1e-12;
}  // namespace

FlowParams shaping_params(const Vec3& p, const Vec3& goal, const Vec3& obstacle_center,
                          double combined_radius, const ShapingAction& action) {
  const double dist_goal = norm(p - goal);
  const double dist_surface = norm(p - obstacle_center) - combined_radius;
  if (dist_surface <= 0.0) throw PenetrationError("shaping_params: inside obstacle");

  FlowParams flow;
  double arg = 1.0 - 1.0 / (dist_goal * dist_surface);
  if (arg < -kExpClamp || arg > kExpClamp) {
    arg = std::clamp(arg, -kExpClamp, kExpClamp);
    flow.saturated = true;
  }
  const double shape = std::exp(arg);
  flow.repulsive = shape * action.repulsive_gain;
  flow.tangential = shape * action.tangential_gain;
  flow.tangent_axis = {std::cos(action.tangent_angle), std::sin(action.tangent_angle), 0.0};
  return flow;
}

Vec3 disturbed_speed(const Vec3& p, const Vec3& goal, const Obstacle& obstacle,
                     const FlowParams& flow, double v_cruise) {
  const Vec3 to_goal = goal - p;
  const double dist_goal = norm(to_goal);
  if (dist_goal < kTiny) return {};
  const Vec3 u = to_goal * (v_cruise / dist_goal);

  const Vec3 n = p - obstacle.center;
  const double dist = norm(n);
  const double gamma = (dist / obstacle.radius) * (dist / obstacle.radius);
  const double log_gamma = std::log(gamma);

  // gamma^{-1/eta} and gamma^{-1/tau}; exponents are <= 0 outside the sphere,
  // so these stay in (0, 1] and cannot overflow.
  const double normal_scale = std::exp(-log_gamma / flow.repulsive);
  const double tangent_scale = std::exp(-log_gamma / flow.tangential);

  const double nu = dot(n, u);
  Vec3 out = u - n * (nu * normal_scale / norm2(n));

  const Vec3 t = cross(flow.tangent_axis, n);
  const double t_norm = norm(t);
  if (t_norm > kTiny) out += t * (nu * tangent_scale / (t_norm * dist));
  return out;
}

Vec3 next_position(const Vec3& p, const Vec3& goal, const std::vector<Vec3>& contributions,
                   double dt, double v_max, double v_cruise) {
  Vec3 velocity;
  if (contributions.empty()) {
    const Vec3 to_goal = goal - p;
    const double d = norm(to_goal);
    velocity = d > kTiny ? to_goal * (v_cruise / d) : Vec3{};
  } else {
    for (const auto& c : contributions) velocity += c;
    velocity = velocity / static_cast<double>(contributions.size());
  }
  return p + clamp_norm(velocity, v_max) * dt;
}

Vec3 plan_position(const Vec3& p, const Vec3& goal, const std::vector<Obstacle>& obstacles,
                   const ShapingAction& action, double dt, double v_max, double v_cruise,
                   long* saturation_events) {
  std::vector<Vec3> contributions;
  contributions.reserve(obstacles.size());
  for (const auto& ob : obstacles) {
    const Vec3 n = p - ob.center;
    if (norm(n) - ob.radius <= 0.0) {
      // Penetrated: escape radially (straight up when exactly at the center).
      const Vec3 dir = norm(n) > kTiny ? normalized(n) : Vec3{0.0, 0.0, 1.0};
      contributions.push_back(dir * v_cruise);
      continue;
    }
    const FlowParams flow = shaping_params(p, goal, ob.center, ob.radius, action);
    if (flow.saturated && saturation_events) ++*saturation_events;
    contributions.push_back(disturbed_speed(p, goal, ob, flow, v_cruise));
  }
  return next_position(p, goal, contributions, dt, v_max, v_cruise);
}

}  // namespace swarm::ifds
