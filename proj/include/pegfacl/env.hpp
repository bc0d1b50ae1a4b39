#pragma once

// Arena, spherical obstacles and the fixed-step kinematics of one agent.

#include <optional>
#include <vector>

#include "pegfacl/geometry.hpp"

namespace pegfacl {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSteerLimit = kPi / 4.0;

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) noexcept {
  double w = std::remainder(a, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

struct Heading {
  double alpha = 0.0;         // azimuth in the x-y plane, (-pi, pi]
  double theta = kPi / 2.0;   // polar angle from +z, [0, pi]

  friend bool operator==(const Heading&, const Heading&) = default;
};

/// Unit vector (sin t cos a, sin t sin a, cos t).
inline Vec3 direction(const Heading& h) noexcept {
  const double s = std::sin(h.theta);
  return {s * std::cos(h.alpha), s * std::sin(h.alpha), std::cos(h.theta)};
}

/// Heading that points along v. Zero vectors map to the default heading.
inline Heading heading_towards(const Vec3& v) noexcept {
  const double n = norm(v);
  if (n == 0.0) return {};
  return {wrap_angle(std::atan2(v.y, v.x)), std::acos(std::clamp(v.z / n, -1.0, 1.0))};
}

struct AgentState {
  Point3 position;
  Heading heading;
  double speed = 0.0;

  friend bool operator==(const AgentState&, const AgentState&) = default;
};

struct Obstacle {
  Point3 center;
  double radius = 1.0;

  friend bool operator==(const Obstacle&, const Obstacle&) = default;
};

enum class SteeringMode { incremental, absolute, relative };

inline const char* to_string(SteeringMode m) noexcept {
  switch (m) {
    case SteeringMode::incremental: return "incremental";
    case SteeringMode::absolute: return "absolute";
    case SteeringMode::relative: return "relative";
  }
  return "?";
}

struct Arena {
  Vec3 extents{35.0, 35.0, 20.0};
  std::vector<Obstacle> obstacles;
  double capture_distance = 1.0;
  double max_time = 100.0;
  double dt = 0.1;
  SteeringMode steering = SteeringMode::relative;

  /// Sensing range reported when there are no obstacles.
  double max_sensing() const noexcept { return 35.0; }

  Point3 clip(const Point3& p) const noexcept {
    return {std::clamp(p.x, 0.0, extents.x), std::clamp(p.y, 0.0, extents.y), std::clamp(p.z, 0.0, extents.z)};
  }
  bool contains(const Point3& p) const noexcept {
    return p.x >= 0.0 && p.x <= extents.x && p.y >= 0.0 && p.y <= extents.y && p.z >= 0.0 && p.z <= extents.z;
  }
  bool contains(const Obstacle& o) const noexcept {
    return o.center.x - o.radius >= 0.0 && o.center.x + o.radius <= extents.x && o.center.y - o.radius >= 0.0 &&
           o.center.y + o.radius <= extents.y && o.center.z - o.radius >= 0.0 && o.center.z + o.radius <= extents.z;
  }
  void validate() const {
    if (!(capture_distance > 0.0)) throw std::invalid_argument("arena: capture_distance must be > 0");
    if (!(dt > 0.0)) throw std::invalid_argument("arena: dt must be > 0");
    if (!(max_time > 0.0)) throw std::invalid_argument("arena: max_time must be > 0");
    if (!(extents.x > 0.0 && extents.y > 0.0 && extents.z > 0.0))
      throw std::invalid_argument("arena: extents must be positive");
    for (const auto& o : obstacles) {
      if (!(o.radius > 0.0)) throw std::invalid_argument("arena: obstacle radius must be > 0");
      if (!contains(o)) throw std::invalid_argument("arena: obstacle not fully inside arena");
    }
  }
};

/// Controller output, both channels limited to [-pi/4, pi/4].
struct StepCommand {
  double dalpha = 0.0;
  double dtheta = 0.0;

  static StepCommand clamped(double da, double dt) noexcept {
    return {std::clamp(da, -kSteerLimit, kSteerLimit), std::clamp(dt, -kSteerLimit, kSteerLimit)};
  }
};

/// Spherical heading (alpha, theta) with theta folded back into [0, pi] across a pole.
inline Heading fold_heading(double alpha, double theta) noexcept {
  theta = wrap_angle(theta);
  if (theta < 0.0) {
    theta = -theta;
    alpha += kPi;
  }
  return {wrap_angle(alpha), theta};
}

/// Applies the command to the heading, then moves speed * dt along it and clips to the box.
///
/// Incremental mode treats the command as a heading change. Absolute mode uses it as
/// the heading itself; a negative polar angle is folded to the equivalent (alpha + pi, -theta).
/// Relative mode offsets the heading of `reference` (the line of sight) by the command.
inline AgentState step_agent(const AgentState& state, StepCommand cmd, double dt, const Arena& arena,
                             SteeringMode mode = SteeringMode::incremental, const Vec3& reference = {}) {
  cmd = StepCommand::clamped(cmd.dalpha, cmd.dtheta);
  AgentState next = state;
  if (mode == SteeringMode::relative) {
    const Heading ref = norm(reference) > 0.0 ? heading_towards(reference) : state.heading;
    next.heading = fold_heading(ref.alpha + cmd.dalpha, ref.theta + cmd.dtheta);
  } else if (mode == SteeringMode::incremental) {
    next.heading.alpha = wrap_angle(state.heading.alpha + cmd.dalpha);
    next.heading.theta = std::clamp(state.heading.theta + cmd.dtheta, 0.0, kPi);
  } else if (cmd.dtheta < 0.0) {
    next.heading.alpha = wrap_angle(cmd.dalpha + kPi);
    next.heading.theta = -cmd.dtheta;
  } else {
    next.heading.alpha = wrap_angle(cmd.dalpha);
    next.heading.theta = cmd.dtheta;
  }
  next.position = arena.clip(state.position + (state.speed * dt) * direction(next.heading));
  return next;
}

inline AgentState step_agent(const AgentState& state, StepCommand cmd, const Arena& arena, const Vec3& reference = {}) {
  return step_agent(state, cmd, arena.dt, arena, arena.steering, reference);
}

enum class Outcome { running, captured, timeout };

inline const char* to_string(Outcome o) noexcept {
  switch (o) {
    case Outcome::running: return "running";
    case Outcome::captured: return "captured";
    case Outcome::timeout: return "timeout";
  }
  return "?";
}

inline Outcome check_termination(const AgentState& pursuer, const AgentState& evader, const Arena& arena,
                                 double elapsed) noexcept {
  if (distance(pursuer.position, evader.position) <= arena.capture_distance) return Outcome::captured;
  if (elapsed > arena.max_time) return Outcome::timeout;
  return Outcome::running;
}

struct ObstacleProximity {
  std::optional<Obstacle> obstacle;  // empty when the arena has none
  double distance = 0.0;             // signed surface distance, negative inside
};

inline double surface_distance(const Point3& pos, const Obstacle& o) noexcept {
  return pegfacl::distance(pos, o.center) - o.radius;
}

inline ObstacleProximity nearest_obstacle(const Point3& pos, const Arena& arena) noexcept {
  ObstacleProximity best{std::nullopt, arena.max_sensing()};
  for (const auto& o : arena.obstacles) {
    const double d = surface_distance(pos, o);
    if (!best.obstacle || d < best.distance) best = {o, d};
  }
  return best;
}

inline bool collision_check(const Point3& pos, const Arena& arena) noexcept {
  for (const auto& o : arena.obstacles)
    if (surface_distance(pos, o) < 0.0) return true;
  return false;
}

}  // namespace pegfacl
