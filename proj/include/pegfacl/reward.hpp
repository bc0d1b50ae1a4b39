#pragma once

// Potential-field shaped reward: exponential obstacle repulsion, opponent
// attraction, and a capture bonus. Attraction and capture terms flip sign for the evader.

#include "pegfacl/facl.hpp"

namespace pegfacl {

struct RewardConfig {
  double alpha_r = 10.0;  // repulsion
  double beta_a = 5.0;    // attraction
  double gamma_s = 20.0;  // capture bonus
  double w_r = 5.0;
  double w_a = 10.0;

  void validate() const {
    if (!(alpha_r > 0.0 && beta_a > 0.0 && gamma_s > 0.0 && w_r > 0.0 && w_a > 0.0))
      throw std::invalid_argument("reward: all coefficients must be > 0");
  }
};

/// 1 - exp(-alpha_r * (d_next - d_prev)); same form for both roles.
inline double repulsion_reward(double d_prev, double d_next, const RewardConfig& cfg) noexcept {
  return 1.0 - std::exp(-cfg.alpha_r * (d_next - d_prev));
}

/// exp(-beta_a * (d_next - d_prev)) - 1 for the pursuer, negated for the evader.
inline double attraction_reward(double d_prev, double d_next, Role role, const RewardConfig& cfg) noexcept {
  const double r = std::exp(-cfg.beta_a * (d_next - d_prev)) - 1.0;
  return role == Role::pursuer ? r : -r;
}

inline double success_reward(bool captured, Role role, const RewardConfig& cfg) noexcept {
  if (!captured) return 0.0;
  return role == Role::pursuer ? cfg.gamma_s : -cfg.gamma_s;
}

/// One agent's view of a transition.
struct Transition {
  double obstacle_prev = 0.0;  // surface distance to the reference obstacle before the step
  double obstacle_next = 0.0;  // ... and after
  double opponent_prev = 0.0;
  double opponent_next = 0.0;
  bool captured = false;
};

inline double total_reward(const Transition& tr, Role role, const RewardConfig& cfg) noexcept {
  return cfg.w_r * repulsion_reward(tr.obstacle_prev, tr.obstacle_next, cfg) +
         cfg.w_a * attraction_reward(tr.opponent_prev, tr.opponent_next, role, cfg) +
         success_reward(tr.captured, role, cfg);
}

/// Builds the transition for `self` moving from `before` to `after`. The obstacle
/// term is measured against whichever obstacle is nearest after the move.
inline Transition make_transition(const Point3& self_before, const Point3& self_after, const Point3& opp_before,
                                  const Point3& opp_after, const Arena& arena, bool captured) {
  Transition tr;
  const auto near = nearest_obstacle(self_after, arena);
  if (near.obstacle) {
    tr.obstacle_prev = surface_distance(self_before, *near.obstacle);
    tr.obstacle_next = near.distance;
  }
  tr.opponent_prev = distance(self_before, opp_before);
  tr.opponent_next = distance(self_after, opp_after);
  tr.captured = captured;
  return tr;
}

}  // namespace pegfacl
