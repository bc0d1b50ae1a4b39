#pragma once

// Fuzzy actor-critic learner: one critic and two actor channels (heading change in
// azimuth and in polar angle) sharing a single firing vector.

#include <random>

#include "pegfacl/env.hpp"
#include "pegfacl/fuzzy.hpp"

namespace pegfacl {

enum class Role { pursuer, evader };

inline const char* to_string(Role r) noexcept { return r == Role::pursuer ? "pursuer" : "evader"; }

inline constexpr std::size_t kChannels = 2;
using Channels = std::array<double, kChannels>;

struct LearnerParams {
  std::array<std::vector<double>, kChannels> actor_w;
  std::vector<double> critic_zeta;
  double alpha_a = 0.001;
  double alpha_c = 0.05;
  double gamma = 0.95;
  double sigma_a = 0.1;

  /// Zero-initialised weights for `rules` rules.
  static LearnerParams zeros(std::size_t rules, double alpha_a = 0.001, double alpha_c = 0.05, double gamma = 0.95,
                             double sigma_a = 0.1) {
    LearnerParams p;
    for (auto& w : p.actor_w) w.assign(rules, 0.0);
    p.critic_zeta.assign(rules, 0.0);
    p.alpha_a = alpha_a;
    p.alpha_c = alpha_c;
    p.gamma = gamma;
    p.sigma_a = sigma_a;
    p.validate();
    return p;
  }

  std::size_t rule_count() const noexcept { return critic_zeta.size(); }

  void validate() const {
    if (!(alpha_a > 0.0) || !(alpha_c > 0.0)) throw std::invalid_argument("learner: learning rates must be > 0");
    // Actor must adapt slower than the critic.
    if (!(alpha_a < alpha_c)) throw std::invalid_argument("learner: alpha_a must be < alpha_c");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("learner: gamma must lie in [0, 1)");
    if (!(sigma_a > 0.0)) throw std::invalid_argument("learner: sigma_a must be > 0");
    for (const auto& w : actor_w)
      if (w.size() != critic_zeta.size()) throw LayoutMismatch("learner: actor and critic lengths differ");
  }
};

struct Action {
  Channels u{};        // actor output
  Channels u_noisy{};  // executed output, noise added then clamped to the steering limit

  friend bool operator==(const Action&, const Action&) = default;
};

inline double clamp_steer(double u) noexcept { return std::clamp(u, -kSteerLimit, kSteerLimit); }

/// Noise-free policy output.
inline Action act_greedy(const LearnerParams& params, const FiringVector& phi) {
  Action a;
  for (std::size_t c = 0; c < kChannels; ++c) {
    a.u[c] = infer(phi, params.actor_w[c]);
    a.u_noisy[c] = clamp_steer(a.u[c]);
  }
  return a;
}

/// Policy output plus independent N(0, sigma_a^2) exploration per channel.
template <class Rng>
Action act(const LearnerParams& params, const FiringVector& phi, Rng& rng) {
  Action a;
  std::normal_distribution<double> noise(0.0, params.sigma_a);
  for (std::size_t c = 0; c < kChannels; ++c) {
    a.u[c] = infer(phi, params.actor_w[c]);
    a.u_noisy[c] = clamp_steer(a.u[c] + noise(rng));
  }
  return a;
}

inline double value(const LearnerParams& params, const FiringVector& phi) { return infer(phi, params.critic_zeta); }

/// delta = r + gamma V(s') - V(s), with V(s') = 0 on terminal transitions.
inline double td_error(const LearnerParams& params, const FiringVector& phi_t, const FiringVector& phi_t1,
                       double reward, bool terminal) {
  const double next = terminal ? 0.0 : value(params, phi_t1);
  return reward + params.gamma * next - value(params, phi_t);
}

/// w_l += alpha_a * delta * ((u' - u) / sigma_a) * phi_l for each channel.
inline void update_actor(LearnerParams& params, const FiringVector& phi_t, const Action& action, double delta) {
  for (std::size_t c = 0; c < kChannels; ++c) {
    auto& w = params.actor_w[c];
    if (w.size() != phi_t.size()) throw LayoutMismatch("update_actor: length mismatch");
    const double scale = params.alpha_a * delta * (action.u_noisy[c] - action.u[c]) / params.sigma_a;
    if (scale == 0.0) continue;
    for (std::size_t l = 0; l < w.size(); ++l) w[l] += scale * phi_t.phi[l];
  }
}

/// zeta_l += alpha_c * delta * phi_l.
inline void update_critic(LearnerParams& params, const FiringVector& phi_t, double delta) {
  auto& z = params.critic_zeta;
  if (z.size() != phi_t.size()) throw LayoutMismatch("update_critic: length mismatch");
  const double scale = params.alpha_c * delta;
  for (std::size_t l = 0; l < z.size(); ++l) z[l] += scale * phi_t.phi[l];
}

/// Angle from `heading` to `target`, signed by the turn direction about +z.
/// Magnitude is the 3D angle in [0, pi]; zero-length targets give 0.
inline double signed_bearing(const Vec3& heading, const Vec3& target) {
  if (norm(target) == 0.0) return 0.0;
  const double mag = angle_between(heading, target);
  return cross(heading, target).z < 0.0 ? -mag : mag;
}

/// [d_opp, angle_opp, d_obs, angle_obs] as seen by `self`.
///
/// The pursuer bears on the evader; the evader bears on the pursuer. Obstacle
/// distance is the signed surface distance to the nearest sphere; with no
/// obstacles it reads max sensing range at bearing pi.
inline AgentRuleBase::Input extract_inputs(const AgentState& self, const AgentState& opponent, const Arena& arena,
                                           Role /*role*/) {
  const Vec3 h = direction(self.heading);
  const Vec3 to_opp = opponent.position - self.position;
  const auto near = nearest_obstacle(self.position, arena);
  const double obs_angle = near.obstacle ? signed_bearing(h, near.obstacle->center - self.position) : kPi;
  return {norm(to_opp), signed_bearing(h, to_opp), near.distance, obs_angle};
}

}  // namespace pegfacl
