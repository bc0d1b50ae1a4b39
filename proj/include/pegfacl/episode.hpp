#pragma once

// One pursuit-evasion episode: both agents sense, act and learn from the same
// simultaneous transition.

#include <optional>
#include <random>

#include "pegfacl/config.hpp"

namespace pegfacl {

using Rng = std::mt19937_64;

enum class Stream : std::uint64_t { training = 1, obstacles = 2, evaluation = 3, evaluation_obstacles = 4 };

/// Independent generator for (seed, stream, index).
inline Rng make_rng(std::uint64_t seed, Stream stream, std::uint64_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

/// Uniform obstacle centers inside the arena, redrawn while closer than the
/// clearance to either start.
inline std::vector<Obstacle> place_obstacles(const Scenario& s, const Arena& arena, Rng& rng) {
  if (!s.obstacles.random) return s.obstacles.fixed;
  const double r = s.obstacles.radius;
  std::uniform_real_distribution<double> ux(r, arena.extents.x - r);
  std::uniform_real_distribution<double> uy(r, arena.extents.y - r);
  std::uniform_real_distribution<double> uz(r, arena.extents.z - r);
  std::vector<Obstacle> out;
  constexpr int kMaxAttempts = 10000;
  for (int k = 0; k < s.obstacles.count; ++k) {
    int attempts = 0;
    for (;;) {
      if (++attempts > kMaxAttempts) throw ConfigError("could not place obstacles clear of the start positions");
      Obstacle o{{ux(rng), uy(rng), uz(rng)}, r};
      if (surface_distance(s.pursuer_start, o) >= s.obstacles.start_clearance &&
          surface_distance(s.evader_start, o) >= s.obstacles.start_clearance) {
        out.push_back(o);
        break;
      }
    }
  }
  return out;
}

/// Pursuer faces the evader, the evader faces directly away from the pursuer.
inline std::array<AgentState, 2> initial_states(const Scenario& s, const TrainConfig& c) {
  const Vec3 los = s.evader_start - s.pursuer_start;
  const Heading h = heading_towards(los);
  return {AgentState{s.pursuer_start, h, c.speed_pursuer}, AgentState{s.evader_start, h, c.speed_evader}};
}

inline constexpr std::size_t kPursuer = 0;
inline constexpr std::size_t kEvader = 1;

struct AgentStep {
  AgentState state;  // after the step
  Action action;
  double reward = 0.0;
  double td_error = 0.0;
  double entropy = 0.0;  // of the firing vector the action was taken from
  bool collision = false;

  friend bool operator==(const AgentStep&, const AgentStep&) = default;
};

struct StepLog {
  int index = 0;  // 1-based step number
  double time = 0.0;
  std::array<AgentStep, 2> agents;

  friend bool operator==(const StepLog&, const StepLog&) = default;
};

struct EpisodeSummary {
  int episode = 0;
  Outcome outcome = Outcome::running;
  int steps = 0;
  double final_distance = 0.0;
  std::optional<double> capture_time;
  std::array<double, 2> path_length{};
  std::array<double, 2> min_clearance{};
  std::array<double, 2> cone_compliance{};
  std::array<int, 2> collisions{};
  std::array<double, 2> total_reward{};

  friend bool operator==(const EpisodeSummary&, const EpisodeSummary&) = default;
};

struct EpisodeLog {
  std::uint64_t seed = 0;
  int episode = 0;
  std::array<AgentState, 2> initial;
  std::vector<Obstacle> obstacles;
  std::vector<StepLog> steps;
  EpisodeSummary summary;

  friend bool operator==(const EpisodeLog&, const EpisodeLog&) = default;
};

struct EpisodeOptions {
  int max_plays = 1000;
  bool explore = true;
  std::array<bool, 2> learn{true, true};
  bool record_steps = true;
  RewardConfig reward;
};

/// Runs until capture, time limit, or the step cap. Capture is checked before
/// the first move so co-located starts end with zero steps.
inline EpisodeLog run_episode(const AgentRuleBase& rules, std::array<LearnerParams, 2>& learners, const Arena& arena,
                              const std::array<AgentState, 2>& start, const EpisodeOptions& opt, Rng& rng) {
  EpisodeLog log;
  log.initial = start;
  log.obstacles = arena.obstacles;
  auto& sum = log.summary;

  std::array<AgentState, 2> s = start;
  constexpr std::array<Role, 2> roles{Role::pursuer, Role::evader};
  const double v_p = s[kPursuer].speed;
  const double v_e = s[kEvader].speed;
  // Without a speed advantage the pursuit cone degenerates to the forward hemisphere.
  const double cone = (v_e > 0.0 && v_e < v_p) ? pursuit_cone_halfangle(v_p, v_e) : kPi / 2.0;
  std::array<int, 2> compliant{};

  for (std::size_t i = 0; i < 2; ++i) sum.min_clearance[i] = nearest_obstacle(s[i].position, arena).distance;

  std::array<FiringVector, 2> phi;
  for (std::size_t i = 0; i < 2; ++i) rules.fire_into(extract_inputs(s[i], s[1 - i], arena, roles[i]), phi[i]);

  Outcome outcome = check_termination(s[kPursuer], s[kEvader], arena, 0.0);
  int step = 0;
  std::array<FiringVector, 2> phi_next;
  while (outcome == Outcome::running) {
    if (step >= opt.max_plays || (step + 1) * arena.dt > arena.max_time) {
      outcome = Outcome::timeout;
      break;
    }
    std::array<Action, 2> act_now;
    for (std::size_t i = 0; i < 2; ++i)
      act_now[i] = opt.explore ? act(learners[i], phi[i], rng) : act_greedy(learners[i], phi[i]);

    // Line of sight from pursuer to evader: the pursuer's reference heading and
    // the evader's escape direction.
    const Vec3 los = s[kEvader].position - s[kPursuer].position;
    std::array<AgentState, 2> next;
    for (std::size_t i = 0; i < 2; ++i)
      next[i] = step_agent(s[i], {act_now[i].u_noisy[0], act_now[i].u_noisy[1]}, arena, los);

    ++step;
    const double elapsed = step * arena.dt;
    outcome = check_termination(next[kPursuer], next[kEvader], arena, elapsed);
    const bool captured = outcome == Outcome::captured;

    StepLog rec;
    rec.index = step;
    rec.time = elapsed;
    for (std::size_t i = 0; i < 2; ++i) {
      const std::size_t j = 1 - i;
      const auto tr = make_transition(s[i].position, next[i].position, s[j].position, next[j].position, arena, captured);
      const double r = total_reward(tr, roles[i], opt.reward);
      rules.fire_into(extract_inputs(next[i], next[j], arena, roles[i]), phi_next[i]);
      // Only capture is a true terminal state; hitting the time limit bootstraps.
      const double delta = td_error(learners[i], phi[i], phi_next[i], r, captured);
      if (opt.learn[i]) {
        update_critic(learners[i], phi[i], delta);
        update_actor(learners[i], phi[i], act_now[i], delta);
      }

      auto& a = rec.agents[i];
      a.state = next[i];
      a.action = act_now[i];
      a.reward = r;
      a.td_error = delta;
      a.entropy = firing_entropy(phi[i]);
      a.collision = collision_check(next[i].position, arena);

      sum.path_length[i] += distance(s[i].position, next[i].position);
      sum.min_clearance[i] = std::min(sum.min_clearance[i], nearest_obstacle(next[i].position, arena).distance);
      sum.collisions[i] += a.collision ? 1 : 0;
      sum.total_reward[i] += r;
    }

    if (norm(los) == 0.0) {
      compliant[kPursuer] += 1;
      compliant[kEvader] += 1;
    } else {
      compliant[kPursuer] += angle_between(direction(next[kPursuer].heading), los) <= cone ? 1 : 0;
      compliant[kEvader] += angle_between(direction(next[kEvader].heading), -los) >= kPi / 2.0 ? 1 : 0;
    }

    if (opt.record_steps) log.steps.push_back(rec);
    s = next;
    std::swap(phi, phi_next);
  }

  sum.outcome = outcome;
  sum.steps = step;
  sum.final_distance = distance(s[kPursuer].position, s[kEvader].position);
  if (outcome == Outcome::captured) sum.capture_time = step * arena.dt;
  for (std::size_t i = 0; i < 2; ++i)
    sum.cone_compliance[i] = step > 0 ? static_cast<double>(compliant[i]) / step : 1.0;
  return log;
}

}  // namespace pegfacl
