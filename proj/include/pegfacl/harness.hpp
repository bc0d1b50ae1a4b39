#pragma once

// Training and evaluation drivers, plus the on-disk run layout:
//
//   <out>/manifest.json     config snapshot, seed, per-episode summaries, file references
//   <out>/episodes.csv      one summary row per episode
//   <out>/checkpoint.json   final weights of both agents
//   <out>/logs/episode_NNNN.json   full step logs (final episode, plus every log_every-th)

#include <cmath>
#include <functional>

#include "pegfacl/io.hpp"

namespace pegfacl {

struct TrainResult {
  std::array<LearnerParams, 2> learners;
  std::vector<EpisodeSummary> summaries;
};

using EpisodeCallback = std::function<void(const EpisodeLog&)>;

inline Arena arena_for(const Scenario& s, const TrainConfig& c, Rng& obstacle_rng) {
  Arena arena = c.arena;
  arena.obstacles = place_obstacles(s, arena, obstacle_rng);
  return arena;
}

inline bool wants_log(const TrainConfig& c, int episode) {
  return episode == c.episodes || (c.log_every > 0 && episode % c.log_every == 0);
}

/// Self-play training from zero weights. Obstacles are redrawn every episode when
/// the scenario asks for random placement. Deterministic in (scenario, config).
inline TrainResult train_in_memory(const Scenario& scenario, const TrainConfig& config,
                                   const EpisodeCallback& on_episode = {}) {
  config.validate();
  validate_scenario(scenario, config.arena);
  const auto rules = build_default_partitions();
  TrainResult result;
  for (auto& l : result.learners) l = config.learner.make(rules.rule_count());

  EpisodeOptions opt;
  opt.max_plays = config.max_plays;
  opt.explore = true;
  opt.learn = {config.freeze != Freeze::pursuer, config.freeze != Freeze::evader};
  opt.reward = config.reward;

  const auto start = initial_states(scenario, config);
  for (int ep = 1; ep <= config.episodes; ++ep) {
    Rng obstacle_rng = make_rng(config.seed, Stream::obstacles, static_cast<std::uint64_t>(ep));
    const Arena arena = arena_for(scenario, config, obstacle_rng);
    Rng rng = make_rng(config.seed, Stream::training, static_cast<std::uint64_t>(ep));
    opt.record_steps = static_cast<bool>(on_episode) && wants_log(config, ep);
    auto log = run_episode(rules, result.learners, arena, start, opt, rng);
    log.seed = config.seed;
    log.episode = ep;
    log.summary.episode = ep;
    result.summaries.push_back(log.summary);
    if (on_episode) on_episode(log);
  }
  return result;
}

struct RunManifest {
  std::uint64_t seed = 0;
  KeyValues config;
  std::vector<EpisodeSummary> episodes;
  std::vector<std::string> checkpoints;
  std::vector<std::string> logs;
};

inline json manifest_to_json(const RunManifest& m) {
  return {{"schema", kManifestSchema}, {"version", PEGFACL_VERSION}, {"seed", m.seed},
          {"config", m.config},        {"episodes_csv", "episodes.csv"}, {"episodes", m.episodes},
          {"checkpoints", m.checkpoints}, {"logs", m.logs}};
}

/// Trains and writes the run layout under `out_dir`. The episode CSV is appended
/// and flushed after every episode.
inline RunManifest train(const Scenario& scenario, const TrainConfig& config, const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir / "logs", ec);
  if (ec) throw IoError(out_dir.string() + ": " + ec.message());

  const fs::path csv_path = out_dir / "episodes.csv";
  std::ofstream csv(csv_path, std::ios::binary | std::ios::trunc);
  if (!csv) throw IoError(csv_path.string() + ": cannot open for writing");
  csv << episodes_csv_header();

  RunManifest manifest;
  manifest.seed = config.seed;
  manifest.config = to_key_values(config, scenario);

  auto result = train_in_memory(scenario, config, [&](const EpisodeLog& log) {
    csv << episodes_csv_row(log.summary);
    csv.flush();
    if (!csv) throw IoError(csv_path.string() + ": write failed");
    if (wants_log(config, log.episode)) {
      const auto name = fmt::format("logs/episode_{:04d}.json", log.episode);
      write_json_file(out_dir / name, log_to_json(log));
      manifest.logs.push_back(name);
    }
  });
  manifest.episodes = std::move(result.summaries);

  Checkpoint ckpt{config.seed, manifest.config, result.learners};
  write_json_file(out_dir / "checkpoint.json", checkpoint_to_json(ckpt, build_default_partitions()));
  manifest.checkpoints.push_back("checkpoint.json");
  write_json_file(out_dir / "manifest.json", manifest_to_json(manifest));
  return manifest;
}

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;
  int n = 0;
};

inline MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd m;
  m.n = static_cast<int>(xs.size());
  if (xs.empty()) return m;
  for (double x : xs) m.mean += x;
  m.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return m;
}

struct EvalMetrics {
  int runs = 0;
  int captures = 0;
  double capture_rate = 0.0;
  MeanStd capture_time;  // over captured runs only
  std::array<MeanStd, 2> path_length;
  MeanStd final_distance;
  double max_capture_distance = 0.0;  // largest terminal distance among captures
  int collision_runs = 0;             // runs where either agent entered an obstacle
  std::array<int, 2> collision_steps{};
  double max_episode_time = 0.0;
  std::vector<EpisodeSummary> episodes;
};

/// Noise-free, non-learning rollouts. Each run draws its own obstacle layout
/// from (seed, run) when the scenario uses random placement.
inline EvalMetrics evaluate(const std::array<LearnerParams, 2>& learners, const Scenario& scenario,
                            const TrainConfig& config, int runs, std::uint64_t seed) {
  if (runs < 1) throw ConfigError("evaluate: runs must be >= 1");
  config.validate();
  validate_scenario(scenario, config.arena);
  const auto rules = build_default_partitions();
  for (const auto& l : learners)
    if (l.rule_count() != rules.rule_count()) throw LayoutMismatch("evaluate: weights do not match the rule base");

  EpisodeOptions opt;
  opt.max_plays = config.max_plays;
  opt.explore = false;
  opt.learn = {false, false};
  opt.record_steps = false;
  opt.reward = config.reward;

  EvalMetrics m;
  m.runs = runs;
  std::vector<double> times, final_d;
  std::array<std::vector<double>, 2> paths;
  const auto start = initial_states(scenario, config);
  for (int run = 0; run < runs; ++run) {
    Rng obstacle_rng = make_rng(seed, Stream::evaluation_obstacles, static_cast<std::uint64_t>(run));
    const Arena arena = arena_for(scenario, config, obstacle_rng);
    Rng rng = make_rng(seed, Stream::evaluation, static_cast<std::uint64_t>(run));
    auto frozen = learners;
    auto log = run_episode(rules, frozen, arena, start, opt, rng);
    log.summary.episode = run + 1;
    const auto& s = log.summary;
    if (s.outcome == Outcome::captured) {
      ++m.captures;
      times.push_back(*s.capture_time);
      m.max_capture_distance = std::max(m.max_capture_distance, s.final_distance);
    }
    final_d.push_back(s.final_distance);
    for (std::size_t i = 0; i < 2; ++i) {
      paths[i].push_back(s.path_length[i]);
      m.collision_steps[i] += s.collisions[i];
    }
    if (s.collisions[0] + s.collisions[1] > 0) ++m.collision_runs;
    m.max_episode_time = std::max(m.max_episode_time, s.steps * config.arena.dt);
    m.episodes.push_back(s);
  }
  m.capture_rate = static_cast<double>(m.captures) / runs;
  m.capture_time = mean_std(times);
  m.final_distance = mean_std(final_d);
  for (std::size_t i = 0; i < 2; ++i) m.path_length[i] = mean_std(paths[i]);
  return m;
}

inline json metrics_to_json(const EvalMetrics& m) {
  auto ms = [](const MeanStd& v) { return json{{"mean", v.mean}, {"std", v.stddev}, {"n", v.n}}; };
  return {{"runs", m.runs},
          {"captures", m.captures},
          {"capture_rate", m.capture_rate},
          {"capture_time", ms(m.capture_time)},
          {"path_length", {{"pursuer", ms(m.path_length[0])}, {"evader", ms(m.path_length[1])}}},
          {"final_distance", ms(m.final_distance)},
          {"max_capture_distance", m.max_capture_distance},
          {"collision_runs", m.collision_runs},
          {"collision_steps", m.collision_steps},
          {"max_episode_time", m.max_episode_time}};
}

/// Rebuilds the training config and scenario stored in a checkpoint.
inline std::pair<TrainConfig, Scenario> config_from_checkpoint(const Checkpoint& c) {
  TrainConfig config;
  Scenario scenario;
  apply_key_values(c.config, config, scenario);
  return {config, scenario};
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
  try {
    return checkpoint_from_json(read_json_file(path), build_default_partitions());
  } catch (const json::exception& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

}  // namespace pegfacl
