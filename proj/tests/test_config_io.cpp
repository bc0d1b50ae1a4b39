#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pegfacl/harness.hpp"

using namespace pegfacl;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("pegfacl_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) out.push_back(line);
  return out;
}

EpisodeLog short_episode(int max_plays) {
  TrainConfig c;
  Scenario s = builtin_scenarios()[0];
  s.obstacles.random = false;
  s.obstacles.fixed = {{{20, 20, 10}, 1.0}};
  const auto rules = build_default_partitions();
  std::array<LearnerParams, 2> learners{c.learner.make(rules.rule_count()), c.learner.make(rules.rule_count())};
  Arena arena = c.arena;
  arena.obstacles = s.obstacles.fixed;
  EpisodeOptions opt;
  opt.max_plays = max_plays;
  Rng rng = make_rng(5, Stream::training, 1);
  auto log = run_episode(rules, learners, arena, initial_states(s, c), opt, rng);
  log.seed = 5;
  log.episode = 1;
  log.summary.episode = 1;
  return log;
}

}  // namespace

TEST(Config, ReadsIniFile) {
  const auto dir = scratch_dir("ini");
  const auto path = dir / "run.ini";
  std::ofstream(path) << "; comment\n[train]\nepisodes = 7\nseed = 42\nfreeze = evader\n"
                         "[arena]\nsteering_mode = incremental\ndt = 0.05\n"
                         "[scenario]\npursuer_start = 1,2,3\nobstacles = 10,10,5,1.5;20,20,5,1\n";
  TrainConfig c;
  Scenario s;
  load_config_file(path, c, s);
  EXPECT_EQ(c.episodes, 7);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.freeze, Freeze::evader);
  EXPECT_EQ(c.arena.steering, SteeringMode::incremental);
  EXPECT_EQ(c.arena.dt, 0.05);
  EXPECT_EQ(s.pursuer_start, (Vec3{1, 2, 3}));
  ASSERT_FALSE(s.obstacles.random);
  ASSERT_EQ(s.obstacles.fixed.size(), 2u);
  EXPECT_EQ(s.obstacles.fixed[0], (Obstacle{{10, 10, 5}, 1.5}));
  EXPECT_EQ(c.max_plays, 1000);  // untouched keys keep defaults
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  const auto dir = scratch_dir("bad_ini");
  const auto path = dir / "bad.ini";
  std::ofstream(path) << "[train]\nepisode = 7\n";
  TrainConfig c;
  Scenario s;
  try {
    load_config_file(path, c, s);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.ini"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("train.episode"), std::string::npos);
  }
  EXPECT_THROW(apply_key_values({{"train.episodes", "lots"}}, c, s), ConfigError);
  EXPECT_THROW(apply_key_values({{"arena.steering_mode", "sideways"}}, c, s), ConfigError);
  EXPECT_THROW(apply_key_values({{"scenario.obstacles", "1,2,3"}}, c, s), ConfigError);
  EXPECT_THROW(load_config_file(dir / "missing.ini", c, s), ConfigError);
}

TEST(Config, KeyValueRoundTrip) {
  TrainConfig c;
  c.episodes = 12;
  c.seed = 77;
  c.freeze = Freeze::pursuer;
  c.arena.steering = SteeringMode::absolute;
  c.reward.w_a = 3.25;
  Scenario s = builtin_scenarios()[2];
  s.obstacles.random = false;
  s.obstacles.fixed = {{{10, 12, 4}, 2.0}};
  const auto kv = to_key_values(c, s);

  TrainConfig c2;
  Scenario s2;
  apply_key_values(kv, c2, s2);
  EXPECT_EQ(to_key_values(c2, s2), kv);
  EXPECT_EQ(c2.episodes, 12);
  EXPECT_EQ(c2.freeze, Freeze::pursuer);
  EXPECT_EQ(s2.obstacles.fixed, s.obstacles.fixed);
}

TEST(Config, ValidationErrors) {
  TrainConfig c;
  EXPECT_NO_THROW(c.validate());
  c.episodes = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = TrainConfig{};
  c.learner.alpha_a = 0.1;
  EXPECT_THROW(c.validate(), ConfigError);

  Scenario s = builtin_scenarios()[0];
  s.pursuer_start = {40, 0, 0};
  EXPECT_THROW(validate_scenario(s, Arena{}), ConfigError);
  s = builtin_scenarios()[0];
  s.obstacles.random = false;
  s.obstacles.fixed = {{s.evader_start, 1.0}};
  EXPECT_THROW(validate_scenario(s, Arena{}), ConfigError);
}

TEST(Scenarios, BuiltinsAndResolve) {
  const auto& all = builtin_scenarios();
  ASSERT_EQ(all.size(), 4u);
  EXPECT_EQ(all[0].pursuer_start, (Vec3{5, 30, 0}));
  EXPECT_EQ(all[0].evader_start, (Vec3{5, 5, 0}));
  EXPECT_EQ(all[3].pursuer_start, all[2].pursuer_start);
  EXPECT_EQ(resolve_scenario("2").evader_start, (Vec3{30, 30, 0}));
  EXPECT_THROW(resolve_scenario("9"), ConfigError);

  const auto dir = scratch_dir("scenario");
  std::ofstream(dir / "corner.ini") << "[scenario]\npursuer_start = 1,1,1\nevader_start = 2,2,2\nobstacles = none\n";
  const auto s = resolve_scenario((dir / "corner.ini").string());
  EXPECT_EQ(s.name, "corner");
  EXPECT_EQ(s.evader_start, (Vec3{2, 2, 2}));
  EXPECT_FALSE(s.obstacles.random);
  EXPECT_TRUE(s.obstacles.fixed.empty());
}

TEST(Obstacles, PlacementRespectsClearance) {
  const Scenario s = builtin_scenarios()[1];
  const Arena arena;
  for (std::uint64_t ep = 0; ep < 50; ++ep) {
    Rng rng = make_rng(3, Stream::obstacles, ep);
    const auto obs = place_obstacles(s, arena, rng);
    ASSERT_EQ(obs.size(), 3u);
    for (const auto& o : obs) {
      EXPECT_TRUE(arena.contains(o));
      EXPECT_GE(surface_distance(s.pursuer_start, o), 3.0);
      EXPECT_GE(surface_distance(s.evader_start, o), 3.0);
    }
  }
  Rng a = make_rng(3, Stream::obstacles, 4), b = make_rng(3, Stream::obstacles, 4), c = make_rng(3, Stream::obstacles, 5);
  EXPECT_EQ(place_obstacles(s, arena, a), place_obstacles(s, arena, b));
  Rng a2 = make_rng(3, Stream::obstacles, 4);
  EXPECT_NE(place_obstacles(s, arena, a2), place_obstacles(s, arena, c));
}

TEST(EpisodeLogJson, RoundTripIsExact) {
  const auto log = short_episode(25);
  ASSERT_EQ(log.steps.size(), 25u);
  const auto back = log_from_json(json::parse(log_to_json(log).dump()));
  EXPECT_EQ(back, log);

  auto bad = log_to_json(log);
  bad["schema"] = "something/2";
  EXPECT_THROW(log_from_json(bad), SchemaError);
}

TEST(Checkpoint, RoundTripAndLayoutCheck) {
  const auto rules = build_default_partitions();
  Checkpoint c;
  c.seed = 9;
  c.config = to_key_values(TrainConfig{}, builtin_scenarios()[0]);
  for (auto& l : c.learners) l = LearnerParams::zeros(rules.rule_count());
  c.learners[0].actor_w[1][17] = 0.125;
  c.learners[1].critic_zeta[600] = -3.5;
  const auto j = json::parse(checkpoint_to_json(c, rules).dump());
  const auto back = checkpoint_from_json(j, rules);
  EXPECT_EQ(back.seed, 9u);
  EXPECT_EQ(back.config, c.config);
  EXPECT_EQ(back.learners[0].actor_w, c.learners[0].actor_w);
  EXPECT_EQ(back.learners[1].critic_zeta, c.learners[1].critic_zeta);

  // A rule base with a different partition must be rejected.
  const auto other = AgentRuleBase({InputPartition::evenly_spaced(0, 40, 5), InputPartition::evenly_spaced(-kPi, kPi, 5),
                                    InputPartition::evenly_spaced(0, 35, 5), InputPartition::evenly_spaced(-kPi, kPi, 5)});
  EXPECT_THROW(checkpoint_from_json(j, other), LayoutMismatch);

  auto truncated = j;
  truncated["agents"]["evader"]["critic"].erase(0);
  EXPECT_THROW(checkpoint_from_json(truncated, rules), LayoutMismatch);
}

TEST(Csv, TrajectoryRowsPerStep) {
  const auto log = short_episode(3);
  ASSERT_EQ(log.summary.steps, 3);
  ASSERT_EQ(log.summary.outcome, Outcome::timeout);
  const auto rows = lines(trajectory_csv(log));
  ASSERT_EQ(rows.size(), 2u + 6u);
  EXPECT_EQ(rows[0], "# schema: pegfacl.trajectory/1");
  EXPECT_EQ(rows[1], "t,agent,x,y,z");
  EXPECT_EQ(rows[2].rfind("0.1,pursuer,", 0), 0u);
  EXPECT_EQ(rows[7].rfind("0.30000000000000004,evader,", 0), 0u);
  EXPECT_EQ(lines(series_csv(log)).size(), 2u + 6u);
  const auto metrics = lines(metrics_csv(log));
  ASSERT_EQ(metrics.size(), 3u);
  EXPECT_EQ(metrics[0], "# schema: pegfacl.metrics/1");
  EXPECT_EQ(metrics[2].rfind("1,timeout,3,", 0), 0u);
}

TEST(Csv, EmptyEpisodeWritesTerminalRow) {
  EpisodeLog log;
  log.initial = {AgentState{{1, 2, 3}, {}, 1.1}, AgentState{{1.5, 2, 3}, {}, 1.0}};
  log.summary.outcome = Outcome::captured;
  log.summary.capture_time = 0.0;
  const auto rows = lines(trajectory_csv(log));
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[2], "0,pursuer,1,2,3");
  EXPECT_EQ(rows[3], "0,evader,1.5,2,3");
  EXPECT_EQ(lines(series_csv(log)).size(), 2u);
}

TEST(Export, WritesFilesForBothFormats) {
  const auto dir = scratch_dir("export");
  const auto log = short_episode(10);
  const auto csv = export_log(log, ExportFormat::csv, dir / "csv");
  ASSERT_EQ(csv.size(), 3u);
  for (const auto& p : csv) EXPECT_TRUE(fs::exists(p));
  const auto js = export_log(log, ExportFormat::json, dir / "json");
  ASSERT_EQ(js.size(), 1u);
  EXPECT_EQ(log_from_json(read_json_file(js[0])), log);
  EXPECT_THROW(read_json_file(dir / "nope.json"), IoError);
  std::ofstream(dir / "garbage.json") << "{not json";
  EXPECT_THROW(read_json_file(dir / "garbage.json"), IoError);
  EXPECT_EQ(slurp(csv[0]), trajectory_csv(log));
}
