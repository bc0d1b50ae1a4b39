#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pegfacl/harness.hpp"

using namespace pegfacl;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("pegfacl_harness_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TrainConfig small_config(int episodes, int max_plays) {
  TrainConfig c;
  c.episodes = episodes;
  c.max_plays = max_plays;
  c.seed = 11;
  return c;
}

}  // namespace

TEST(RunEpisode, FrozenZeroPolicyRunsStraight) {
  TrainConfig c = small_config(1, 3);
  c.arena.steering = SteeringMode::incremental;
  Scenario s = builtin_scenarios()[1];
  s.obstacles.random = false;
  const auto rules = build_default_partitions();
  std::array<LearnerParams, 2> learners{c.learner.make(rules.rule_count()), c.learner.make(rules.rule_count())};
  EpisodeOptions opt;
  opt.max_plays = 3;
  opt.explore = false;
  opt.learn = {false, false};
  Rng rng = make_rng(1, Stream::training, 1);
  const auto start = initial_states(s, c);
  const auto log = run_episode(rules, learners, c.arena, start, opt, rng);
  ASSERT_EQ(log.steps.size(), 3u);
  EXPECT_EQ(log.summary.outcome, Outcome::timeout);
  for (std::size_t i = 0; i < 2; ++i) {
    const Vec3 dir = direction(start[i].heading);
    for (const auto& st : log.steps) {
      const Vec3 moved = st.agents[i].state.position - start[i].position;
      EXPECT_LT(norm(cross(moved, dir)), 1e-12);
      EXPECT_NEAR(norm(moved), start[i].speed * st.time, 1e-12);
    }
  }
  EXPECT_NEAR(log.summary.path_length[0], 3 * 0.11, 1e-12);
  EXPECT_EQ(learners[0].critic_zeta, std::vector<double>(625, 0.0));
}

TEST(RunEpisode, CoLocatedStartCapturesAtTimeZero) {
  TrainConfig c = small_config(1, 100);
  Scenario s;
  s.pursuer_start = {10, 10, 5};
  s.evader_start = {10.5, 10, 5};
  s.obstacles.random = false;
  const auto r = train_in_memory(s, c);
  ASSERT_EQ(r.summaries.size(), 1u);
  EXPECT_EQ(r.summaries[0].outcome, Outcome::captured);
  EXPECT_EQ(r.summaries[0].steps, 0);
  EXPECT_EQ(r.summaries[0].capture_time, 0.0);

  const auto m = evaluate(r.learners, s, c, 20, 3);
  EXPECT_EQ(m.capture_rate, 1.0);
  EXPECT_EQ(m.capture_time.mean, 0.0);
  EXPECT_EQ(m.capture_time.n, 20);
}

TEST(RunEpisode, TimeLimitStopsAtMaxTime) {
  TrainConfig c = small_config(1, 100000);
  c.arena.max_time = 2.0;
  c.speed_pursuer = 0.0;  // cannot close the gap
  c.learner = LearnerConfig{};
  Scenario s = builtin_scenarios()[0];
  s.obstacles.random = false;
  const auto r = train_in_memory(s, c);
  EXPECT_EQ(r.summaries[0].outcome, Outcome::timeout);
  EXPECT_EQ(r.summaries[0].steps, 20);
}

TEST(Train, EpisodesEndAndRespectStepCap) {
  TrainConfig c = small_config(15, 50);
  const auto r = train_in_memory(builtin_scenarios()[0], c);
  ASSERT_EQ(r.summaries.size(), 15u);
  for (const auto& s : r.summaries) {
    EXPECT_NE(s.outcome, Outcome::running);
    EXPECT_LE(s.steps, 50);
    if (s.outcome == Outcome::captured) {
      EXPECT_LE(s.final_distance, 1.0);
      ASSERT_TRUE(s.capture_time.has_value());
    }
  }
}

TEST(Train, FreezeKeepsWeightsAtZero) {
  TrainConfig c = small_config(3, 100);
  c.freeze = Freeze::pursuer;
  const auto r = train_in_memory(builtin_scenarios()[2], c);
  EXPECT_EQ(r.learners[kPursuer].critic_zeta, std::vector<double>(625, 0.0));
  EXPECT_EQ(r.learners[kPursuer].actor_w[0], std::vector<double>(625, 0.0));
  double moved = 0.0;
  for (double z : r.learners[kEvader].critic_zeta) moved += std::abs(z);
  EXPECT_GT(moved, 0.0);
}

TEST(Train, WritesDeterministicRunDirectory) {
  const TrainConfig c = small_config(4, 200);
  const auto a = scratch_dir("a"), b = scratch_dir("b");
  const auto ma = train(builtin_scenarios()[0], c, a);
  train(builtin_scenarios()[0], c, b);
  for (const char* f : {"episodes.csv", "checkpoint.json", "manifest.json", "logs/episode_0004.json"}) {
    ASSERT_TRUE(fs::exists(a / f)) << f;
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  EXPECT_EQ(ma.logs, std::vector<std::string>{"logs/episode_0004.json"});

  std::stringstream rows(slurp(a / "episodes.csv"));
  std::string line;
  int n = 0;
  while (std::getline(rows, line)) ++n;
  EXPECT_EQ(n, 2 + 4);

  const auto manifest = read_json_file(a / "manifest.json");
  EXPECT_EQ(manifest.at("schema"), kManifestSchema);
  EXPECT_EQ(manifest.at("seed"), 11);
  EXPECT_EQ(manifest.at("episodes").size(), 4u);

  const auto ckpt = load_checkpoint(a / "checkpoint.json");
  const auto [cfg, scen] = config_from_checkpoint(ckpt);
  EXPECT_EQ(cfg.episodes, 4);
  EXPECT_EQ(scen.pursuer_start, builtin_scenarios()[0].pursuer_start);

  TrainConfig other = c;
  other.seed = 12;
  const auto d = scratch_dir("d");
  train(builtin_scenarios()[0], other, d);
  EXPECT_NE(slurp(a / "episodes.csv"), slurp(d / "episodes.csv"));
}

TEST(Train, LogEveryWritesPeriodicLogs) {
  TrainConfig c = small_config(5, 30);
  c.log_every = 2;
  const auto dir = scratch_dir("log_every");
  const auto m = train(builtin_scenarios()[1], c, dir);
  EXPECT_EQ(m.logs, (std::vector<std::string>{"logs/episode_0002.json", "logs/episode_0004.json",
                                              "logs/episode_0005.json"}));
  const auto log = log_from_json(read_json_file(dir / "logs/episode_0002.json"));
  EXPECT_EQ(log.episode, 2);
  EXPECT_EQ(static_cast<int>(log.steps.size()), log.summary.steps);
}

TEST(Evaluate, AggregatesRuns) {
  TrainConfig c = small_config(2, 100);
  const auto r = train_in_memory(builtin_scenarios()[3], c);
  const auto m = evaluate(r.learners, builtin_scenarios()[3], c, 20, 5);
  EXPECT_EQ(m.runs, 20);
  EXPECT_EQ(m.episodes.size(), 20u);
  EXPECT_EQ(m.final_distance.n, 20);
  EXPECT_EQ(m.path_length[0].n, 20);
  EXPECT_EQ(m.capture_time.n, m.captures);
  EXPECT_NEAR(m.capture_rate, m.captures / 20.0, 1e-15);
  EXPECT_LE(m.max_episode_time, c.arena.max_time);

  const auto again = evaluate(r.learners, builtin_scenarios()[3], c, 20, 5);
  EXPECT_EQ(again.episodes, m.episodes);
  EXPECT_THROW(evaluate(r.learners, builtin_scenarios()[3], c, 0, 5), ConfigError);

  auto bad = r.learners;
  bad[1] = LearnerParams::zeros(16);
  EXPECT_THROW(evaluate(bad, builtin_scenarios()[3], c, 1, 5), LayoutMismatch);
}

TEST(MeanStd, SampleStatistics) {
  const auto m = mean_std({2, 4, 4, 4, 5, 5, 7, 9});
  EXPECT_DOUBLE_EQ(m.mean, 5.0);
  EXPECT_NEAR(m.stddev, 2.138089935299395, 1e-12);
  EXPECT_EQ(mean_std({}).n, 0);
  EXPECT_EQ(mean_std({3.0}).stddev, 0.0);
}

TEST(Train, PursuerRewardTrendsUpwardInScenarioOne) {
  int positive = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    TrainConfig c;
    c.seed = seed;
    const auto r = train_in_memory(builtin_scenarios()[0], c);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(r.summaries.size());
    for (std::size_t i = 0; i < r.summaries.size(); ++i) {
      const double x = static_cast<double>(i), y = r.summaries[i].total_reward[kPursuer];
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    positive += slope > 0.0 ? 1 : 0;
  }
  EXPECT_GE(positive, 4);
}

TEST(Evaluate, FrozenPursuerDoesNotBeatTrainedPursuer) {
  const auto& s = builtin_scenarios()[0];
  TrainConfig c;
  c.seed = 2;
  const auto trained = train_in_memory(s, c);
  TrainConfig f = c;
  f.freeze = Freeze::pursuer;
  const auto frozen = train_in_memory(s, f);
  const auto mt = evaluate(trained.learners, s, c, 20, 2);
  const auto mf = evaluate(frozen.learners, s, f, 20, 2);
  EXPECT_LE(mf.capture_rate, mt.capture_rate);
}
