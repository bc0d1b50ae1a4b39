#pragma once

// JSON documents (episode logs, checkpoints) and CSV exports. Every file carries
// a schema tag; CSV files put it on a leading `# schema:` line.

#include <fstream>

#include <nlohmann/json.hpp>

#include "pegfacl/episode.hpp"

namespace pegfacl {

#define PEGFACL_VERSION "0.1.0"

inline constexpr const char* kLogSchema = "pegfacl.episode_log/1";
inline constexpr const char* kCheckpointSchema = "pegfacl.checkpoint/1";
inline constexpr const char* kManifestSchema = "pegfacl.manifest/1";
inline constexpr const char* kEpisodesCsvSchema = "pegfacl.episodes/1";
inline constexpr const char* kTrajectoryCsvSchema = "pegfacl.trajectory/1";
inline constexpr const char* kSeriesCsvSchema = "pegfacl.series/1";
inline constexpr const char* kMetricsCsvSchema = "pegfacl.metrics/1";

using nlohmann::json;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void to_json(json& j, const Vec3& v) { j = json::array({v.x, v.y, v.z}); }
inline void from_json(const json& j, Vec3& v) {
  if (!j.is_array() || j.size() != 3) throw SchemaError("expected [x, y, z]");
  v = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline void to_json(json& j, const AgentState& s) {
  j = {{"position", s.position}, {"alpha", s.heading.alpha}, {"theta", s.heading.theta}, {"speed", s.speed}};
}
inline void from_json(const json& j, AgentState& s) {
  s.position = j.at("position").get<Vec3>();
  s.heading.alpha = j.at("alpha").get<double>();
  s.heading.theta = j.at("theta").get<double>();
  s.speed = j.at("speed").get<double>();
}

inline void to_json(json& j, const Obstacle& o) { j = {{"center", o.center}, {"radius", o.radius}}; }
inline void from_json(const json& j, Obstacle& o) {
  o.center = j.at("center").get<Vec3>();
  o.radius = j.at("radius").get<double>();
}

inline Outcome outcome_from_string(const std::string& s) {
  if (s == "captured") return Outcome::captured;
  if (s == "timeout") return Outcome::timeout;
  if (s == "running") return Outcome::running;
  throw SchemaError("unknown outcome '" + s + "'");
}

inline void to_json(json& j, const EpisodeSummary& s) {
  j = {{"episode", s.episode},
       {"outcome", to_string(s.outcome)},
       {"steps", s.steps},
       {"final_distance", s.final_distance},
       {"capture_time", s.capture_time ? json(*s.capture_time) : json(nullptr)},
       {"path_length", s.path_length},
       {"min_clearance", s.min_clearance},
       {"cone_compliance", s.cone_compliance},
       {"collisions", s.collisions},
       {"total_reward", s.total_reward}};
}
inline void from_json(const json& j, EpisodeSummary& s) {
  s.episode = j.at("episode").get<int>();
  s.outcome = outcome_from_string(j.at("outcome").get<std::string>());
  s.steps = j.at("steps").get<int>();
  s.final_distance = j.at("final_distance").get<double>();
  const auto& ct = j.at("capture_time");
  s.capture_time = ct.is_null() ? std::nullopt : std::optional<double>(ct.get<double>());
  s.path_length = j.at("path_length").get<std::array<double, 2>>();
  s.min_clearance = j.at("min_clearance").get<std::array<double, 2>>();
  s.cone_compliance = j.at("cone_compliance").get<std::array<double, 2>>();
  s.collisions = j.at("collisions").get<std::array<int, 2>>();
  s.total_reward = j.at("total_reward").get<std::array<double, 2>>();
}

inline json agent_step_json(const AgentStep& a) {
  return {{"state", a.state}, {"u", a.action.u},           {"u_exec", a.action.u_noisy}, {"reward", a.reward},
          {"td_error", a.td_error}, {"entropy", a.entropy}, {"collision", a.collision}};
}
inline AgentStep agent_step_from_json(const json& j) {
  AgentStep a;
  a.state = j.at("state").get<AgentState>();
  a.action.u = j.at("u").get<Channels>();
  a.action.u_noisy = j.at("u_exec").get<Channels>();
  a.reward = j.at("reward").get<double>();
  a.td_error = j.at("td_error").get<double>();
  a.entropy = j.at("entropy").get<double>();
  a.collision = j.at("collision").get<bool>();
  return a;
}

inline json log_to_json(const EpisodeLog& log) {
  json steps = json::array();
  for (const auto& s : log.steps)
    steps.push_back({{"index", s.index},
                     {"time", s.time},
                     {"pursuer", agent_step_json(s.agents[kPursuer])},
                     {"evader", agent_step_json(s.agents[kEvader])}});
  return {{"schema", kLogSchema},
          {"seed", log.seed},
          {"episode", log.episode},
          {"initial", {{"pursuer", log.initial[kPursuer]}, {"evader", log.initial[kEvader]}}},
          {"obstacles", log.obstacles},
          {"steps", std::move(steps)},
          {"summary", log.summary}};
}

inline void require_schema(const json& j, const char* expected) {
  if (!j.is_object() || !j.contains("schema") || j.at("schema") != expected)
    throw SchemaError(std::string("expected schema ") + expected);
}

inline EpisodeLog log_from_json(const json& j) {
  require_schema(j, kLogSchema);
  EpisodeLog log;
  log.seed = j.at("seed").get<std::uint64_t>();
  log.episode = j.at("episode").get<int>();
  log.initial[kPursuer] = j.at("initial").at("pursuer").get<AgentState>();
  log.initial[kEvader] = j.at("initial").at("evader").get<AgentState>();
  log.obstacles = j.at("obstacles").get<std::vector<Obstacle>>();
  for (const auto& s : j.at("steps")) {
    StepLog rec;
    rec.index = s.at("index").get<int>();
    rec.time = s.at("time").get<double>();
    rec.agents[kPursuer] = agent_step_from_json(s.at("pursuer"));
    rec.agents[kEvader] = agent_step_from_json(s.at("evader"));
    log.steps.push_back(rec);
  }
  log.summary = j.at("summary").get<EpisodeSummary>();
  return log;
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string() + ": cannot open for reading");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError(path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out << text;
  if (!out) throw IoError(path.string() + ": write failed");
}

inline void write_json_file(const std::filesystem::path& path, const json& j) { write_text_file(path, j.dump(1) + "\n"); }

// ---------------------------------------------------------------------------
// Checkpoints

struct Checkpoint {
  std::uint64_t seed = 0;
  KeyValues config;
  std::array<LearnerParams, 2> learners;
};

inline json learner_json(const LearnerParams& p) {
  return {{"actor", p.actor_w},     {"critic", p.critic_zeta}, {"alpha_a", p.alpha_a},
          {"alpha_c", p.alpha_c},   {"gamma", p.gamma},        {"sigma_a", p.sigma_a}};
}

inline LearnerParams learner_from_json(const json& j) {
  LearnerParams p;
  p.actor_w = j.at("actor").get<std::array<std::vector<double>, kChannels>>();
  p.critic_zeta = j.at("critic").get<std::vector<double>>();
  p.alpha_a = j.at("alpha_a").get<double>();
  p.alpha_c = j.at("alpha_c").get<double>();
  p.gamma = j.at("gamma").get<double>();
  p.sigma_a = j.at("sigma_a").get<double>();
  p.validate();
  return p;
}

template <std::size_t N>
json rule_base_json(const RuleBase<N>& rules) {
  json inputs = json::array();
  for (const auto& part : rules.partitions())
    inputs.push_back({{"lo", part.lo()}, {"hi", part.hi()}, {"peaks", part.peaks()}});
  return {{"inputs", inputs}, {"rules", rules.rule_count()}};
}

inline json checkpoint_to_json(const Checkpoint& c, const AgentRuleBase& rules) {
  return {{"schema", kCheckpointSchema},
          {"version", PEGFACL_VERSION},
          {"seed", c.seed},
          {"config", c.config},
          {"rule_base", rule_base_json(rules)},
          {"agents", {{"pursuer", learner_json(c.learners[kPursuer])}, {"evader", learner_json(c.learners[kEvader])}}}};
}

/// Parses a checkpoint and checks it against the rule base it will drive.
inline Checkpoint checkpoint_from_json(const json& j, const AgentRuleBase& rules) {
  require_schema(j, kCheckpointSchema);
  if (j.at("rule_base") != rule_base_json(rules))
    throw LayoutMismatch("checkpoint rule-base layout does not match the configured partitions");
  Checkpoint c;
  c.seed = j.at("seed").get<std::uint64_t>();
  c.config = j.at("config").get<KeyValues>();
  c.learners[kPursuer] = learner_from_json(j.at("agents").at("pursuer"));
  c.learners[kEvader] = learner_from_json(j.at("agents").at("evader"));
  for (const auto& p : c.learners)
    if (p.rule_count() != rules.rule_count())
      throw LayoutMismatch("checkpoint weight vectors do not match the rule count");
  return c;
}

// ---------------------------------------------------------------------------
// CSV

namespace detail {
inline std::string csv_num(double v) { return fmt::format("{}", v); }
}  // namespace detail

inline std::string episodes_csv_header() {
  return fmt::format(
      "# schema: {}\n"
      "episode,outcome,steps,final_distance,capture_time,path_pursuer,path_evader,clearance_pursuer,"
      "clearance_evader,cone_pursuer,cone_evader,collisions_pursuer,collisions_evader,return_pursuer,return_evader\n",
      kEpisodesCsvSchema);
}

inline std::string episodes_csv_row(const EpisodeSummary& s) {
  using detail::csv_num;
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", s.episode, to_string(s.outcome), s.steps,
                     csv_num(s.final_distance), s.capture_time ? csv_num(*s.capture_time) : std::string{},
                     csv_num(s.path_length[0]), csv_num(s.path_length[1]), csv_num(s.min_clearance[0]),
                     csv_num(s.min_clearance[1]), csv_num(s.cone_compliance[0]), csv_num(s.cone_compliance[1]),
                     s.collisions[0], s.collisions[1], csv_num(s.total_reward[0]), csv_num(s.total_reward[1]));
}

/// Positions after every step. An episode with no steps writes its terminal
/// (= initial) positions as a single row at t = 0.
inline std::string trajectory_csv(const EpisodeLog& log) {
  std::string out = fmt::format("# schema: {}\nt,agent,x,y,z\n", kTrajectoryCsvSchema);
  auto row = [&](double t, const char* agent, const Point3& p) {
    out += fmt::format("{},{},{},{},{}\n", t, agent, p.x, p.y, p.z);
  };
  if (log.steps.empty()) {
    row(0.0, "pursuer", log.initial[kPursuer].position);
    row(0.0, "evader", log.initial[kEvader].position);
  }
  for (const auto& s : log.steps) {
    row(s.time, "pursuer", s.agents[kPursuer].state.position);
    row(s.time, "evader", s.agents[kEvader].state.position);
  }
  return out;
}

inline std::string series_csv(const EpisodeLog& log) {
  std::string out = fmt::format(
      "# schema: {}\nt,agent,u_dalpha,u_dtheta,exec_dalpha,exec_dtheta,reward,td_error,entropy,collision\n",
      kSeriesCsvSchema);
  for (const auto& s : log.steps)
    for (std::size_t i = 0; i < 2; ++i) {
      const auto& a = s.agents[i];
      out += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", s.time, i == kPursuer ? "pursuer" : "evader", a.action.u[0],
                         a.action.u[1], a.action.u_noisy[0], a.action.u_noisy[1], a.reward, a.td_error, a.entropy,
                         a.collision ? 1 : 0);
    }
  return out;
}

inline std::string metrics_csv(const EpisodeLog& log) {
  std::string out = episodes_csv_header();
  out.replace(out.find(kEpisodesCsvSchema), std::string_view(kEpisodesCsvSchema).size(), kMetricsCsvSchema);
  return out + episodes_csv_row(log.summary);
}

enum class ExportFormat { csv, json };

/// Writes the export files for one episode into `dir` and returns their paths.
inline std::vector<std::filesystem::path> export_log(const EpisodeLog& log, ExportFormat format,
                                                     const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> written;
  if (format == ExportFormat::csv) {
    written = {dir / "trajectory.csv", dir / "series.csv", dir / "metrics.csv"};
    write_text_file(written[0], trajectory_csv(log));
    write_text_file(written[1], series_csv(log));
    write_text_file(written[2], metrics_csv(log));
  } else {
    written = {dir / "episode.json"};
    write_json_file(written[0], log_to_json(log));
  }
  return written;
}

}  // namespace pegfacl
