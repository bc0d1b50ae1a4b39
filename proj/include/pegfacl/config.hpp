#pragma once

// Run configuration, built-in scenarios, and the flat `section.key = value`
// representation shared by config files, manifests and checkpoints.

#include <cstdint>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "pegfacl/reward.hpp"

namespace pegfacl {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Freeze { none, pursuer, evader };

struct LearnerConfig {
  double alpha_a = 0.001;
  double alpha_c = 0.05;
  double gamma = 0.95;
  double sigma_a = 0.1;  // std dev; the exploration variance is 0.01

  LearnerParams make(std::size_t rules) const { return LearnerParams::zeros(rules, alpha_a, alpha_c, gamma, sigma_a); }
};

struct ObstacleSpec {
  bool random = true;
  std::vector<Obstacle> fixed;  // used when !random
  int count = 3;
  double radius = 1.0;
  double start_clearance = 3.0;  // minimum surface distance from either start
};

struct Scenario {
  std::string name = "custom";
  Point3 pursuer_start;
  Point3 evader_start;
  ObstacleSpec obstacles;
};

struct TrainConfig {
  int episodes = 200;
  int max_plays = 1000;
  std::uint64_t seed = 1;
  Freeze freeze = Freeze::none;
  int log_every = 0;  // 0: keep only the final episode's step log
  double speed_pursuer = 1.1;
  double speed_evader = 1.0;
  Arena arena;  // obstacles are filled per episode from the scenario
  RewardConfig reward;
  LearnerConfig learner;

  void validate() const {
    if (episodes < 1) throw ConfigError("train.episodes must be >= 1");
    if (max_plays < 1) throw ConfigError("train.max_plays must be >= 1");
    if (!(speed_pursuer >= 0.0 && speed_evader >= 0.0)) throw ConfigError("agent speeds must be >= 0");
    try {
      arena.validate();
      reward.validate();
      (void)learner.make(1);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
};

/// The four start configurations; the fourth shares its pursuer start with the third.
inline const std::vector<Scenario>& builtin_scenarios() {
  static const std::vector<Scenario> all = [] {
    std::vector<Scenario> s(4);
    const std::array<std::pair<Point3, Point3>, 4> starts{{
        {{5, 30, 0}, {5, 5, 0}},
        {{5, 5, 0}, {30, 30, 0}},
        {{30, 30, 0}, {30, 5, 0}},
        {{30, 30, 0}, {5, 30, 0}},
    }};
    for (std::size_t i = 0; i < 4; ++i) {
      s[i].name = std::to_string(i + 1);
      s[i].pursuer_start = starts[i].first;
      s[i].evader_start = starts[i].second;
    }
    return s;
  }();
  return all;
}

using KeyValues = std::map<std::string, std::string>;

namespace detail {

inline std::string fmt_vec(const Vec3& v) { return fmt::format("{},{},{}", v.x, v.y, v.z); }

inline double parse_double(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (s.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("{}: expected a number, got '{}'", key, s));
  }
}

inline long long parse_int(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (s.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("{}: expected an integer, got '{}'", key, s));
  }
}

inline std::vector<double> parse_list(const std::string& key, const std::string& s, char sep = ',') {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(parse_double(key, item));
  return out;
}

inline Vec3 parse_vec(const std::string& key, const std::string& s) {
  const auto v = parse_list(key, s);
  if (v.size() != 3) throw ConfigError(fmt::format("{}: expected x,y,z", key));
  return {v[0], v[1], v[2]};
}

}  // namespace detail

inline KeyValues to_key_values(const TrainConfig& c, const Scenario& s) {
  using detail::fmt_vec;
  KeyValues kv;
  kv["train.episodes"] = std::to_string(c.episodes);
  kv["train.max_plays"] = std::to_string(c.max_plays);
  kv["train.seed"] = std::to_string(c.seed);
  kv["train.freeze"] = c.freeze == Freeze::none ? "none" : c.freeze == Freeze::pursuer ? "pursuer" : "evader";
  kv["train.log_every"] = std::to_string(c.log_every);
  kv["arena.extents"] = fmt_vec(c.arena.extents);
  kv["arena.capture_distance"] = fmt::format("{}", c.arena.capture_distance);
  kv["arena.max_time"] = fmt::format("{}", c.arena.max_time);
  kv["arena.dt"] = fmt::format("{}", c.arena.dt);
  kv["arena.steering_mode"] = to_string(c.arena.steering);
  kv["arena.speed_pursuer"] = fmt::format("{}", c.speed_pursuer);
  kv["arena.speed_evader"] = fmt::format("{}", c.speed_evader);
  kv["reward.alpha_r"] = fmt::format("{}", c.reward.alpha_r);
  kv["reward.beta_a"] = fmt::format("{}", c.reward.beta_a);
  kv["reward.gamma_s"] = fmt::format("{}", c.reward.gamma_s);
  kv["reward.w_r"] = fmt::format("{}", c.reward.w_r);
  kv["reward.w_a"] = fmt::format("{}", c.reward.w_a);
  kv["learner.alpha_a"] = fmt::format("{}", c.learner.alpha_a);
  kv["learner.alpha_c"] = fmt::format("{}", c.learner.alpha_c);
  kv["learner.gamma"] = fmt::format("{}", c.learner.gamma);
  kv["learner.sigma_a"] = fmt::format("{}", c.learner.sigma_a);
  kv["scenario.name"] = s.name;
  kv["scenario.pursuer_start"] = fmt_vec(s.pursuer_start);
  kv["scenario.evader_start"] = fmt_vec(s.evader_start);
  if (s.obstacles.random) {
    kv["scenario.obstacles"] = "random";
  } else if (s.obstacles.fixed.empty()) {
    kv["scenario.obstacles"] = "none";
  } else {
    std::string list;
    for (const auto& o : s.obstacles.fixed) {
      if (!list.empty()) list += ';';
      list += fmt::format("{},{}", fmt_vec(o.center), o.radius);
    }
    kv["scenario.obstacles"] = list;
  }
  kv["scenario.obstacle_count"] = std::to_string(s.obstacles.count);
  kv["scenario.obstacle_radius"] = fmt::format("{}", s.obstacles.radius);
  kv["scenario.obstacle_clearance"] = fmt::format("{}", s.obstacles.start_clearance);
  return kv;
}

/// Applies recognised keys; unknown keys are an error so typos do not pass silently.
inline void apply_key_values(const KeyValues& kv, TrainConfig& c, Scenario& s) {
  using namespace detail;
  for (const auto& [key, raw] : kv) {
    std::string val = raw;
    const auto first = val.find_first_not_of(" \t");
    const auto last = val.find_last_not_of(" \t");
    val = first == std::string::npos ? std::string{} : val.substr(first, last - first + 1);

    if (key == "train.episodes") c.episodes = static_cast<int>(parse_int(key, val));
    else if (key == "train.max_plays") c.max_plays = static_cast<int>(parse_int(key, val));
    else if (key == "train.seed") c.seed = static_cast<std::uint64_t>(parse_int(key, val));
    else if (key == "train.log_every") c.log_every = static_cast<int>(parse_int(key, val));
    else if (key == "train.freeze") {
      if (val == "none") c.freeze = Freeze::none;
      else if (val == "pursuer") c.freeze = Freeze::pursuer;
      else if (val == "evader") c.freeze = Freeze::evader;
      else throw ConfigError("train.freeze must be none|pursuer|evader");
    } else if (key == "arena.extents") c.arena.extents = parse_vec(key, val);
    else if (key == "arena.capture_distance") c.arena.capture_distance = parse_double(key, val);
    else if (key == "arena.max_time") c.arena.max_time = parse_double(key, val);
    else if (key == "arena.dt") c.arena.dt = parse_double(key, val);
    else if (key == "arena.steering_mode") {
      if (val == "incremental") c.arena.steering = SteeringMode::incremental;
      else if (val == "absolute") c.arena.steering = SteeringMode::absolute;
      else if (val == "relative") c.arena.steering = SteeringMode::relative;
      else throw ConfigError("arena.steering_mode must be incremental|absolute|relative");
    } else if (key == "arena.speed_pursuer") c.speed_pursuer = parse_double(key, val);
    else if (key == "arena.speed_evader") c.speed_evader = parse_double(key, val);
    else if (key == "reward.alpha_r") c.reward.alpha_r = parse_double(key, val);
    else if (key == "reward.beta_a") c.reward.beta_a = parse_double(key, val);
    else if (key == "reward.gamma_s") c.reward.gamma_s = parse_double(key, val);
    else if (key == "reward.w_r") c.reward.w_r = parse_double(key, val);
    else if (key == "reward.w_a") c.reward.w_a = parse_double(key, val);
    else if (key == "learner.alpha_a") c.learner.alpha_a = parse_double(key, val);
    else if (key == "learner.alpha_c") c.learner.alpha_c = parse_double(key, val);
    else if (key == "learner.gamma") c.learner.gamma = parse_double(key, val);
    else if (key == "learner.sigma_a") c.learner.sigma_a = parse_double(key, val);
    else if (key == "scenario.name") s.name = val;
    else if (key == "scenario.pursuer_start") s.pursuer_start = parse_vec(key, val);
    else if (key == "scenario.evader_start") s.evader_start = parse_vec(key, val);
    else if (key == "scenario.obstacles") {
      s.obstacles.fixed.clear();
      if (val == "random") {
        s.obstacles.random = true;
      } else {
        s.obstacles.random = false;
        if (val != "none" && !val.empty()) {
          std::stringstream ss(val);
          std::string item;
          while (std::getline(ss, item, ';')) {
            const auto v = parse_list(key, item);
            if (v.size() != 4) throw ConfigError("scenario.obstacles: expected x,y,z,r entries separated by ';'");
            s.obstacles.fixed.push_back({{v[0], v[1], v[2]}, v[3]});
          }
        }
      }
    } else if (key == "scenario.obstacle_count") s.obstacles.count = static_cast<int>(parse_int(key, val));
    else if (key == "scenario.obstacle_radius") s.obstacles.radius = parse_double(key, val);
    else if (key == "scenario.obstacle_clearance") s.obstacles.start_clearance = parse_double(key, val);
    else throw ConfigError(fmt::format("unknown config key '{}'", key));
  }
}

/// Reads an INI-style file into flat `section.key` pairs.
inline KeyValues read_key_values(const std::filesystem::path& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
  KeyValues kv;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError(fmt::format("{}: key '{}' outside a section", path.string(), section));
    for (const auto& [key, leaf] : body) kv[section + "." + key] = leaf.get_value<std::string>();
  }
  return kv;
}

inline void load_config_file(const std::filesystem::path& path, TrainConfig& c, Scenario& s) {
  try {
    apply_key_values(read_key_values(path), c, s);
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    if (msg.rfind(path.string(), 0) == 0) throw;
    throw ConfigError(fmt::format("{}: {}", path.string(), msg));
  }
}

/// "1".."4" selects a built-in scenario; anything else is read as a config file
/// whose [scenario] section describes the starts and obstacles.
inline Scenario resolve_scenario(const std::string& spec, TrainConfig* config = nullptr) {
  for (const auto& s : builtin_scenarios())
    if (s.name == spec) return s;
  if (!std::filesystem::exists(spec))
    throw ConfigError(fmt::format("scenario '{}' is neither 1-4 nor an existing file", spec));
  Scenario s;
  s.name = std::filesystem::path(spec).stem().string();
  TrainConfig scratch;
  load_config_file(spec, config ? *config : scratch, s);
  return s;
}

inline void validate_scenario(const Scenario& s, const Arena& arena) {
  if (!arena.contains(s.pursuer_start) || !arena.contains(s.evader_start))
    throw ConfigError("scenario: start positions must lie inside the arena");
  if (!s.obstacles.random) {
    for (const auto& o : s.obstacles.fixed) {
      if (!(o.radius > 0.0) || !arena.contains(o)) throw ConfigError("scenario: obstacle must fit inside the arena");
      if (surface_distance(s.pursuer_start, o) < 0.0 || surface_distance(s.evader_start, o) < 0.0)
        throw ConfigError("scenario: start position inside an obstacle");
    }
  } else {
    if (s.obstacles.count < 0) throw ConfigError("scenario.obstacle_count must be >= 0");
    if (!(s.obstacles.radius > 0.0)) throw ConfigError("scenario.obstacle_radius must be > 0");
    const Vec3 e = arena.extents;
    if (2.0 * s.obstacles.radius > std::min({e.x, e.y, e.z}))
      throw ConfigError("scenario.obstacle_radius does not fit in the arena");
  }
}

}  // namespace pegfacl
