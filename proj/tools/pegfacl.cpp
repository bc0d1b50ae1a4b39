// Command-line driver: train, evaluate, replay and list scenarios.

#include <iostream>

#include <CLI11.hpp>

#include "pegfacl/pegfacl.hpp"

namespace {

using namespace pegfacl;

struct TrainArgs {
  std::string scenario = "1";
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string out = "run";
  std::optional<int> episodes;
  std::optional<int> max_plays;
  std::optional<int> log_every;
};

struct EvalArgs {
  std::string checkpoint;
  int runs = 20;
  std::string scenario;
  std::optional<std::uint64_t> seed;
  bool json = false;
};

struct ReplayArgs {
  std::string log;
  std::string format = "csv";
  std::string out;
};

int run_train(const TrainArgs& a) {
  TrainConfig config;
  Scenario ignored;
  if (!a.config.empty()) load_config_file(a.config, config, ignored);
  Scenario scenario = resolve_scenario(a.scenario, &config);
  if (a.seed) config.seed = *a.seed;
  if (a.episodes) config.episodes = *a.episodes;
  if (a.max_plays) config.max_plays = *a.max_plays;
  if (a.log_every) config.log_every = *a.log_every;

  const auto manifest = train(scenario, config, a.out);
  int captured = 0;
  for (const auto& e : manifest.episodes) captured += e.outcome == Outcome::captured ? 1 : 0;
  const auto& last = manifest.episodes.back();
  fmt::print("scenario {} seed {}: {} episodes, {} captured; last episode {} after {} steps (d_PE = {:.3f} m)\n",
             scenario.name, config.seed, manifest.episodes.size(), captured, to_string(last.outcome), last.steps,
             last.final_distance);
  fmt::print("wrote {}\n", (std::filesystem::path(a.out) / "manifest.json").string());
  return 0;
}

int run_evaluate(const EvalArgs& a) {
  const Checkpoint ckpt = load_checkpoint(a.checkpoint);
  auto [config, scenario] = config_from_checkpoint(ckpt);
  if (!a.scenario.empty()) scenario = resolve_scenario(a.scenario, &config);
  const std::uint64_t seed = a.seed.value_or(ckpt.seed);
  const auto m = evaluate(ckpt.learners, scenario, config, a.runs, seed);
  if (a.json) {
    std::cout << metrics_to_json(m).dump(2) << "\n";
    return 0;
  }
  fmt::print("scenario {} runs {} seed {}\n", scenario.name, m.runs, seed);
  fmt::print("  capture rate      {:.3f} ({}/{})\n", m.capture_rate, m.captures, m.runs);
  fmt::print("  capture time [s]  {:.2f} +- {:.2f}\n", m.capture_time.mean, m.capture_time.stddev);
  fmt::print("  path pursuer [m]  {:.2f} +- {:.2f}\n", m.path_length[0].mean, m.path_length[0].stddev);
  fmt::print("  path evader  [m]  {:.2f} +- {:.2f}\n", m.path_length[1].mean, m.path_length[1].stddev);
  fmt::print("  final d_PE   [m]  {:.3f} +- {:.3f}\n", m.final_distance.mean, m.final_distance.stddev);
  fmt::print("  collision runs    {}\n", m.collision_runs);
  return 0;
}

int run_replay(const ReplayArgs& a) {
  const EpisodeLog log = log_from_json(read_json_file(a.log));
  const auto format = a.format == "json" ? ExportFormat::json : ExportFormat::csv;
  const std::filesystem::path out = a.out.empty() ? std::filesystem::path(a.log).parent_path() : std::filesystem::path(a.out);
  for (const auto& p : export_log(log, format, out)) fmt::print("wrote {}\n", p.string());
  return 0;
}

int run_list() {
  for (const auto& s : builtin_scenarios())
    fmt::print("{}  pursuer ({}, {}, {})  evader ({}, {}, {})  obstacles: {} random, radius {} m\n", s.name,
               s.pursuer_start.x, s.pursuer_start.y, s.pursuer_start.z, s.evader_start.x, s.evader_start.y,
               s.evader_start.z, s.obstacles.count, s.obstacles.radius);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"3D pursuit-evasion with fuzzy actor-critic learners"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "train both agents by self-play on one scenario");
  train_cmd->add_option("--scenario", train_args.scenario, "built-in scenario 1-4 or a scenario file");
  train_cmd->add_option("--seed", train_args.seed, "master RNG seed");
  train_cmd->add_option("--config", train_args.config, "INI config file")->check(CLI::ExistingFile);
  train_cmd->add_option("--out", train_args.out, "output directory");
  train_cmd->add_option("--episodes", train_args.episodes, "override train.episodes");
  train_cmd->add_option("--max-plays", train_args.max_plays, "override train.max_plays");
  train_cmd->add_option("--log-every", train_args.log_every, "also keep step logs every N episodes");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("evaluate", "noise-free rollouts of a checkpoint");
  eval_cmd->add_option("--checkpoint", eval_args.checkpoint, "checkpoint.json")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--runs", eval_args.runs, "number of rollouts")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--scenario", eval_args.scenario, "override the checkpoint's scenario");
  eval_cmd->add_option("--seed", eval_args.seed, "evaluation seed (defaults to the training seed)");
  eval_cmd->add_flag("--json", eval_args.json, "print metrics as JSON");

  ReplayArgs replay_args;
  auto* replay_cmd = app.add_subcommand("replay", "export a stored episode log");
  replay_cmd->add_option("--log", replay_args.log, "episode log JSON")->required()->check(CLI::ExistingFile);
  replay_cmd->add_option("--export", replay_args.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  replay_cmd->add_option("--out", replay_args.out, "output directory (defaults to the log's directory)");

  auto* scen_cmd = app.add_subcommand("scenarios", "scenario utilities");
  scen_cmd->add_subcommand("list", "print the built-in scenarios");
  scen_cmd->require_subcommand(1);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) return run_train(train_args);
    if (*eval_cmd) return run_evaluate(eval_args);
    if (*replay_cmd) return run_replay(replay_args);
    if (*scen_cmd) return run_list();
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
