#include "agelab/experiments.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "agelab/cartpole.hpp"
#include "agelab/checkpoint.hpp"
#include "agelab/csv.hpp"
#include "agelab/manifest.hpp"
#include "agelab/svg.hpp"

namespace agelab::experiments {

namespace fs = std::filesystem;

std::filesystem::path output_root() {
  if (const char* env = std::getenv("AGELAB_OUT"); env && *env) return fs::path(env);
  return fs::current_path();
}

ParsedName parse_experiment_name(const std::string& name) {
  ParsedName parsed;
  if (name == "nominal-epsgreedy") {
    parsed.family = Family::kNominal;
    parsed.nominal_strategy = explore::Strategy::kEpsGreedy;
    return parsed;
  }
  if (name == "nominal-age") {
    parsed.family = Family::kNominal;
    parsed.nominal_strategy = explore::Strategy::kAge;
    return parsed;
  }
  if (name == "nominal-paramnoise") {
    parsed.family = Family::kNominal;
    parsed.nominal_strategy = explore::Strategy::kParamNoise;
    return parsed;
  }
  if (name.rfind("attack-train:p=", 0) == 0) {
    const std::string value = name.substr(15);
    try {
      std::size_t used = 0;
      parsed.attack_p = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw std::invalid_argument("bad attack probability in experiment name: " + name);
    }
    if (parsed.attack_p <= 0.0 || parsed.attack_p > 1.0) {
      throw std::invalid_argument("attack probability must lie in (0, 1]: " + name);
    }
    parsed.family = Family::kAttackTrain;
    return parsed;
  }
  if (name.rfind("resilience:", 0) == 0) {
    parsed.victim = name.substr(11);
    if (parsed.victim != "epsgreedy" && parsed.victim != "age") {
      throw std::invalid_argument("resilience victim must be epsgreedy or age: " + name);
    }
    parsed.family = Family::kResilience;
    return parsed;
  }
  if (name == "tabular-sweep") {
    parsed.family = Family::kTabularSweep;
    return parsed;
  }
  std::string message = "unknown experiment '" + name + "'; known experiments:";
  for (const std::string& known : known_experiment_names()) message += " " + known;
  throw std::invalid_argument(message);
}

std::vector<std::string> known_experiment_names() {
  return {"nominal-epsgreedy", "nominal-age",        "nominal-paramnoise",
          "attack-train:p=<x>", "resilience:epsgreedy", "resilience:age",
          "tabular-sweep"};
}

const std::map<std::string, std::set<std::string>>& config_schema() {
  static const std::map<std::string, std::set<std::string>> schema = {
      {"experiment", {"name", "seeds", "output"}},
      {"trainer",
       {"total_timesteps", "gamma", "learning_rate", "buffer_size", "first_learning_step",
        "target_update_freq", "batch_size", "train_freq", "sampler", "strategy",
        "hidden_dims", "activation", "priority_alpha", "beta_initial", "beta_final",
        "initial_epsilon", "final_epsilon", "exploration_fraction", "noise_sigma",
        "age_temperature_override", "convergence_threshold", "convergence_window",
        "post_attack_timesteps", "eval_episodes"}},
      {"attack",
       {"p_attack", "mode", "step_size", "max_iterations", "max_linf_radius",
        "oracle_fallback", "start"}},
      {"adversary",
       {"max_timesteps", "gamma", "learning_rate", "buffer_size", "first_learning_step",
        "target_update_freq", "batch_size", "train_freq", "sampler", "strategy",
        "hidden_dims", "activation", "priority_alpha", "beta_initial", "beta_final",
        "initial_epsilon", "final_epsilon", "exploration_fraction", "noise_sigma", "c_adv",
        "observe_victim_q", "quasi_stable_window", "quasi_stable_tolerance",
        "craft_step_size", "craft_max_iterations", "craft_radius"}},
      {"resilience", {"victim_checkpoint"}},
      {"sweep",
       {"p_attacks", "seeds_per_cell", "mode", "episodes", "learning_rate",
        "visit_count_decay", "max_episode_steps", "behavior_epsilon", "replay_capacity",
        "replay_samples_per_step", "include_chain", "include_gridworld"}},
  };
  return schema;
}

namespace {

std::vector<int> parse_hidden_dims(const std::string& value) {
  std::vector<int> dims;
  for (const long d : config::parse_long_list(value)) dims.push_back(static_cast<int>(d));
  return dims;
}

neural::Activation activation_from_string(const std::string& name) {
  if (name == "tanh") return neural::Activation::kTanh;
  if (name == "relu") return neural::Activation::kRelu;
  throw std::invalid_argument("unknown activation: " + name);
}

}  // namespace

train::TrainerConfig trainer_config_from(const config::ConfigFile& file,
                                         train::TrainerConfig base) {
  const std::string s = "trainer";
  train::TrainerConfig c = std::move(base);
  c.total_timesteps = file.get_long(s, "total_timesteps", c.total_timesteps);
  c.gamma = file.get_double(s, "gamma", c.gamma);
  c.learning_rate = file.get_double(s, "learning_rate", c.learning_rate);
  c.buffer_size = static_cast<std::size_t>(
      file.get_long(s, "buffer_size", static_cast<long>(c.buffer_size)));
  c.first_learning_step = file.get_long(s, "first_learning_step", c.first_learning_step);
  c.target_update_freq = file.get_long(s, "target_update_freq", c.target_update_freq);
  c.batch_size = static_cast<int>(file.get_long(s, "batch_size", c.batch_size));
  c.train_freq = static_cast<int>(file.get_long(s, "train_freq", c.train_freq));
  if (const auto v = file.get(s, "sampler")) c.sampler = train::sampler_from_string(*v);
  if (const auto v = file.get(s, "strategy")) c.strategy = explore::strategy_from_string(*v);
  if (const auto v = file.get(s, "hidden_dims")) c.hidden_dims = parse_hidden_dims(*v);
  if (const auto v = file.get(s, "activation")) c.activation = activation_from_string(*v);
  c.priority_alpha = file.get_double(s, "priority_alpha", c.priority_alpha);
  c.beta_initial = file.get_double(s, "beta_initial", c.beta_initial);
  c.beta_final = file.get_double(s, "beta_final", c.beta_final);
  c.schedule.initial_epsilon = file.get_double(s, "initial_epsilon", c.schedule.initial_epsilon);
  c.schedule.final_epsilon = file.get_double(s, "final_epsilon", c.schedule.final_epsilon);
  c.schedule.exploration_fraction =
      file.get_double(s, "exploration_fraction", c.schedule.exploration_fraction);
  c.param_noise.sigma = file.get_double(s, "noise_sigma", c.param_noise.sigma);
  c.age_temperature_override =
      file.get_double(s, "age_temperature_override", c.age_temperature_override);
  c.convergence_threshold =
      file.get_double(s, "convergence_threshold", c.convergence_threshold);
  c.convergence_window =
      static_cast<int>(file.get_long(s, "convergence_window", c.convergence_window));
  if (const auto v = file.get(s, "post_attack_timesteps")) {
    c.post_attack_timesteps = file.get_long(s, "post_attack_timesteps");
  }
  return c;
}

void apply_attack_section(const config::ConfigFile& file, train::TrainerConfig& config) {
  const std::string s = "attack";
  attack::AttackSpec spec = config.attack.value_or(attack::AttackSpec{});
  spec.p_attack = file.get_double(s, "p_attack", spec.p_attack);
  if (const auto v = file.get(s, "mode")) spec.mode = attack::mode_from_string(*v);
  spec.step_size = file.get_double(s, "step_size", spec.step_size);
  spec.max_iterations =
      static_cast<int>(file.get_long(s, "max_iterations", spec.max_iterations));
  spec.max_linf_radius = file.get_double(s, "max_linf_radius", spec.max_linf_radius);
  spec.oracle_fallback = file.get_bool(s, "oracle_fallback", spec.oracle_fallback);
  config.attack = spec;
  if (const auto v = file.get(s, "start")) {
    config.attack_start = train::attack_start_from_string(*v);
  }
}

resilience::AdversaryConfig adversary_config_from(const config::ConfigFile& file,
                                                  resilience::AdversaryConfig base) {
  const std::string s = "adversary";
  resilience::AdversaryConfig c = std::move(base);
  c.max_timesteps = file.get_long(s, "max_timesteps", c.max_timesteps);
  c.gamma = file.get_double(s, "gamma", c.gamma);
  c.learning_rate = file.get_double(s, "learning_rate", c.learning_rate);
  c.buffer_size = static_cast<std::size_t>(
      file.get_long(s, "buffer_size", static_cast<long>(c.buffer_size)));
  c.first_learning_step = file.get_long(s, "first_learning_step", c.first_learning_step);
  c.target_update_freq = file.get_long(s, "target_update_freq", c.target_update_freq);
  c.batch_size = static_cast<int>(file.get_long(s, "batch_size", c.batch_size));
  c.train_freq = static_cast<int>(file.get_long(s, "train_freq", c.train_freq));
  if (const auto v = file.get(s, "sampler")) c.sampler = train::sampler_from_string(*v);
  if (const auto v = file.get(s, "strategy")) c.strategy = explore::strategy_from_string(*v);
  if (const auto v = file.get(s, "hidden_dims")) c.hidden_dims = parse_hidden_dims(*v);
  if (const auto v = file.get(s, "activation")) c.activation = activation_from_string(*v);
  c.priority_alpha = file.get_double(s, "priority_alpha", c.priority_alpha);
  c.beta_initial = file.get_double(s, "beta_initial", c.beta_initial);
  c.beta_final = file.get_double(s, "beta_final", c.beta_final);
  c.schedule.initial_epsilon = file.get_double(s, "initial_epsilon", c.schedule.initial_epsilon);
  c.schedule.final_epsilon = file.get_double(s, "final_epsilon", c.schedule.final_epsilon);
  c.schedule.exploration_fraction =
      file.get_double(s, "exploration_fraction", c.schedule.exploration_fraction);
  c.param_noise.sigma = file.get_double(s, "noise_sigma", c.param_noise.sigma);
  c.c_adv = file.get_double(s, "c_adv", c.c_adv);
  c.observe_victim_q = file.get_bool(s, "observe_victim_q", c.observe_victim_q);
  c.quasi_stable_window =
      static_cast<int>(file.get_long(s, "quasi_stable_window", c.quasi_stable_window));
  c.quasi_stable_tolerance =
      file.get_double(s, "quasi_stable_tolerance", c.quasi_stable_tolerance);
  c.perturbation.step_size = file.get_double(s, "craft_step_size", c.perturbation.step_size);
  c.perturbation.max_iterations = static_cast<int>(
      file.get_long(s, "craft_max_iterations", c.perturbation.max_iterations));
  c.perturbation.max_linf_radius =
      file.get_double(s, "craft_radius", c.perturbation.max_linf_radius);
  return c;
}

tabular::SweepConfig sweep_config_from(const config::ConfigFile& file,
                                       tabular::SweepConfig base) {
  const std::string s = "sweep";
  tabular::SweepConfig c = std::move(base);
  if (const auto v = file.get(s, "p_attacks")) c.p_attacks = config::parse_double_list(*v);
  c.seeds_per_cell = static_cast<int>(file.get_long(s, "seeds_per_cell", c.seeds_per_cell));
  if (const auto v = file.get(s, "mode")) c.mode = attack::mode_from_string(*v);
  c.episodes = file.get_long(s, "episodes", c.episodes);
  c.tabular.learning_rate = file.get_double(s, "learning_rate", c.tabular.learning_rate);
  c.tabular.visit_count_decay =
      file.get_bool(s, "visit_count_decay", c.tabular.visit_count_decay);
  c.tabular.max_episode_steps = static_cast<int>(
      file.get_long(s, "max_episode_steps", c.tabular.max_episode_steps));
  c.tabular.behavior_epsilon =
      file.get_double(s, "behavior_epsilon", c.tabular.behavior_epsilon);
  c.tabular.replay_capacity = static_cast<std::size_t>(
      file.get_long(s, "replay_capacity", static_cast<long>(c.tabular.replay_capacity)));
  c.tabular.replay_samples_per_step = static_cast<int>(
      file.get_long(s, "replay_samples_per_step", c.tabular.replay_samples_per_step));
  c.include_chain = file.get_bool(s, "include_chain", c.include_chain);
  c.include_gridworld = file.get_bool(s, "include_gridworld", c.include_gridworld);
  return c;
}

namespace {

std::string note_value(const std::optional<long>& v) {
  return v ? std::to_string(*v) : "-";
}

void write_train_csvs(const fs::path& dir, const train::TrainLog& log,
                      std::vector<fs::path>& files) {
  {
    csv::Writer steps(dir / "train_steps.csv", "train_step.v1",
                      {"step", "episode", "episode_reward", "epsilon", "loss", "attacked"});
    for (const train::StepRecord& r : log.steps) {
      steps.row({csv::format(r.step), csv::format(r.episode), csv::format(r.episode_reward),
                 csv::format(r.epsilon), csv::format(r.loss),
                 csv::format(static_cast<long>(r.attacked))});
    }
    files.push_back(dir / "train_steps.csv");
  }
  {
    csv::Writer episodes(dir / "train_episodes.csv", "train_episode.v1",
                         {"episode", "end_step", "reward", "ma100"});
    for (const train::EpisodeRecord& r : log.episodes) {
      episodes.row({csv::format(r.episode), csv::format(r.end_step), csv::format(r.reward),
                    csv::format(r.ma100)});
    }
    files.push_back(dir / "train_episodes.csv");
  }
}

void write_meta(const fs::path& dir, const std::vector<std::pair<std::string, std::string>>& kv,
                std::vector<fs::path>& files) {
  csv::Writer meta(dir / "run_meta.csv", "run_meta.v1", {"key", "value"});
  for (const auto& [key, value] : kv) meta.row({key, value});
  files.push_back(dir / "run_meta.csv");
}

void plot_learning_curve(const fs::path& dir, const std::string& title,
                         std::vector<fs::path>& files) {
  svg::PlotSpec spec;
  spec.series = {{"end_step", "ma100", "100-episode mean reward"}};
  spec.title = title;
  spec.x_label = "timestep";
  spec.y_label = "episode reward";
  svg::emit_plot(dir / "train_episodes.csv", spec, dir / "learning_curve.svg");
  files.push_back(dir / "learning_curve.svg");
}

struct SeedOutcome {
  std::vector<fs::path> files;
  std::string note;
};

SeedOutcome run_training_seed(const fs::path& seed_dir, const train::TrainerConfig& config,
                              std::uint64_t seed) {
  fs::create_directories(seed_dir);
  SeedOutcome outcome;

  Rng rng(seed);
  train::TrainResult result = train::train(config, rng);

  write_train_csvs(seed_dir, result.log, outcome.files);
  save_checkpoint(result.network, seed_dir / "checkpoint.ageq");
  outcome.files.push_back(seed_dir / "checkpoint.ageq");

  Rng eval_rng = rng.split("eval");
  const train::EvalStats eval = train::evaluate(result.network, 50, eval_rng);

  std::vector<std::pair<std::string, std::string>> meta;
  meta.emplace_back("seed", std::to_string(seed));
  meta.emplace_back("convergence_step", note_value(result.log.convergence_step));
  meta.emplace_back("attack_start_step", note_value(result.log.attack_start_step));
  meta.emplace_back("attack_start_push",
                    result.log.attack_start_push
                        ? std::to_string(*result.log.attack_start_push)
                        : "-");
  meta.emplace_back("overwrite_pushes", result.log.overwrite_pushes
                                            ? std::to_string(*result.log.overwrite_pushes)
                                            : "-");
  meta.emplace_back("final_perturbed_fraction",
                    csv::format(result.log.final_perturbed_fraction));
  meta.emplace_back("eval_mean", csv::format(eval.mean));
  meta.emplace_back("eval_stddev", csv::format(eval.stddev));
  write_meta(seed_dir, meta, outcome.files);

  plot_learning_curve(seed_dir, "seed " + std::to_string(seed), outcome.files);

  std::ostringstream note;
  note << "seed " << seed << ": eval " << csv::format(eval.mean) << " +/- "
       << csv::format(eval.stddev) << ", convergence_step "
       << note_value(result.log.convergence_step);
  if (result.log.attack_start_step) {
    note << ", attack_start_step " << *result.log.attack_start_step;
  }
  outcome.note = note.str();
  return outcome;
}

SeedOutcome run_resilience_seed(const fs::path& seed_dir, const config::ConfigFile& file,
                                const std::string& victim_kind, std::uint64_t seed) {
  fs::create_directories(seed_dir);
  SeedOutcome outcome;

  neural::QNetwork victim = [&]() {
    if (const auto path = file.get("resilience", "victim_checkpoint")) {
      return load_checkpoint(*path);
    }
    train::TrainerConfig victim_config = trainer_config_from(file);
    victim_config.strategy = victim_kind == "age" ? explore::Strategy::kAge
                                                  : explore::Strategy::kEpsGreedy;
    victim_config.attack.reset();
    Rng victim_rng = Rng(seed).split("victim");
    train::TrainResult victim_result = train::train(victim_config, victim_rng);
    csv::Writer episodes(seed_dir / "victim_episodes.csv", "train_episode.v1",
                         {"episode", "end_step", "reward", "ma100"});
    for (const train::EpisodeRecord& r : victim_result.log.episodes) {
      episodes.row({csv::format(r.episode), csv::format(r.end_step), csv::format(r.reward),
                    csv::format(r.ma100)});
    }
    outcome.files.push_back(seed_dir / "victim_episodes.csv");
    return victim_result.network;
  }();
  save_checkpoint(victim, seed_dir / "victim.ageq");
  outcome.files.push_back(seed_dir / "victim.ageq");

  const resilience::AdversaryConfig adversary_config = adversary_config_from(file);
  Rng adversary_rng = Rng(seed).split("adversary");
  resilience::AdversaryResult result =
      resilience::train_adversary(victim, adversary_config, adversary_rng);

  {
    csv::Writer regret(seed_dir / "regret.csv", "regret.v1",
                       {"episode", "victim_reward", "regret", "perturbations", "ma100_regret",
                        "ma100_perturbations"});
    for (const resilience::RegretEpisode& r : result.log.episodes) {
      regret.row({csv::format(r.episode), csv::format(r.victim_reward), csv::format(r.regret),
                  csv::format(r.perturbations), csv::format(r.ma100_regret),
                  csv::format(r.ma100_perturbations)});
    }
    outcome.files.push_back(seed_dir / "regret.csv");
  }
  save_checkpoint(result.adversary, seed_dir / "adversary.ageq");
  outcome.files.push_back(seed_dir / "adversary.ageq");

  {
    svg::PlotSpec spec;
    spec.series = {{"episode", "ma100_regret", "100-episode mean regret"}};
    spec.title = "adversary vs " + victim_kind + ", seed " + std::to_string(seed);
    spec.x_label = "episode";
    spec.y_label = "regret";
    svg::emit_plot(seed_dir / "regret.csv", spec, seed_dir / "regret_curve.svg");
    outcome.files.push_back(seed_dir / "regret_curve.svg");
  }
  {
    svg::PlotSpec spec;
    spec.series = {{"episode", "ma100_perturbations", "100-episode mean perturbations"}};
    spec.title = "perturbation budget vs " + victim_kind + ", seed " + std::to_string(seed);
    spec.x_label = "episode";
    spec.y_label = "perturbations per episode";
    svg::emit_plot(seed_dir / "regret.csv", spec, seed_dir / "perturbations_curve.svg");
    outcome.files.push_back(seed_dir / "perturbations_curve.svg");
  }

  const resilience::RegretEpisode& last = result.log.episodes.back();
  std::vector<std::pair<std::string, std::string>> meta;
  meta.emplace_back("seed", std::to_string(seed));
  meta.emplace_back("victim", victim_kind);
  meta.emplace_back("quasi_stable_step", note_value(result.log.quasi_stable_step));
  meta.emplace_back("quasi_stable_episode", note_value(result.log.quasi_stable_episode));
  meta.emplace_back("final_ma100_regret", csv::format(last.ma100_regret));
  meta.emplace_back("final_ma100_perturbations", csv::format(last.ma100_perturbations));
  write_meta(seed_dir, meta, outcome.files);

  std::ostringstream note;
  note << "seed " << seed << ": final regret ma100 " << csv::format(last.ma100_regret)
       << ", perturbations ma100 " << csv::format(last.ma100_perturbations)
       << ", quasi_stable_step " << note_value(result.log.quasi_stable_step);
  outcome.note = note.str();
  return outcome;
}

SeedOutcome run_sweep_seed(const fs::path& seed_dir, const tabular::SweepConfig& config,
                           std::uint64_t seed) {
  fs::create_directories(seed_dir);
  SeedOutcome outcome;

  const std::vector<tabular::SweepCell> cells = tabular::run_sweep(config, seed);

  const auto write_cells = [&](const std::string& mdp, const fs::path& path) {
    csv::Writer sweep(path, "tabular_sweep.v1",
                      {"p_attack", "seed", "mode", "converged", "episodes_to_converge"});
    for (const tabular::SweepCell& cell : cells) {
      if (cell.mdp_name != mdp) continue;
      sweep.row({csv::format(cell.p_attack), std::to_string(cell.seed),
                 attack::to_string(cell.mode), csv::format(static_cast<long>(cell.converged)),
                 csv::format(cell.episodes_to_converge)});
    }
    outcome.files.push_back(path);
  };
  if (config.include_chain) write_cells("chain", seed_dir / "sweep_chain.csv");
  if (config.include_gridworld) write_cells("gridworld", seed_dir / "sweep_gridworld.csv");

  // convergence rate per (mdp, p)
  {
    csv::Writer rates(seed_dir / "sweep_rates.csv", "tabular_sweep_rates.v1",
                      {"p_attack", "mdp", "converged_rate"});
    for (const char* mdp : {"chain", "gridworld"}) {
      for (const double p : config.p_attacks) {
        long total = 0;
        long converged = 0;
        for (const tabular::SweepCell& cell : cells) {
          if (cell.mdp_name != mdp || cell.p_attack != p) continue;
          ++total;
          converged += cell.converged ? 1 : 0;
        }
        if (total == 0) continue;
        rates.row({csv::format(p), mdp,
                   csv::format(static_cast<double>(converged) / static_cast<double>(total))});
      }
    }
    outcome.files.push_back(seed_dir / "sweep_rates.csv");
  }

  std::ostringstream note;
  note << "seed " << seed << ": " << cells.size() << " sweep cells";
  outcome.note = note.str();
  return outcome;
}

void forbid_sections(const config::ConfigFile& file, const std::string& name,
                     const std::vector<std::string>& sections) {
  for (const std::string& section : sections) {
    if (file.has_section(section)) {
      throw std::invalid_argument("section [" + section + "] is not used by experiment '" +
                                  name + "'");
    }
  }
}

void check_forced_strategy(const config::ConfigFile& file, explore::Strategy forced,
                           const std::string& name) {
  if (const auto v = file.get("trainer", "strategy")) {
    if (explore::strategy_from_string(*v) != forced) {
      throw std::invalid_argument("experiment '" + name + "' fixes trainer.strategy = " +
                                  explore::to_string(forced) + ", got " + *v);
    }
  }
}

std::string sanitized(const std::string& name) {
  std::string out = name;
  for (char& c : out) {
    if (c == ':' || c == '=' || c == '.') c = '_';
  }
  return out;
}

}  // namespace

RunSummary run_from_config(const std::filesystem::path& config_path) {
  const config::ConfigFile file = config::parse_file(config_path);
  config::require_known(file, config_schema());

  const std::string name = file.get_string("experiment", "name");
  const ParsedName parsed = parse_experiment_name(name);

  std::vector<std::uint64_t> seeds;
  for (const long s : config::parse_long_list(file.get_string("experiment", "seeds", "1"))) {
    if (s < 0) throw std::invalid_argument("seeds must be non-negative");
    seeds.push_back(static_cast<std::uint64_t>(s));
  }
  if (seeds.empty()) throw std::invalid_argument("experiment needs at least one seed");

  fs::path out_dir = file.get_string("experiment", "output", sanitized(name));
  if (out_dir.is_relative()) out_dir = output_root() / out_dir;
  fs::create_directories(out_dir);

  RunSummary summary;
  summary.experiment = name;
  summary.output_dir = out_dir;

  fs::copy_file(config_path, out_dir / "config.ini", fs::copy_options::overwrite_existing);
  summary.files.push_back(out_dir / "config.ini");

  for (const std::uint64_t seed : seeds) {
    const fs::path seed_dir = out_dir / ("seed-" + std::to_string(seed));
    SeedOutcome outcome;
    switch (parsed.family) {
      case Family::kNominal: {
        forbid_sections(file, name, {"attack", "adversary", "resilience", "sweep"});
        check_forced_strategy(file, parsed.nominal_strategy, name);
        train::TrainerConfig config = trainer_config_from(file);
        config.strategy = parsed.nominal_strategy;
        outcome = run_training_seed(seed_dir, config, seed);
        break;
      }
      case Family::kAttackTrain: {
        forbid_sections(file, name, {"adversary", "resilience", "sweep"});
        train::TrainerConfig base;
        base.sampler = train::Sampler::kUniform;
        base.strategy = explore::Strategy::kEpsGreedy;
        base.post_attack_timesteps = 50000;
        train::TrainerConfig config = trainer_config_from(file, base);
        apply_attack_section(file, config);
        if (file.get("attack", "p_attack") &&
            std::abs(file.get_double("attack", "p_attack") - parsed.attack_p) > 1e-12) {
          throw std::invalid_argument("attack.p_attack contradicts the experiment name '" +
                                      name + "'");
        }
        config.attack = config.attack.value_or(attack::AttackSpec{});
        config.attack->p_attack = parsed.attack_p;
        outcome = run_training_seed(seed_dir, config, seed);
        break;
      }
      case Family::kResilience: {
        forbid_sections(file, name, {"attack", "sweep"});
        outcome = run_resilience_seed(seed_dir, file, parsed.victim, seed);
        break;
      }
      case Family::kTabularSweep: {
        forbid_sections(file, name, {"trainer", "attack", "adversary", "resilience"});
        outcome = run_sweep_seed(seed_dir, sweep_config_from(file), seed);
        break;
      }
    }
    summary.notes.push_back(outcome.note);
    summary.files.insert(summary.files.end(), outcome.files.begin(), outcome.files.end());
  }

  manifest::write_manifest(out_dir);
  summary.files.push_back(out_dir / manifest::kManifestName);
  return summary;
}

}  // namespace agelab::experiments
