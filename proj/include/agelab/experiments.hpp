#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "agelab/config.hpp"
#include "agelab/resilience.hpp"
#include "agelab/tabular.hpp"
#include "agelab/trainer.hpp"

namespace agelab::experiments {

// Output root: $AGELAB_OUT when set, else the working directory. Relative
// [experiment].output paths resolve against it.
std::filesystem::path output_root();

enum class Family { kNominal, kAttackTrain, kResilience, kTabularSweep };

struct ParsedName {
  Family family = Family::kNominal;
  explore::Strategy nominal_strategy = explore::Strategy::kEpsGreedy;  // nominal family
  double attack_p = 0.0;                                               // attack-train family
  std::string victim;                                                  // resilience family
};

// Grammar: nominal-epsgreedy | nominal-age | nominal-paramnoise |
// attack-train:p=<x> | resilience:<epsgreedy|age> | tabular-sweep.
// Throws std::invalid_argument on anything else, listing the registry.
ParsedName parse_experiment_name(const std::string& name);
std::vector<std::string> known_experiment_names();

// Section -> module config builders; file values override the given base
// (which carries the experiment family's defaults).
train::TrainerConfig trainer_config_from(const config::ConfigFile& file,
                                         train::TrainerConfig base = {});
void apply_attack_section(const config::ConfigFile& file, train::TrainerConfig& config);
resilience::AdversaryConfig adversary_config_from(const config::ConfigFile& file,
                                                  resilience::AdversaryConfig base = {});
tabular::SweepConfig sweep_config_from(const config::ConfigFile& file,
                                       tabular::SweepConfig base = {});

// Full key schema for experiment config files; used for fail-fast validation.
const std::map<std::string, std::set<std::string>>& config_schema();

struct RunSummary {
  std::string experiment;
  std::filesystem::path output_dir;
  std::vector<std::filesystem::path> files;  // everything emitted, manifest last
  std::vector<std::string> notes;            // one line per seed
};

// Executes the experiment named in [experiment] for every listed seed,
// writing per-seed CSV logs, checkpoints, SVG plots, a config snapshot, and
// a checksum manifest into the output directory.
RunSummary run_from_config(const std::filesystem::path& config_path);

}  // namespace agelab::experiments
