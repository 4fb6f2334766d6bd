#pragma once

#include <optional>
#include <vector>

#include "agelab/attacks.hpp"
#include "agelab/exploration.hpp"
#include "agelab/neural.hpp"
#include "agelab/rng.hpp"
#include "agelab/trainer.hpp"

namespace agelab::resilience {

// Benchmark adversary: a DQN that watches a frozen victim play cart-pole and
// decides, step by step, whether to perturb the victim's observation
// (targeted crafting) at cost c_adv per perturbation. Its reward is the
// negative of the victim's, minus the cost, so maximizing return maximizes
// victim regret net of perturbation spend.
struct AdversaryConfig {
  long max_timesteps = 100000;
  double gamma = 0.99;
  double learning_rate = 1e-3;
  std::size_t buffer_size = 50000;
  long first_learning_step = 1000;
  long target_update_freq = 500;
  int batch_size = 32;
  int train_freq = 1;
  train::Sampler sampler = train::Sampler::kPrioritized;
  explore::Strategy strategy = explore::Strategy::kParamNoise;
  explore::Schedule schedule;  // horizon pinned to max_timesteps
  std::vector<int> hidden_dims = {64, 64};
  neural::Activation activation = neural::Activation::kTanh;
  double priority_alpha = 0.6;
  double beta_initial = 0.4;
  double beta_final = 1.0;
  explore::ParamNoiseState param_noise;

  double c_adv = 1.0;
  attack::AttackSpec perturbation{1.0, attack::Mode::kTargeted, 0.05, 5, 0.5, true, 1.0};
  bool observe_victim_q = false;  // append the victim's Q-values to the input

  int quasi_stable_window = 200;
  double quasi_stable_tolerance = 0.05;

  void validate() const;
};

struct RegretEpisode {
  long episode = 0;
  long end_step = 0;
  double victim_reward = 0.0;
  double regret = 0.0;  // 500 - victim_reward
  long perturbations = 0;
  double ma100_regret = 0.0;         // NaN until 100 episodes exist
  double ma100_perturbations = 0.0;  // NaN until 100 episodes exist
};

struct RegretLog {
  std::vector<RegretEpisode> episodes;
  std::optional<long> quasi_stable_step;     // first step the criterion held
  std::optional<long> quasi_stable_episode;
};

struct AdversaryResult {
  neural::QNetwork adversary;
  RegretLog log;
};

// -victim_step_reward - c_adv * [attacked].
double adversary_step_reward(double victim_step_reward, bool attacked, double c_adv);

// Trains the adversary for max_timesteps; the victim is never updated.
AdversaryResult train_adversary(const neural::QNetwork& victim, const AdversaryConfig& config,
                                Rng& rng);

// True iff the 100-episode mean perturbation count varied by less than
// `tolerance` (relative to the window mean) over the last `window` episodes.
// Throws std::invalid_argument with fewer than `window` episodes logged.
bool quasi_stable(const RegretLog& log, int window = 200, double tolerance = 0.05);

}  // namespace agelab::resilience
