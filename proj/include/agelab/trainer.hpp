#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "agelab/attacks.hpp"
#include "agelab/exploration.hpp"
#include "agelab/neural.hpp"
#include "agelab/replay.hpp"
#include "agelab/rng.hpp"

namespace agelab::train {

enum class Sampler { kUniform, kPrioritized };

Sampler sampler_from_string(std::string_view name);
std::string to_string(Sampler sampler);

enum class AttackStart { kImmediately, kAfterConvergence };

AttackStart attack_start_from_string(std::string_view name);
std::string to_string(AttackStart start);

struct TrainerConfig {
  long total_timesteps = 100000;
  double gamma = 0.99;
  double learning_rate = 1e-3;
  std::size_t buffer_size = 50000;
  long first_learning_step = 1000;
  long target_update_freq = 500;
  int batch_size = 32;  // absent from the hyperparameter tables; standard value
  int train_freq = 1;
  Sampler sampler = Sampler::kPrioritized;
  explore::Strategy strategy = explore::Strategy::kEpsGreedy;
  explore::Schedule schedule;  // horizon pinned to total_timesteps by train()
  std::vector<int> hidden_dims = {64, 64};
  neural::Activation activation = neural::Activation::kTanh;
  double priority_alpha = 0.6;
  double beta_initial = 0.4;  // prioritized importance exponent, annealed to beta_final
  double beta_final = 1.0;
  explore::ParamNoiseState param_noise;
  double age_temperature_override = -1.0;  // < 0 couples temperature to epsilon

  std::optional<attack::AttackSpec> attack;
  AttackStart attack_start = AttackStart::kAfterConvergence;
  double convergence_threshold = 475.0;
  int convergence_window = 100;
  // When set and the attack activates, the run extends to exactly this many
  // steps past attack start, overriding total_timesteps.
  std::optional<long> post_attack_timesteps;

  // Throws std::invalid_argument on contradictions (e.g. a batch larger than
  // the buffer can hold by the first learning step).
  void validate() const;
};

struct StepRecord {
  long step = 0;     // 1-based global timestep
  long episode = 0;  // 0-based episode index
  double episode_reward = 0.0;  // accumulated within the episode so far
  double epsilon = 0.0;
  double loss = 0.0;  // NaN on steps without a gradient update
  bool attacked = false;
};

struct EpisodeRecord {
  long episode = 0;
  long end_step = 0;
  double reward = 0.0;
  double ma100 = 0.0;  // NaN until convergence_window episodes exist
};

struct TrainLog {
  std::vector<StepRecord> steps;
  std::vector<EpisodeRecord> episodes;
  std::vector<long> target_sync_steps;
  std::optional<long> convergence_step;              // first window-mean crossing
  std::optional<long> attack_start_step;             // first attack-eligible step
  std::optional<std::uint64_t> attack_start_push;    // buffer push count at that moment
  std::optional<std::uint64_t> overwrite_pushes;     // pushes after attack start at which
                                                     // the last pre-attack entry left the buffer
  double final_perturbed_fraction = 0.0;             // buffer composition at the end
};

struct TrainResult {
  neural::QNetwork network;
  TrainLog log;
};

// Maps a stored 4-dim state to the network's input vector; empty = plain copy.
// Lets callers whose networks consume augmented observations reuse the
// learning step (the augmentation must be a pure function of the state).
using ObsLift = std::function<neural::Vector(const std::array<double, 4>&)>;

// r + gamma * max_a Q_target(s', a), or r alone on terminal transitions.
double td_target(const replay::Experience& experience, const neural::QNetwork& target_net,
                 double gamma, const ObsLift& lift = {});

// One gradient step: sample a batch, regress onto td_targets against the
// target network, apply Adam, and (prioritized only) push |TD-error|
// priorities back. Returns the batch loss.
double dqn_learn_step(neural::QNetwork& online, const neural::QNetwork& target_net,
                      neural::Adam& adam, replay::ReplayBuffer& buffer, double gamma,
                      int batch_size, Sampler sampler, double beta, Rng& rng,
                      const ObsLift& lift = {});

// Full training loop on the cart-pole environment.
TrainResult train(const TrainerConfig& config, Rng& rng);

struct EvalStats {
  double mean = 0.0;
  double stddev = 0.0;  // population form
};

// Greedy rollouts, no exploration, no attack.
EvalStats evaluate(const neural::QNetwork& net, int episodes, Rng& rng);

// First step at which the window-episode moving average reaches the
// threshold.
std::optional<long> detect_convergence(const TrainLog& log, double threshold = 475.0,
                                       int window = 100);

}  // namespace agelab::train
