#include "agelab/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "agelab/cartpole.hpp"
#include "agelab/rolling.hpp"

namespace agelab::train {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

neural::Vector lift_or_copy(const ObsLift& lift, const std::array<double, 4>& state) {
  if (lift) return lift(state);
  neural::Vector v(4);
  for (int i = 0; i < 4; ++i) v(i) = state[i];
  return v;
}

}  // namespace

Sampler sampler_from_string(std::string_view name) {
  if (name == "uniform") return Sampler::kUniform;
  if (name == "prioritized") return Sampler::kPrioritized;
  throw std::invalid_argument("unknown sampler: " + std::string(name));
}

std::string to_string(Sampler sampler) {
  return sampler == Sampler::kUniform ? "uniform" : "prioritized";
}

AttackStart attack_start_from_string(std::string_view name) {
  if (name == "immediately") return AttackStart::kImmediately;
  if (name == "after_convergence") return AttackStart::kAfterConvergence;
  throw std::invalid_argument("unknown attack start: " + std::string(name));
}

std::string to_string(AttackStart start) {
  return start == AttackStart::kImmediately ? "immediately" : "after_convergence";
}

void TrainerConfig::validate() const {
  if (total_timesteps <= 0) throw std::invalid_argument("total_timesteps must be positive");
  if (gamma < 0.0 || gamma >= 1.0) throw std::invalid_argument("gamma must lie in [0, 1)");
  if (learning_rate <= 0.0) throw std::invalid_argument("learning_rate must be positive");
  if (buffer_size == 0) throw std::invalid_argument("buffer_size must be positive");
  if (batch_size <= 0) throw std::invalid_argument("batch_size must be positive");
  if (train_freq <= 0) throw std::invalid_argument("train_freq must be positive");
  if (target_update_freq <= 0) {
    throw std::invalid_argument("target_update_freq must be positive");
  }
  if (static_cast<std::size_t>(batch_size) > buffer_size) {
    throw std::invalid_argument("batch_size exceeds buffer_size");
  }
  // one push per step, minus the one-step experience delay
  if (first_learning_step < batch_size + 1) {
    throw std::invalid_argument(
        "batch_size exceeds buffer occupancy at first_learning_step");
  }
  if (convergence_window <= 0) throw std::invalid_argument("convergence_window must be positive");
  if (post_attack_timesteps && *post_attack_timesteps <= 0) {
    throw std::invalid_argument("post_attack_timesteps must be positive");
  }
  for (const int dim : hidden_dims) {
    if (dim <= 0) throw std::invalid_argument("hidden layer dims must be positive");
  }
  if (hidden_dims.empty()) throw std::invalid_argument("need at least one hidden layer");
  if (attack) attack->validate();
}

double td_target(const replay::Experience& experience, const neural::QNetwork& target_net,
                 double gamma, const ObsLift& lift) {
  if (experience.terminal) return experience.reward;
  const neural::Vector next = lift_or_copy(lift, experience.next_state);
  return experience.reward + gamma * target_net.forward(next).maxCoeff();
}

double dqn_learn_step(neural::QNetwork& online, const neural::QNetwork& target_net,
                      neural::Adam& adam, replay::ReplayBuffer& buffer, double gamma,
                      int batch_size, Sampler sampler, double beta, Rng& rng,
                      const ObsLift& lift) {
  const std::size_t n = static_cast<std::size_t>(batch_size);
  const std::vector<replay::Sample> samples = sampler == Sampler::kUniform
                                                  ? buffer.sample_uniform(n, rng)
                                                  : buffer.sample_prioritized(n, beta, rng);
  std::vector<neural::BatchEntry> batch;
  batch.reserve(samples.size());
  for (const replay::Sample& sample : samples) {
    neural::BatchEntry entry;
    entry.observation = lift_or_copy(lift, sample.experience.state);
    entry.action = sample.experience.action;
    entry.td_target = td_target(sample.experience, target_net, gamma, lift);
    entry.weight = sample.importance_weight;
    batch.push_back(std::move(entry));
  }
  const neural::Gradients grads = neural::loss_and_gradients(online, batch);
  adam.step(online, grads);
  if (sampler == Sampler::kPrioritized) {
    std::vector<std::uint64_t> ids(samples.size());
    std::vector<double> errors(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      ids[i] = samples[i].id;
      errors[i] = grads.td_errors(static_cast<Eigen::Index>(i));
    }
    buffer.update_priorities(ids, errors);
  }
  return grads.loss;
}

namespace {

struct PendingExperience {
  std::array<double, 4> observed{};
  int action = 0;
  double reward = 0.0;
  bool attacked = false;
};

int select_action(const TrainerConfig& config, const neural::QNetwork& online,
                  const neural::QNetwork& noisy, const neural::Vector& observation,
                  double epsilon, const std::optional<int>& hint, Rng& rng) {
  neural::Vector q = config.strategy == explore::Strategy::kParamNoise
                         ? noisy.forward(observation)
                         : online.forward(observation);
  int action;
  switch (config.strategy) {
    case explore::Strategy::kEpsGreedy:
      action = explore::eps_greedy_select(q, epsilon, rng);
      break;
    case explore::Strategy::kBoltzmann:
      action = explore::boltzmann_select(q, std::max(epsilon, 1e-3), rng);
      break;
    case explore::Strategy::kAge:
      action = explore::age_select(q, epsilon, rng, config.age_temperature_override);
      break;
    case explore::Strategy::kParamNoise:
      action = explore::argmax(q);
      break;
    default:
      throw std::logic_error("unhandled strategy");
  }
  // A crafted observation works by making the greedy choice the induced
  // action; when crafting fell back to the oracle we emulate that success,
  // but only on greedy picks so exploration still overrides.
  if (hint && action == explore::argmax(q)) action = *hint;
  return action;
}

}  // namespace

TrainResult train(const TrainerConfig& config, Rng& rng) {
  config.validate();

  Rng init_rng = rng.split("init");
  Rng env_rng = rng.split("env");
  Rng explore_rng = rng.split("exploration");
  Rng attack_rng = rng.split("attack");
  Rng replay_rng = rng.split("replay");

  std::vector<int> dims;
  dims.push_back(4);
  dims.insert(dims.end(), config.hidden_dims.begin(), config.hidden_dims.end());
  dims.push_back(2);

  neural::QNetwork online = neural::QNetwork::make(dims, config.activation, init_rng);
  neural::QNetwork target = online.clone();
  neural::Adam adam = neural::Adam::for_network(online, config.learning_rate);
  replay::ReplayBuffer buffer(config.buffer_size, config.priority_alpha);

  explore::Schedule schedule = config.schedule;
  schedule.total_timesteps = config.total_timesteps;

  const bool use_param_noise = config.strategy == explore::Strategy::kParamNoise;
  explore::ParamNoiseState noise_state = config.param_noise;
  neural::QNetwork noisy =
      use_param_noise ? explore::param_noise_perturb(online, noise_state, explore_rng) : online;

  TrainLog log;
  log.steps.reserve(static_cast<std::size_t>(config.total_timesteps));

  cartpole::EnvState state = cartpole::reset(env_rng);
  double episode_reward = 0.0;
  long episode = 0;
  RollingMean window_mean(config.convergence_window);
  std::optional<PendingExperience> pending;

  bool attack_active = config.attack && config.attack_start == AttackStart::kImmediately;
  long horizon = config.total_timesteps;
  if (attack_active) {
    log.attack_start_step = 1;
    log.attack_start_push = 0;
    if (config.post_attack_timesteps) horizon = *config.post_attack_timesteps;
  }

  const auto after_push = [&]() {
    if (log.attack_start_push && !log.overwrite_pushes &&
        buffer.count_pushed_before(*log.attack_start_push) == 0) {
      log.overwrite_pushes = buffer.push_count() - *log.attack_start_push;
    }
  };

  for (long step = 1; step <= horizon; ++step) {
    const double epsilon = schedule.epsilon_at(step - 1);
    const std::array<double, 4> true_obs = state.obs();

    attack::StepPerception perception;
    perception.observed = true_obs;
    if (attack_active) {
      perception = attack::apply_to_step(*config.attack, online, true_obs, attack_rng);
    }

    if (pending) {
      buffer.push({pending->observed, pending->action, pending->reward, perception.observed,
                   false, pending->attacked});
      after_push();
      pending.reset();
    }

    neural::Vector obs_vec(4);
    for (int i = 0; i < 4; ++i) obs_vec(i) = perception.observed[i];
    const int action = select_action(config, online, noisy, obs_vec, epsilon,
                                     perception.induced_action_hint, explore_rng);

    const cartpole::StepResult result = cartpole::step(state, action);
    episode_reward += result.reward;

    if (result.terminated) {
      buffer.push({perception.observed, action, result.reward, result.next_state.obs(), true,
                   perception.attacked});
      after_push();
    } else {
      pending = PendingExperience{perception.observed, action, result.reward,
                                  perception.attacked};
    }

    double loss = kNaN;
    if (step >= config.first_learning_step && step % config.train_freq == 0 &&
        buffer.size() >= static_cast<std::size_t>(config.batch_size)) {
      const double anneal = std::min(1.0, static_cast<double>(step) / config.total_timesteps);
      const double beta = config.beta_initial + (config.beta_final - config.beta_initial) * anneal;
      loss = dqn_learn_step(online, target, adam, buffer, config.gamma, config.batch_size,
                            config.sampler, beta, replay_rng);
    }

    if (step % config.target_update_freq == 0) {
      target = online.clone();
      log.target_sync_steps.push_back(step);
    }

    log.steps.push_back({step, episode, episode_reward, epsilon, loss, perception.attacked});

    if (result.terminated) {
      window_mean.push(episode_reward);
      log.episodes.push_back({episode, step, episode_reward, window_mean.mean()});

      const bool crossed = window_mean.full() &&
                           window_mean.mean() >= config.convergence_threshold;
      if (crossed && !log.convergence_step) log.convergence_step = step;
      if (crossed && config.attack && !attack_active &&
          config.attack_start == AttackStart::kAfterConvergence) {
        attack_active = true;
        log.attack_start_step = step + 1;
        log.attack_start_push = buffer.push_count();
        if (config.post_attack_timesteps) horizon = step + *config.post_attack_timesteps;
      }

      if (use_param_noise) {
        if (buffer.size() >= static_cast<std::size_t>(config.batch_size)) {
          const std::vector<replay::Sample> probe =
              buffer.sample_uniform(static_cast<std::size_t>(config.batch_size), explore_rng);
          neural::Matrix observations(4, static_cast<Eigen::Index>(probe.size()));
          for (std::size_t i = 0; i < probe.size(); ++i) {
            for (int d = 0; d < 4; ++d) {
              observations(d, static_cast<Eigen::Index>(i)) = probe[i].experience.state[d];
            }
          }
          const double divergence = explore::action_divergence(noisy, online, observations);
          noise_state.divergence_threshold = epsilon * (1.0 - 1.0 / online.num_actions());
          explore::param_noise_adapt(noise_state, divergence);
        }
        noisy = explore::param_noise_perturb(online, noise_state, explore_rng);
      }

      state = cartpole::reset(env_rng);
      episode_reward = 0.0;
      ++episode;
    } else {
      state = result.next_state;
    }
  }

  log.final_perturbed_fraction = buffer.composition().second;
  return {std::move(online), std::move(log)};
}

EvalStats evaluate(const neural::QNetwork& net, int episodes, Rng& rng) {
  if (episodes < 1) throw std::invalid_argument("evaluate: episodes must be >= 1");
  std::vector<double> rewards;
  rewards.reserve(static_cast<std::size_t>(episodes));
  for (int e = 0; e < episodes; ++e) {
    cartpole::EnvState state = cartpole::reset(rng);
    double total = 0.0;
    while (!cartpole::is_terminal(state)) {
      neural::Vector obs(4);
      const std::array<double, 4> raw = state.obs();
      for (int i = 0; i < 4; ++i) obs(i) = raw[i];
      const cartpole::StepResult result = cartpole::step(state, explore::argmax(net.forward(obs)));
      total += result.reward;
      state = result.next_state;
    }
    rewards.push_back(total);
  }
  double mean = 0.0;
  for (const double r : rewards) mean += r;
  mean /= rewards.size();
  double variance = 0.0;
  for (const double r : rewards) variance += (r - mean) * (r - mean);
  variance /= rewards.size();
  return {mean, std::sqrt(variance)};
}

std::optional<long> detect_convergence(const TrainLog& log, double threshold, int window) {
  RollingMean mean(window);
  for (const EpisodeRecord& record : log.episodes) {
    mean.push(record.reward);
    if (mean.full() && mean.mean() >= threshold) return record.end_step;
  }
  return std::nullopt;
}

}  // namespace agelab::train
