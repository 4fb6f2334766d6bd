#include "agelab/resilience.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "agelab/cartpole.hpp"
#include "agelab/rolling.hpp"

namespace agelab::resilience {

namespace {

int select_adversary_action(explore::Strategy strategy, const neural::Vector& q,
                            double epsilon, Rng& rng) {
  switch (strategy) {
    case explore::Strategy::kEpsGreedy:
      return explore::eps_greedy_select(q, epsilon, rng);
    case explore::Strategy::kBoltzmann:
      return explore::boltzmann_select(q, std::max(epsilon, 1e-3), rng);
    case explore::Strategy::kAge:
      return explore::age_select(q, epsilon, rng);
    case explore::Strategy::kParamNoise:
      return explore::argmax(q);
  }
  throw std::logic_error("unhandled strategy");
}

// Variation of the trailing ma100 perturbation counts, relative to their mean.
bool window_is_stable(const std::vector<RegretEpisode>& episodes, int window,
                      double tolerance) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  double mean = 0.0;
  for (std::size_t i = episodes.size() - window; i < episodes.size(); ++i) {
    const double value = episodes[i].ma100_perturbations;
    if (std::isnan(value)) return false;
    lo = std::min(lo, value);
    hi = std::max(hi, value);
    mean += value;
  }
  mean /= window;
  return hi - lo < tolerance * std::max(mean, 1e-12);
}

}  // namespace

void AdversaryConfig::validate() const {
  if (max_timesteps <= 0) throw std::invalid_argument("max_timesteps must be positive");
  if (gamma < 0.0 || gamma >= 1.0) throw std::invalid_argument("gamma must lie in [0, 1)");
  if (learning_rate <= 0.0) throw std::invalid_argument("learning_rate must be positive");
  if (buffer_size == 0) throw std::invalid_argument("buffer_size must be positive");
  if (batch_size <= 0) throw std::invalid_argument("batch_size must be positive");
  if (train_freq <= 0) throw std::invalid_argument("train_freq must be positive");
  if (target_update_freq <= 0) {
    throw std::invalid_argument("target_update_freq must be positive");
  }
  if (c_adv < 0.0) throw std::invalid_argument("c_adv must be non-negative");
  if (quasi_stable_window <= 0) {
    throw std::invalid_argument("quasi_stable_window must be positive");
  }
  if (quasi_stable_tolerance <= 0.0) {
    throw std::invalid_argument("quasi_stable_tolerance must be positive");
  }
  if (hidden_dims.empty()) throw std::invalid_argument("need at least one hidden layer");
  perturbation.validate();
}

double adversary_step_reward(double victim_step_reward, bool attacked, double c_adv) {
  return -victim_step_reward - (attacked ? c_adv : 0.0);
}

AdversaryResult train_adversary(const neural::QNetwork& victim, const AdversaryConfig& config,
                                Rng& rng) {
  config.validate();
  if (victim.input_dim() != 4) {
    throw std::invalid_argument("train_adversary: victim must consume 4-dim observations");
  }

  Rng init_rng = rng.split("adversary-init");
  Rng env_rng = rng.split("env");
  Rng explore_rng = rng.split("exploration");
  Rng replay_rng = rng.split("replay");

  const int input_dim = config.observe_victim_q ? 4 + victim.num_actions() : 4;
  std::vector<int> dims;
  dims.push_back(input_dim);
  dims.insert(dims.end(), config.hidden_dims.begin(), config.hidden_dims.end());
  dims.push_back(2);  // {no-op, perturb}

  neural::QNetwork online = neural::QNetwork::make(dims, config.activation, init_rng);
  neural::QNetwork target = online.clone();
  neural::Adam adam = neural::Adam::for_network(online, config.learning_rate);
  replay::ReplayBuffer buffer(config.buffer_size, config.priority_alpha);

  train::ObsLift lift;
  if (config.observe_victim_q) {
    lift = [&victim](const std::array<double, 4>& state) {
      neural::Vector obs(4);
      for (int i = 0; i < 4; ++i) obs(i) = state[i];
      const neural::Vector q = victim.forward(obs);
      neural::Vector augmented(4 + q.size());
      augmented.head(4) = obs;
      augmented.tail(q.size()) = q;
      return augmented;
    };
  }
  const auto adversary_input = [&](const std::array<double, 4>& state) {
    if (lift) return lift(state);
    neural::Vector v(4);
    for (int i = 0; i < 4; ++i) v(i) = state[i];
    return v;
  };

  explore::Schedule schedule = config.schedule;
  schedule.total_timesteps = config.max_timesteps;

  const bool use_param_noise = config.strategy == explore::Strategy::kParamNoise;
  explore::ParamNoiseState noise_state = config.param_noise;
  neural::QNetwork noisy =
      use_param_noise ? explore::param_noise_perturb(online, noise_state, explore_rng) : online;

  RegretLog log;
  cartpole::EnvState state = cartpole::reset(env_rng);
  double victim_reward_sum = 0.0;
  long perturbation_count = 0;
  long episode = 0;
  RollingMean regret_mean(100);
  RollingMean perturbation_mean(100);

  for (long step = 1; step <= config.max_timesteps; ++step) {
    const double epsilon = schedule.epsilon_at(step - 1);
    const std::array<double, 4> true_obs = state.obs();
    const neural::Vector adv_obs = adversary_input(true_obs);

    const neural::Vector adv_q =
        use_param_noise ? noisy.forward(adv_obs) : online.forward(adv_obs);
    const int adv_action = select_adversary_action(config.strategy, adv_q, epsilon, explore_rng);
    const bool attacked = adv_action == 1;

    int victim_action;
    if (attacked) {
      const attack::CraftResult crafted = attack::craft(config.perturbation, victim, true_obs);
      if (crafted.success) {
        victim_action = crafted.induced_action;
      } else {
        neural::Vector seen(4);
        for (int i = 0; i < 4; ++i) seen(i) = crafted.perturbed_observation[i];
        victim_action = explore::argmax(victim.forward(seen));
      }
    } else {
      neural::Vector seen(4);
      for (int i = 0; i < 4; ++i) seen(i) = true_obs[i];
      victim_action = explore::argmax(victim.forward(seen));
    }

    const cartpole::StepResult result = cartpole::step(state, victim_action);
    victim_reward_sum += result.reward;
    if (attacked) ++perturbation_count;

    buffer.push({true_obs, adv_action, adversary_step_reward(result.reward, attacked, config.c_adv),
                 result.next_state.obs(), result.terminated, false});

    if (step >= config.first_learning_step && step % config.train_freq == 0 &&
        buffer.size() >= static_cast<std::size_t>(config.batch_size)) {
      const double anneal = std::min(1.0, static_cast<double>(step) / config.max_timesteps);
      const double beta = config.beta_initial + (config.beta_final - config.beta_initial) * anneal;
      train::dqn_learn_step(online, target, adam, buffer, config.gamma, config.batch_size,
                            config.sampler, beta, replay_rng, lift);
    }

    if (step % config.target_update_freq == 0) target = online.clone();

    if (result.terminated) {
      regret_mean.push(cartpole::kMaxEpisodeSteps - victim_reward_sum);
      perturbation_mean.push(static_cast<double>(perturbation_count));
      RegretEpisode record;
      record.episode = episode;
      record.end_step = step;
      record.victim_reward = victim_reward_sum;
      record.regret = cartpole::kMaxEpisodeSteps - victim_reward_sum;
      record.perturbations = perturbation_count;
      record.ma100_regret = regret_mean.mean();
      record.ma100_perturbations = perturbation_mean.mean();
      log.episodes.push_back(record);

      if (!log.quasi_stable_step &&
          log.episodes.size() >= static_cast<std::size_t>(config.quasi_stable_window) &&
          window_is_stable(log.episodes, config.quasi_stable_window,
                           config.quasi_stable_tolerance)) {
        log.quasi_stable_step = step;
        log.quasi_stable_episode = episode;
      }

      if (use_param_noise) {
        if (buffer.size() >= static_cast<std::size_t>(config.batch_size)) {
          const std::vector<replay::Sample> probe =
              buffer.sample_uniform(static_cast<std::size_t>(config.batch_size), explore_rng);
          neural::Matrix observations(input_dim, static_cast<Eigen::Index>(probe.size()));
          for (std::size_t i = 0; i < probe.size(); ++i) {
            observations.col(static_cast<Eigen::Index>(i)) =
                adversary_input(probe[i].experience.state);
          }
          const double divergence = explore::action_divergence(noisy, online, observations);
          noise_state.divergence_threshold = epsilon * (1.0 - 1.0 / online.num_actions());
          explore::param_noise_adapt(noise_state, divergence);
        }
        noisy = explore::param_noise_perturb(online, noise_state, explore_rng);
      }

      state = cartpole::reset(env_rng);
      victim_reward_sum = 0.0;
      perturbation_count = 0;
      ++episode;
    } else {
      state = result.next_state;
    }
  }

  return {std::move(online), std::move(log)};
}

bool quasi_stable(const RegretLog& log, int window, double tolerance) {
  if (window <= 0) throw std::invalid_argument("quasi_stable: window must be positive");
  if (log.episodes.size() < static_cast<std::size_t>(window)) {
    throw std::invalid_argument("quasi_stable: insufficient history");
  }
  return window_is_stable(log.episodes, window, tolerance);
}

}  // namespace agelab::resilience
