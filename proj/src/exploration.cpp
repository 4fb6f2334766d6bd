#include "agelab/exploration.hpp"

#include <cmath>
#include <stdexcept>

namespace agelab::explore {

Strategy strategy_from_string(std::string_view name) {
  if (name == "eps_greedy") return Strategy::kEpsGreedy;
  if (name == "boltzmann") return Strategy::kBoltzmann;
  if (name == "param_noise") return Strategy::kParamNoise;
  if (name == "age") return Strategy::kAge;
  throw std::invalid_argument("unknown exploration strategy: " + std::string(name));
}

std::string to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::kEpsGreedy: return "eps_greedy";
    case Strategy::kBoltzmann: return "boltzmann";
    case Strategy::kParamNoise: return "param_noise";
    case Strategy::kAge: return "age";
  }
  return "unknown";
}

double Schedule::epsilon_at(long step) const {
  if (step < 0) throw std::invalid_argument("epsilon_at: negative step");
  const double decay_steps = exploration_fraction * static_cast<double>(total_timesteps);
  if (decay_steps <= 0.0 || step >= decay_steps) return final_epsilon;
  const double frac = static_cast<double>(step) / decay_steps;
  return initial_epsilon + frac * (final_epsilon - initial_epsilon);
}

int argmax(const Vector& values) {
  int best = 0;
  for (int i = 1; i < values.size(); ++i) {
    if (values(i) > values(best)) best = i;
  }
  return best;
}

int argmin(const Vector& values) {
  int best = 0;
  for (int i = 1; i < values.size(); ++i) {
    if (values(i) < values(best)) best = i;
  }
  return best;
}

ZetaDistribution zeta_adv(const Vector& q_values, double epsilon) {
  if (epsilon <= 0.0) throw std::invalid_argument("zeta_adv: epsilon must be positive");
  if (!q_values.allFinite()) throw std::invalid_argument("zeta_adv: non-finite Q-values");
  const double q_max = q_values.maxCoeff();
  Vector exponents = (q_max - q_values.array()) / epsilon;
  exponents.array() -= exponents.maxCoeff();  // largest gain maps to exp(0)
  Vector zeta = exponents.array().exp();
  zeta /= zeta.sum();
  return zeta;
}

int sample_index(const Vector& probabilities, Rng& rng) {
  const double draw = rng.uniform();
  double cumulative = 0.0;
  for (int i = 0; i < probabilities.size(); ++i) {
    cumulative += probabilities(i);
    if (draw < cumulative) return i;
  }
  return static_cast<int>(probabilities.size()) - 1;
}

int age_select_given(const Vector& q_values, double epsilon, double explore_draw, Rng& rng,
                     double temperature_override) {
  if (epsilon <= 0.0 || epsilon > 1.0) {
    throw std::invalid_argument("age_select: epsilon must lie in (0, 1]");
  }
  if (explore_draw < epsilon) {
    const double temperature = temperature_override > 0.0 ? temperature_override : epsilon;
    return sample_index(zeta_adv(q_values, temperature), rng);
  }
  return argmax(q_values);
}

int age_select(const Vector& q_values, double epsilon, Rng& rng, double temperature_override) {
  return age_select_given(q_values, epsilon, rng.uniform(), rng, temperature_override);
}

int eps_greedy_select_given(const Vector& q_values, double epsilon, double explore_draw,
                            Rng& rng) {
  if (explore_draw < epsilon) {
    return static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(q_values.size())));
  }
  return argmax(q_values);
}

int eps_greedy_select(const Vector& q_values, double epsilon, Rng& rng) {
  return eps_greedy_select_given(q_values, epsilon, rng.uniform(), rng);
}

Vector boltzmann_probs(const Vector& q_values, double temperature) {
  if (temperature <= 0.0) throw std::invalid_argument("boltzmann: temperature must be positive");
  Vector exponents = q_values.array() / temperature;
  exponents.array() -= exponents.maxCoeff();
  Vector probs = exponents.array().exp();
  probs /= probs.sum();
  return probs;
}

int boltzmann_select(const Vector& q_values, double temperature, Rng& rng) {
  return sample_index(boltzmann_probs(q_values, temperature), rng);
}

neural::QNetwork param_noise_perturb(const neural::QNetwork& net, const ParamNoiseState& state,
                                     Rng& rng) {
  neural::QNetwork noisy = net;
  for (std::size_t l = 0; l < noisy.weights.size(); ++l) {
    auto& w = noisy.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) += state.sigma * rng.normal();
    }
    auto& b = noisy.biases[l];
    for (Eigen::Index r = 0; r < b.size(); ++r) b(r) += state.sigma * rng.normal();
  }
  return noisy;
}

void param_noise_adapt(ParamNoiseState& state, double action_divergence) {
  if (action_divergence < state.divergence_threshold) {
    state.sigma *= state.adaptation_factor;
  } else {
    state.sigma /= state.adaptation_factor;
  }
}

double action_divergence(const neural::QNetwork& noisy, const neural::QNetwork& clean,
                         const neural::Matrix& observations) {
  if (observations.cols() == 0) return 0.0;
  const neural::Matrix q_noisy = noisy.forward_batch(observations);
  const neural::Matrix q_clean = clean.forward_batch(observations);
  long differing = 0;
  for (Eigen::Index j = 0; j < observations.cols(); ++j) {
    if (argmax(q_noisy.col(j)) != argmax(q_clean.col(j))) ++differing;
  }
  return static_cast<double>(differing) / static_cast<double>(observations.cols());
}

}  // namespace agelab::explore
