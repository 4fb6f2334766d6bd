#pragma once

#include <string>
#include <string_view>

#include "agelab/neural.hpp"
#include "agelab/rng.hpp"

namespace agelab::explore {

using Vector = Eigen::VectorXd;

enum class Strategy { kEpsGreedy, kBoltzmann, kParamNoise, kAge };

Strategy strategy_from_string(std::string_view name);
std::string to_string(Strategy strategy);

// Linear decay from initial to final epsilon over the first
// exploration_fraction * total_timesteps steps, constant afterwards.
struct Schedule {
  double initial_epsilon = 1.0;
  double final_epsilon = 0.02;
  double exploration_fraction = 0.1;
  long total_timesteps = 100000;

  double epsilon_at(long step) const;
};

// Ties in argmax/argmin break toward the lowest index.
int argmax(const Vector& values);
int argmin(const Vector& values);

using ZetaDistribution = Vector;

// Adversarial state-action significance: a Boltzmann distribution over the
// per-action adversarial gain max_a' Q(s,a') - Q(s,a) at temperature epsilon,
// computed with max-gain subtraction so large Q gaps stay finite. Mass
// concentrates on argmin Q as epsilon -> 0. Throws when epsilon <= 0 or the
// Q-values are not finite.
ZetaDistribution zeta_adv(const Vector& q_values, double epsilon);

// Draws an index from a normalized probability vector.
int sample_index(const Vector& probabilities, Rng& rng);

// With probability epsilon sample from zeta_adv (epsilon doubles as the
// temperature), otherwise act greedily. explore_draw is the Bernoulli
// uniform; the _given variants expose it for deterministic tests. The
// optional temperature override decouples the Boltzmann temperature from the
// exploration probability for ablations; by default they are one scalar.
int age_select_given(const Vector& q_values, double epsilon, double explore_draw, Rng& rng,
                     double temperature_override = -1.0);
int age_select(const Vector& q_values, double epsilon, Rng& rng,
               double temperature_override = -1.0);

int eps_greedy_select_given(const Vector& q_values, double epsilon, double explore_draw,
                            Rng& rng);
int eps_greedy_select(const Vector& q_values, double epsilon, Rng& rng);

Vector boltzmann_probs(const Vector& q_values, double temperature);
int boltzmann_select(const Vector& q_values, double temperature, Rng& rng);

struct ParamNoiseState {
  double sigma = 0.05;
  double divergence_threshold = 0.1;
  double adaptation_factor = 1.01;
};

// Independent Gaussian noise of scale sigma on every weight and bias.
neural::QNetwork param_noise_perturb(const neural::QNetwork& net,
                                     const ParamNoiseState& state, Rng& rng);

// sigma grows by the adaptation factor while the measured action divergence
// sits below the threshold, otherwise shrinks.
void param_noise_adapt(ParamNoiseState& state, double action_divergence);

// Fraction of observations (columns) on which the two nets disagree greedily.
double action_divergence(const neural::QNetwork& noisy, const neural::QNetwork& clean,
                         const neural::Matrix& observations);

}  // namespace agelab::explore
