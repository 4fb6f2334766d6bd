#include "agelab/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "agelab/exploration.hpp"

namespace agelab::attack {

Mode mode_from_string(std::string_view name) {
  if (name == "state_neutral") return Mode::kStateNeutral;
  if (name == "targeted") return Mode::kTargeted;
  throw std::invalid_argument("unknown attack mode: " + std::string(name));
}

std::string to_string(Mode mode) {
  return mode == Mode::kStateNeutral ? "state_neutral" : "targeted";
}

void AttackSpec::validate() const {
  if (p_attack < 0.0 || p_attack > 1.0) {
    throw std::invalid_argument("AttackSpec: p_attack must lie in [0, 1]");
  }
  if (step_size <= 0.0) throw std::invalid_argument("AttackSpec: step_size must be positive");
  if (max_linf_radius <= 0.0) {
    throw std::invalid_argument("AttackSpec: max_linf_radius must be positive");
  }
  if (max_iterations <= 0) {
    throw std::invalid_argument("AttackSpec: max_iterations must be positive");
  }
}

bool should_attack(const AttackSpec& spec, Rng& rng) { return rng.bernoulli(spec.p_attack); }

namespace {

neural::Vector to_vector(const std::array<double, 4>& obs) {
  neural::Vector v(4);
  for (int i = 0; i < 4; ++i) v(i) = obs[i];
  return v;
}

std::array<double, 4> to_array(const neural::Vector& v) {
  return {v(0), v(1), v(2), v(3)};
}

// Runner-up action by Q-value; ties break toward the lowest index.
int second_best(const neural::Vector& q, int greedy) {
  int best = -1;
  for (int i = 0; i < q.size(); ++i) {
    if (i == greedy) continue;
    if (best < 0 || q(i) > q(best)) best = i;
  }
  return best;
}

}  // namespace

CraftResult craft(const AttackSpec& spec, const neural::QNetwork& net,
                  const std::array<double, 4>& true_obs) {
  const neural::Vector origin = to_vector(true_obs);
  if (!origin.allFinite()) throw std::invalid_argument("craft: non-finite observation");

  const neural::Vector q_true = net.forward(origin);
  const int greedy = explore::argmax(q_true);
  const int worst = explore::argmin(q_true);
  const int target = spec.mode == Mode::kTargeted ? worst : second_best(q_true, greedy);

  const auto satisfied = [&](int induced) {
    return spec.mode == Mode::kTargeted ? induced == worst : induced != greedy;
  };

  CraftResult result;
  result.perturbed_observation = true_obs;
  result.induced_action = greedy;
  if (satisfied(greedy)) {  // degenerate tie: the greedy action already qualifies
    result.success = true;
    return result;
  }

  neural::Vector obs = origin;
  for (int iteration = 1; iteration <= spec.max_iterations; ++iteration) {
    const neural::Vector grad = neural::input_gradient(net, obs, target);
    for (int i = 0; i < 4; ++i) {
      const double sign = grad(i) > 0.0 ? 1.0 : (grad(i) < 0.0 ? -1.0 : 0.0);
      obs(i) -= spec.step_size * sign;
      obs(i) = std::clamp(obs(i), origin(i) - spec.max_linf_radius,
                          origin(i) + spec.max_linf_radius);
    }
    const int induced = explore::argmax(net.forward(obs));
    result.perturbed_observation = to_array(obs);
    result.induced_action = induced;
    result.iterations_used = iteration;
    if (satisfied(induced)) {
      result.success = true;
      return result;
    }
  }

  if (spec.oracle_fallback) {
    result.success = true;
    result.used_oracle = true;
    result.induced_action = target;
  }
  return result;
}

StepPerception apply_to_step(const AttackSpec& spec, const neural::QNetwork& net,
                             const std::array<double, 4>& true_obs, Rng& rng) {
  StepPerception perception;
  perception.observed = true_obs;
  if (!should_attack(spec, rng)) return perception;

  const CraftResult crafted = craft(spec, net, true_obs);
  perception.observed = crafted.perturbed_observation;
  perception.attacked = true;
  if (crafted.used_oracle) perception.induced_action_hint = crafted.induced_action;
  return perception;
}

}  // namespace agelab::attack
