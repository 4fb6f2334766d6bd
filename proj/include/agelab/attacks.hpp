#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "agelab/neural.hpp"
#include "agelab/rng.hpp"

namespace agelab::attack {

enum class Mode { kStateNeutral, kTargeted };

Mode mode_from_string(std::string_view name);
std::string to_string(Mode mode);

// Probabilistic observation-perturbation budget. The state-neutral adversary
// induces any non-greedy action; the targeted adversary induces argmin Q.
// With oracle_fallback on, failed crafting still forces the target action,
// matching the always-successful abstraction the analysis assumes.
struct AttackSpec {
  double p_attack = 0.0;
  Mode mode = Mode::kStateNeutral;
  double step_size = 0.05;
  int max_iterations = 20;
  double max_linf_radius = 0.5;
  bool oracle_fallback = true;
  double c_adv = 1.0;

  void validate() const;
};

struct CraftResult {
  std::array<double, 4> perturbed_observation{};
  int induced_action = 0;
  bool success = false;
  bool used_oracle = false;
  int iterations_used = 0;
};

// Independent Bernoulli(p_attack) draw per time step.
bool should_attack(const AttackSpec& spec, Rng& rng);

// Iterated FGSM toward the mode's target action (targeted: argmin Q at the
// true observation; state-neutral: the runner-up action), projected to the
// L-inf ball around the true observation after every iteration.
CraftResult craft(const AttackSpec& spec, const neural::QNetwork& net,
                  const std::array<double, 4>& true_obs);

struct StepPerception {
  std::array<double, 4> observed{};
  bool attacked = false;
  // Set when the oracle fallback fired; forces the induced action.
  std::optional<int> induced_action_hint;
};

StepPerception apply_to_step(const AttackSpec& spec, const neural::QNetwork& net,
                             const std::array<double, 4>& true_obs, Rng& rng);

}  // namespace agelab::attack
