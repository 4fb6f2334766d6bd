#include "agelab/cartpole.hpp"

#include <cmath>
#include <stdexcept>

namespace agelab::cartpole {

EnvState reset(Rng& rng) {
  EnvState state;
  state.cart_position = rng.uniform(-0.05, 0.05);
  state.cart_velocity = rng.uniform(-0.05, 0.05);
  state.pole_angle = rng.uniform(-0.05, 0.05);
  state.pole_tip_velocity = rng.uniform(-0.05, 0.05);
  state.step_count = 0;
  return state;
}

bool is_terminal(const EnvState& state) {
  return std::abs(state.pole_angle) > kAngleLimitRad ||
         std::abs(state.cart_position) > kPositionLimit ||
         state.step_count >= kMaxEpisodeSteps;
}

StepResult step_with_force(const EnvState& state, double force) {
  if (is_terminal(state)) {
    throw std::invalid_argument("cartpole::step: state is terminal");
  }
  const double total_mass = kCartMass + kPoleMass;
  const double polemass_length = kPoleMass * kPoleHalfLength;

  const double cos_theta = std::cos(state.pole_angle);
  const double sin_theta = std::sin(state.pole_angle);
  const double temp =
      (force + polemass_length * state.pole_tip_velocity *
                   state.pole_tip_velocity * sin_theta) /
      total_mass;
  const double theta_acc =
      (kGravity * sin_theta - cos_theta * temp) /
      (kPoleHalfLength *
       (4.0 / 3.0 - kPoleMass * cos_theta * cos_theta / total_mass));
  const double x_acc = temp - polemass_length * theta_acc * cos_theta / total_mass;

  StepResult result;
  result.next_state.cart_position = state.cart_position + kTau * state.cart_velocity;
  result.next_state.cart_velocity = state.cart_velocity + kTau * x_acc;
  result.next_state.pole_angle = state.pole_angle + kTau * state.pole_tip_velocity;
  result.next_state.pole_tip_velocity = state.pole_tip_velocity + kTau * theta_acc;
  result.next_state.step_count = state.step_count + 1;
  result.reward = 1.0;
  result.terminated = is_terminal(result.next_state);
  return result;
}

StepResult step(const EnvState& state, int action) {
  if (action != 0 && action != 1) {
    throw std::invalid_argument("cartpole::step: action must be 0 or 1");
  }
  return step_with_force(state, action == 1 ? kForceMag : -kForceMag);
}

}  // namespace agelab::cartpole
