#pragma once

#include <array>

#include "agelab/rng.hpp"

namespace agelab::cartpole {

// Classic cart-pole constants: gravity 9.8, cart mass 1.0, pole mass 0.1,
// pole half-length 0.5, force magnitude 10, forward-Euler step of 0.02 s.
inline constexpr double kGravity = 9.8;
inline constexpr double kCartMass = 1.0;
inline constexpr double kPoleMass = 0.1;
inline constexpr double kPoleHalfLength = 0.5;
inline constexpr double kForceMag = 10.0;
inline constexpr double kTau = 0.02;

// Termination thresholds: 12 degrees, 2.4 m, 500 steps. Observation-space
// bounds are twice the termination thresholds; perturbed observations may
// exceed the termination region transiently.
inline constexpr double kAngleLimitRad = 12.0 * 3.14159265358979323846 / 180.0;
inline constexpr double kPositionLimit = 2.4;
inline constexpr int kMaxEpisodeSteps = 500;
inline constexpr double kObsAngleBoundRad = 2.0 * kAngleLimitRad;
inline constexpr double kObsPositionBound = 4.8;

// Angles are radians throughout; degrees appear only in docs.
struct EnvState {
  double cart_position = 0.0;
  double cart_velocity = 0.0;
  double pole_angle = 0.0;
  double pole_tip_velocity = 0.0;
  int step_count = 0;

  std::array<double, 4> obs() const {
    return {cart_position, cart_velocity, pole_angle, pole_tip_velocity};
  }
};

struct StepResult {
  EnvState next_state;
  double reward = 1.0;
  bool terminated = false;
};

// All four components drawn independently from U[-0.05, 0.05].
EnvState reset(Rng& rng);

bool is_terminal(const EnvState& state);

// One Euler step under action 0 (push left) or 1 (push right).
// Throws std::invalid_argument on a terminal state or an unknown action.
StepResult step(const EnvState& state, int action);

// Same integrator with an arbitrary applied force; test hook.
StepResult step_with_force(const EnvState& state, double force);

}  // namespace agelab::cartpole
