#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "agelab/cartpole.hpp"
#include "agelab/rng.hpp"

using namespace agelab;
using namespace agelab::cartpole;

TEST_CASE("one push-right step from rest matches hand-derived Euler update") {
  // temp = F/M = 100/11, theta_acc = -(100/11)/(0.5(4/3 - 0.1/1.1)) = -600/41,
  // x_acc = 100/11 + 0.05*(600/41)/1.1 = 4400/451.
  EnvState state;
  const StepResult out = step(state, 1);
  CHECK(out.reward == 1.0);
  CHECK_FALSE(out.terminated);
  CHECK(out.next_state.cart_position == 0.0);       // uses the pre-step velocity
  CHECK(out.next_state.pole_angle == 0.0);
  CHECK(out.next_state.cart_velocity == doctest::Approx(88.0 / 451.0).epsilon(1e-12));
  CHECK(out.next_state.pole_tip_velocity == doctest::Approx(-12.0 / 41.0).epsilon(1e-12));
  CHECK(out.next_state.step_count == 1);
}

TEST_CASE("push-left mirrors push-right from the symmetric rest state") {
  EnvState state;
  const StepResult right = step(state, 1);
  const StepResult left = step(state, 0);
  CHECK(left.next_state.cart_velocity == doctest::Approx(-right.next_state.cart_velocity));
  CHECK(left.next_state.pole_tip_velocity ==
        doctest::Approx(-right.next_state.pole_tip_velocity));
}

TEST_CASE("termination triggers on angle, position, and step budget") {
  EnvState state;
  CHECK_FALSE(is_terminal(state));

  state.pole_angle = kAngleLimitRad * 1.01;
  CHECK(is_terminal(state));
  state.pole_angle = -kAngleLimitRad * 1.01;
  CHECK(is_terminal(state));
  state.pole_angle = kAngleLimitRad * 0.99;
  CHECK_FALSE(is_terminal(state));

  state.pole_angle = 0.0;
  state.cart_position = kPositionLimit * 1.01;
  CHECK(is_terminal(state));
  state.cart_position = 0.0;

  state.step_count = kMaxEpisodeSteps;
  CHECK(is_terminal(state));
}

TEST_CASE("stepping a terminal state or an unknown action throws") {
  EnvState bad;
  bad.pole_angle = 1.0;
  CHECK_THROWS_AS(step(bad, 0), std::invalid_argument);
  EnvState ok;
  CHECK_THROWS_AS(step(ok, 2), std::invalid_argument);
  CHECK_THROWS_AS(step(ok, -1), std::invalid_argument);
}

TEST_CASE("reset draws every component from U[-0.05, 0.05]") {
  Rng rng(17);
  for (int i = 0; i < 200; ++i) {
    const EnvState state = reset(rng);
    CHECK(std::abs(state.cart_position) <= 0.05);
    CHECK(std::abs(state.cart_velocity) <= 0.05);
    CHECK(std::abs(state.pole_angle) <= 0.05);
    CHECK(std::abs(state.pole_tip_velocity) <= 0.05);
    CHECK(state.step_count == 0);
  }
}

TEST_CASE("an upright state truncates once the step budget is exhausted") {
  EnvState state;
  state.step_count = kMaxEpisodeSteps - 1;
  const StepResult out = step(state, 1);
  CHECK(out.terminated);  // purely by budget: the pole is still upright
  CHECK(std::abs(out.next_state.pole_angle) < kAngleLimitRad);
  CHECK(out.next_state.step_count == kMaxEpisodeSteps);
}

TEST_CASE("obs packs the four state components in order") {
  EnvState state;
  state.cart_position = 0.1;
  state.cart_velocity = -0.2;
  state.pole_angle = 0.03;
  state.pole_tip_velocity = 0.4;
  const auto obs = state.obs();
  CHECK(obs[0] == 0.1);
  CHECK(obs[1] == -0.2);
  CHECK(obs[2] == 0.03);
  CHECK(obs[3] == 0.4);
}
