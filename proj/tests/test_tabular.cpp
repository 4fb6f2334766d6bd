#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "agelab/rng.hpp"
#include "agelab/tabular.hpp"

using namespace agelab;
using namespace agelab::tabular;

namespace {

// Two-state deterministic MDP used for the worked expected-TD-error example:
// action 0 from state 0 can land in state 0 (nominal) or state 1 (attacked).
ToyMdp two_state_example() {
  ToyMdp mdp;
  mdp.num_states = 2;
  mdp.num_actions = 1;
  mdp.gamma = 0.8;
  mdp.terminal = {false, false};
  mdp.transition = {0.5, 0.5, 1.0, 0.0};
  mdp.reward = {2.0, 4.0, 0.0, 0.0};
  mdp.start_state = 0;
  mdp.validate();
  return mdp;
}

}  // namespace

TEST_CASE("the chain MDP is well-formed and its optimum is the closed form") {
  const ToyMdp chain = ToyMdp::chain(5);
  chain.validate();
  CHECK(chain.num_states == 5);
  CHECK(chain.num_actions == 2);
  CHECK(chain.terminal.back());
  const std::vector<double> v = value_iteration(chain);
  // stepping right from s earns 1 on entering the goal, discounted per step
  for (int s = 0; s < 4; ++s)
    CHECK(v[static_cast<std::size_t>(s)] ==
          doctest::Approx(std::pow(chain.gamma, 3 - s)).epsilon(1e-10));
  CHECK(v[4] == 0.0);  // terminal absorbs at zero
}

TEST_CASE("the gridworld optimum discounts the shortest path to the goal") {
  const ToyMdp grid = ToyMdp::gridworld5();
  grid.validate();
  CHECK(grid.num_states == 25);
  CHECK(grid.num_actions == 4);
  const std::vector<double> v = value_iteration(grid);
  // start corner 0 to goal corner 24: 8 moves, 7 step costs, reward on entry
  const double g7 = std::pow(grid.gamma, 7);
  CHECK(v[0] == doctest::Approx(g7 - 0.04 * (1.0 - g7) / (1.0 - grid.gamma)).epsilon(1e-10));
  // one step away from the goal
  CHECK(v[23] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(v[12] == 0.0);  // the pit is terminal
}

TEST_CASE("expected TD-error reproduces the worked example") {
  // p(s) = 0.9, p(attack|s) = 0.3, V = (1, 2), gamma = 0.8:
  //   0.3 [4 + 0.8*2] + 0.6 [2 + 0.8*1] - 1 = 1.68 + 1.68 - 1 = 2.36
  const ToyMdp mdp = two_state_example();
  SamplingProfile profile;
  profile.p_s = {0.9, 0.1};
  profile.p_attack_given_s = {0.3, 0.0};
  profile.validate();
  const std::vector<double> values = {1.0, 2.0};
  const double err = expected_td_error(profile, mdp, values, 0, 0, 0, 1);
  CHECK(err == doctest::Approx(2.36).epsilon(1e-12));
}

TEST_CASE("without attacks the expected TD-error is the plain TD residual") {
  const ToyMdp mdp = two_state_example();
  SamplingProfile profile;
  profile.p_s = {1.0, 0.0};
  profile.p_attack_given_s = {0.0, 0.0};
  const std::vector<double> values = {1.3, -0.4};
  const double err = expected_td_error(profile, mdp, values, 0, 0, 1, 0);
  // r(0,0,1) = 4 in the two-state example
  CHECK(err == doctest::Approx(4.0 + mdp.gamma * values[1] - values[0]).epsilon(1e-15));
}

TEST_CASE("the kernel form averages the explicit form over successors") {
  const ToyMdp mdp = two_state_example();
  SamplingProfile profile;
  profile.p_s = {0.9, 0.1};
  profile.p_attack_given_s = {0.3, 0.0};
  const std::vector<double> values = {1.0, 2.0};
  // true source 0, action 0: successors 0 and 1 at probability 0.5 each
  const double kernel = expected_td_error_kernel(profile, mdp, values, 0, 0, 0);
  const double explicit_00 = expected_td_error(profile, mdp, values, 0, 0, 0, 0);
  const double explicit_01 = expected_td_error(profile, mdp, values, 0, 0, 0, 1);
  const double explicit_10 = expected_td_error(profile, mdp, values, 0, 0, 1, 0);
  const double explicit_11 = expected_td_error(profile, mdp, values, 0, 0, 1, 1);
  // attacked term and nominal term mix independently over the kernel
  const double mixed = 0.25 * (explicit_00 + explicit_01 + explicit_10 + explicit_11);
  CHECK(kernel == doctest::Approx(mixed).epsilon(1e-12));
}

TEST_CASE("profile validation rejects inconsistent probabilities") {
  SamplingProfile profile;
  profile.p_s = {0.5, 0.5};
  profile.p_attack_given_s = {0.6, 0.0};  // attack share exceeds the state share
  CHECK_THROWS(profile.validate());
  profile.p_s = {0.7, 0.5};  // sums beyond 1
  profile.p_attack_given_s = {0.0, 0.0};
  CHECK_THROWS(profile.validate());
}

TEST_CASE("the bias-decrease condition compares consecutive attack shares") {
  SamplingProfile heavy;
  heavy.p_s = {0.6, 0.4};
  heavy.p_attack_given_s = {0.4, 0.0};
  SamplingProfile light;
  light.p_s = {0.6, 0.4};
  light.p_attack_given_s = {0.1, 0.0};
  CHECK(bias_decrease_holds(heavy, light, 0));
  CHECK_FALSE(bias_decrease_holds(light, heavy, 0));
  CHECK_FALSE(bias_decrease_holds(light, light, 0));  // strict decrease required
}

TEST_CASE("the uniform-sampling threshold is strict at one half") {
  CHECK(uniform_threshold_holds(0.0));
  CHECK(uniform_threshold_holds(0.49));
  CHECK_FALSE(uniform_threshold_holds(0.5));
  CHECK_FALSE(uniform_threshold_holds(0.9));
}

TEST_CASE("q_from_values satisfies the Bellman identity on the optimum") {
  const ToyMdp grid = ToyMdp::gridworld5();
  const std::vector<double> v = value_iteration(grid);
  const std::vector<double> q = q_from_values(grid, v);
  for (int s = 0; s < grid.num_states; ++s) {
    if (grid.terminal[static_cast<std::size_t>(s)]) continue;
    double best = -1e300;
    for (int a = 0; a < grid.num_actions; ++a)
      best = std::max(best, q[static_cast<std::size_t>(s) * grid.num_actions + a]);
    CHECK(best == doctest::Approx(v[static_cast<std::size_t>(s)]).epsilon(1e-10));
  }
}

TEST_CASE("policy optimality detects a deliberately broken policy") {
  const ToyMdp chain = ToyMdp::chain(5);
  const std::vector<double> v = value_iteration(chain);
  const std::vector<double> q_star = q_from_values(chain, v);
  TabularQ q(5, 2);
  for (int s = 0; s < 5; ++s)
    for (int a = 0; a < 2; ++a) q.at(s, a) = q_star[static_cast<std::size_t>(s) * 2 + a];
  CHECK(policy_is_optimal(chain, q));
  CHECK(greedy_policy_value(chain, q) == doctest::Approx(std::pow(0.99, 3)).epsilon(1e-10));
  q.at(0, 0) = 10.0;  // make "left" look great at the start state
  CHECK_FALSE(policy_is_optimal(chain, q));
  CHECK(greedy_policy_value(chain, q) < std::pow(0.99, 3));
}

TEST_CASE("unattacked tabular Q-learning recovers the optimum") {
  Rng rng(21);
  TabularConfig config;
  config.episodes = 1500;
  const TabularResult out =
      tabular_attack_experiment(ToyMdp::chain(5), 0.0, attack::Mode::kStateNeutral, 1500, rng,
                                config);
  CHECK(out.converged);
  CHECK(out.greedy_value == doctest::Approx(std::pow(0.99, 3)).epsilon(1e-9));
  CHECK(out.episodes_to_converge >= 0);
}

TEST_CASE("a saturating oracle attack prevents convergence") {
  Rng rng(22);
  TabularConfig config;
  config.episodes = 1500;
  const TabularResult out =
      tabular_attack_experiment(ToyMdp::chain(5), 1.0, attack::Mode::kStateNeutral, 1500, rng,
                                config);
  CHECK_FALSE(out.converged);
}

TEST_CASE("a small sweep shows the convergence cliff between low and high attack rates") {
  SweepConfig config;
  config.p_attacks = {0.0, 0.9};
  config.seeds_per_cell = 3;
  config.episodes = 1500;
  config.include_gridworld = false;
  const std::vector<SweepCell> cells = run_sweep(config, 99);
  REQUIRE(cells.size() == 6);
  int low_converged = 0;
  int high_converged = 0;
  for (const SweepCell& cell : cells) {
    if (cell.p_attack == 0.0) low_converged += cell.converged ? 1 : 0;
    if (cell.p_attack == 0.9) high_converged += cell.converged ? 1 : 0;
  }
  CHECK(low_converged == 3);
  CHECK(high_converged <= 1);
}
