#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "agelab/cartpole.hpp"
#include "agelab/resilience.hpp"
#include "agelab/rng.hpp"

using namespace agelab;
using namespace agelab::resilience;

namespace {

AdversaryConfig smoke_config() {
  AdversaryConfig config;
  config.max_timesteps = 1500;
  config.buffer_size = 2000;
  config.first_learning_step = 200;
  config.batch_size = 16;
  config.hidden_dims = {16};
  config.strategy = explore::Strategy::kEpsGreedy;
  return config;
}

RegretLog log_with_ma100(const std::vector<double>& values) {
  RegretLog log;
  for (std::size_t i = 0; i < values.size(); ++i) {
    RegretEpisode e;
    e.episode = static_cast<long>(i);
    e.end_step = static_cast<long>(i + 1) * 100;
    e.ma100_perturbations = values[i];
    log.episodes.push_back(e);
  }
  return log;
}

}  // namespace

TEST_CASE("the adversary pays c_adv per perturbation on top of negated reward") {
  CHECK(adversary_step_reward(1.0, false, 1.0) == -1.0);
  CHECK(adversary_step_reward(1.0, true, 1.0) == -2.0);
  CHECK(adversary_step_reward(1.0, true, 0.0) == -1.0);
  CHECK(adversary_step_reward(0.0, true, 2.5) == -2.5);
}

TEST_CASE("adversary configuration contradictions are rejected") {
  AdversaryConfig config = smoke_config();
  config.c_adv = -1.0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = smoke_config();
  config.quasi_stable_window = 0;
  CHECK_THROWS(config.validate());
  config = smoke_config();
  config.quasi_stable_tolerance = 0.0;
  CHECK_THROWS(config.validate());
  config = smoke_config();
  config.perturbation.p_attack = 1.5;
  CHECK_THROWS(config.validate());
  config = smoke_config();
  CHECK_NOTHROW(config.validate());
}

TEST_CASE("quasi-stability means low relative spread of the trailing average") {
  SUBCASE("a constant perturbation rate is stable") {
    const RegretLog log = log_with_ma100(std::vector<double>(60, 10.0));
    CHECK(quasi_stable(log, 50, 0.05));
  }
  SUBCASE("a drifting rate is not") {
    std::vector<double> values;
    for (int i = 0; i < 60; ++i) values.push_back(10.0 + 0.02 * i);  // spread ~1 in-window
    CHECK_FALSE(quasi_stable(log_with_ma100(values), 50, 0.05));
  }
  SUBCASE("the tolerance is relative to the window mean") {
    std::vector<double> high(60, 1000.0);
    for (std::size_t i = 0; i < high.size(); i += 2) high[i] += 40.0;  // spread 40 vs 0.05*1020
    CHECK(quasi_stable(log_with_ma100(high), 50, 0.05));
    std::vector<double> low(60, 100.0);
    for (std::size_t i = 0; i < low.size(); i += 2) low[i] += 40.0;  // spread 40 vs 0.05*120
    CHECK_FALSE(quasi_stable(log_with_ma100(low), 50, 0.05));
  }
  SUBCASE("an unfilled trailing average blocks the verdict") {
    std::vector<double> values(60, 10.0);
    values[55] = std::nan("");
    CHECK_FALSE(quasi_stable(log_with_ma100(values), 50, 0.05));
  }
  SUBCASE("insufficient history throws") {
    const RegretLog log = log_with_ma100(std::vector<double>(30, 10.0));
    CHECK_THROWS_AS(quasi_stable(log, 50, 0.05), std::invalid_argument);
    CHECK_THROWS(quasi_stable(log, 0, 0.05));
  }
}

TEST_CASE("a short adversary run keeps its ledgers consistent") {
  Rng victim_rng(41);
  const neural::QNetwork victim =
      neural::QNetwork::make({4, 16, 2}, neural::Activation::kTanh, victim_rng);
  AdversaryConfig config = smoke_config();
  Rng rng(43);
  const AdversaryResult result = train_adversary(victim, config, rng);
  const RegretLog& log = result.log;

  REQUIRE(!log.episodes.empty());
  long previous_end = 0;
  long total_perturbations = 0;
  for (const RegretEpisode& e : log.episodes) {
    CHECK(e.regret == cartpole::kMaxEpisodeSteps - e.victim_reward);
    const long length = e.end_step - previous_end;
    CHECK(e.victim_reward == static_cast<double>(length));  // one reward unit per step
    CHECK(e.perturbations >= 0);
    CHECK(e.perturbations <= length);
    if (e.episode + 1 < 100) {
      CHECK(std::isnan(e.ma100_regret));
      CHECK(std::isnan(e.ma100_perturbations));
    } else {
      CHECK_FALSE(std::isnan(e.ma100_regret));
      CHECK_FALSE(std::isnan(e.ma100_perturbations));
    }
    previous_end = e.end_step;
    total_perturbations += e.perturbations;
  }
  CHECK(total_perturbations > 0);  // early epsilon = 1.0 forces perturb actions
  CHECK(result.adversary.input_dim() == 4);
  CHECK(result.adversary.num_actions() == 2);
}

TEST_CASE("the adversary can watch the victim's value function") {
  Rng victim_rng(47);
  const neural::QNetwork victim =
      neural::QNetwork::make({4, 16, 2}, neural::Activation::kTanh, victim_rng);
  AdversaryConfig config = smoke_config();
  config.max_timesteps = 600;
  config.observe_victim_q = true;
  Rng rng(53);
  const AdversaryResult result = train_adversary(victim, config, rng);
  CHECK(result.adversary.input_dim() == 4 + victim.num_actions());
  CHECK(!result.log.episodes.empty());
}

TEST_CASE("the default parameter-noise strategy completes a run") {
  Rng victim_rng(59);
  const neural::QNetwork victim =
      neural::QNetwork::make({4, 16, 2}, neural::Activation::kTanh, victim_rng);
  AdversaryConfig config = smoke_config();
  config.max_timesteps = 600;
  config.strategy = explore::Strategy::kParamNoise;
  Rng rng(61);
  const AdversaryResult result = train_adversary(victim, config, rng);
  CHECK(!result.log.episodes.empty());
}

TEST_CASE("a victim with the wrong observation width is rejected") {
  Rng rng(67);
  const neural::QNetwork bad = neural::QNetwork::make({5, 8, 2}, neural::Activation::kTanh, rng);
  AdversaryConfig config = smoke_config();
  Rng run_rng(71);
  CHECK_THROWS_AS(train_adversary(bad, config, run_rng), std::invalid_argument);
}
