#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "agelab/exploration.hpp"
#include "agelab/neural.hpp"
#include "agelab/rng.hpp"

using namespace agelab;
using namespace agelab::explore;

namespace {

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (const double x : values) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("the schedule decays linearly over the exploration fraction") {
  const Schedule schedule{1.0, 0.02, 0.1, 100000};
  CHECK(schedule.epsilon_at(0) == 1.0);
  CHECK(schedule.epsilon_at(5000) == doctest::Approx(0.51).epsilon(1e-12));
  CHECK(schedule.epsilon_at(10000) == doctest::Approx(0.02).epsilon(1e-12));
  CHECK(schedule.epsilon_at(99999) == doctest::Approx(0.02).epsilon(1e-12));
}

TEST_CASE("argmax and argmin break ties toward the lowest index") {
  CHECK(argmax(vec({1.0, 3.0, 3.0})) == 1);
  CHECK(argmin(vec({2.0, 0.5, 0.5})) == 1);
  CHECK(argmax(vec({7.0})) == 0);
}

TEST_CASE("zeta matches the closed form for a two-action gap") {
  // gaps (0, 1) at temperature 1: probs (1, e)/(1 + e)
  const Vector zeta = zeta_adv(vec({1.0, 0.0}), 1.0);
  const double e = std::exp(1.0);
  CHECK(zeta[0] == doctest::Approx(1.0 / (1.0 + e)).epsilon(1e-12));
  CHECK(zeta[1] == doctest::Approx(e / (1.0 + e)).epsilon(1e-12));
}

TEST_CASE("zeta is a shift-invariant distribution peaking on the weakest action") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_int(4));
    Vector q(n);
    for (int i = 0; i < n; ++i) q[i] = rng.uniform(-5.0, 5.0);
    const double eps = rng.uniform(0.05, 2.0);
    const Vector zeta = zeta_adv(q, eps);
    CHECK(std::abs(zeta.sum() - 1.0) < 1e-12);
    CHECK(zeta.minCoeff() >= 0.0);
    CHECK(argmax(zeta) == argmin(q));
    const Vector shifted = zeta_adv((q.array() + 123.0).matrix(), eps);
    for (int i = 0; i < n; ++i) CHECK(zeta[i] == doctest::Approx(shifted[i]).epsilon(1e-9));
  }
}

TEST_CASE("low temperature concentrates zeta on the worst action") {
  const Vector zeta = zeta_adv(vec({2.0, 0.0, 1.0}), 1e-3);
  CHECK(zeta[1] > 1.0 - 1e-9);
}

TEST_CASE("zeta rejects non-positive temperatures and non-finite values") {
  CHECK_THROWS(zeta_adv(vec({1.0, 0.0}), 0.0));
  CHECK_THROWS(zeta_adv(vec({1.0, 0.0}), -0.1));
  Vector bad = vec({1.0, 0.0});
  bad[0] = std::numeric_limits<double>::infinity();
  CHECK_THROWS(zeta_adv(bad, 1.0));
}

TEST_CASE("AGE picks greedily outside the exploration branch") {
  Rng rng(6);
  const Vector q = vec({0.3, 0.9, 0.1});
  for (double eps : {0.02, 0.5, 0.999}) {
    CHECK(age_select_given(q, eps, eps + 1e-9, rng) == 1);        // draw above eps: exploit
    CHECK(age_select_given(q, eps, eps - 1e-9, rng) != -1);       // draw below eps: sampled
  }
}

TEST_CASE("AGE exploration draws follow zeta empirically") {
  Rng rng(7);
  const Vector q = vec({1.0, 0.0});
  const double eps = 1.0;  // always explore, temperature 1
  const Vector zeta = zeta_adv(q, eps);
  const int n = 100000;
  int worst = 0;
  for (int i = 0; i < n; ++i) worst += age_select(q, eps, rng) == 1 ? 1 : 0;
  const double sigma = std::sqrt(zeta[1] * zeta[0] * n);
  CHECK(std::abs(worst - zeta[1] * n) < 5.0 * sigma);
}

TEST_CASE("the temperature override decouples sampling sharpness from epsilon") {
  Rng rng(8);
  const Vector q = vec({2.0, 0.0, 1.0});
  // epsilon 1 but near-zero temperature: exploration almost always hits argmin
  int worst = 0;
  for (int i = 0; i < 2000; ++i) worst += age_select(q, 1.0, rng, 1e-4) == 1 ? 1 : 0;
  CHECK(worst > 1990);
}

TEST_CASE("eps-greedy explores uniformly and exploits greedily") {
  Rng rng(9);
  const Vector q = vec({0.0, 1.0, 0.5});
  CHECK(eps_greedy_select_given(q, 0.1, 0.5, rng) == 1);  // exploit branch
  const int n = 90000;
  std::vector<int> counts(3, 0);
  for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(eps_greedy_select(q, 1.0, rng))];
  const double expected = n / 3.0;
  const double sigma = std::sqrt(expected * (2.0 / 3.0));
  for (const int c : counts) CHECK(std::abs(c - expected) < 5.0 * sigma);
}

TEST_CASE("boltzmann probabilities follow softmax(q / T)") {
  const Vector probs = boltzmann_probs(vec({1.0, 0.0}), 1.0);
  const double e = std::exp(1.0);
  CHECK(probs[0] == doctest::Approx(e / (1.0 + e)).epsilon(1e-12));
  CHECK(std::abs(probs.sum() - 1.0) < 1e-12);
  // near-zero temperature exploits
  Rng rng(10);
  for (int i = 0; i < 100; ++i) CHECK(boltzmann_select(vec({1.0, 0.0, 0.9}), 1e-4, rng) == 0);
}

TEST_CASE("sample_index reproduces the supplied distribution") {
  Rng rng(11);
  const Vector probs = vec({0.2, 0.5, 0.3});
  std::vector<int> counts(3, 0);
  const int n = 60000;
  for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(sample_index(probs, rng))];
  for (int k = 0; k < 3; ++k) {
    const double expected = probs[k] * n;
    const double sigma = std::sqrt(probs[k] * (1.0 - probs[k]) * n);
    CHECK(std::abs(counts[static_cast<std::size_t>(k)] - expected) < 5.0 * sigma);
  }
}

TEST_CASE("parameter noise perturbs every layer at the configured scale") {
  Rng rng(12);
  const neural::QNetwork net = neural::QNetwork::make({4, 16, 2}, neural::Activation::kTanh, rng);
  ParamNoiseState state;
  state.sigma = 0.05;
  const neural::QNetwork noisy = param_noise_perturb(net, state, rng);
  double sum_sq = 0.0;
  long count = 0;
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    const auto diff = (noisy.weights[l] - net.weights[l]).eval();
    CHECK(diff.cwiseAbs().maxCoeff() > 0.0);
    sum_sq += diff.squaredNorm();
    count += diff.size();
    sum_sq += (noisy.biases[l] - net.biases[l]).squaredNorm();
    count += noisy.biases[l].size();
  }
  const double rms = std::sqrt(sum_sq / static_cast<double>(count));
  CHECK(rms == doctest::Approx(0.05).epsilon(0.35));  // loose: finite-sample scale check
}

TEST_CASE("sigma adapts toward the divergence threshold") {
  ParamNoiseState state;
  state.sigma = 0.05;
  const double before = state.sigma;
  param_noise_adapt(state, state.divergence_threshold * 2.0);
  CHECK(state.sigma < before);  // too divergent: back off
  const double shrunk = state.sigma;
  param_noise_adapt(state, 0.0);
  CHECK(state.sigma > shrunk);  // too timid: push out
}

TEST_CASE("action divergence counts greedy disagreements") {
  Rng rng(13);
  const neural::QNetwork net = neural::QNetwork::make({4, 8, 2}, neural::Activation::kTanh, rng);
  neural::Matrix obs(4, 10);
  for (int c = 0; c < 10; ++c)
    for (int r = 0; r < 4; ++r) obs(r, c) = rng.uniform(-1.0, 1.0);
  CHECK(action_divergence(net, net, obs) == 0.0);
  // flipping the output layer sign flips every greedy choice with two actions
  neural::QNetwork flipped = net.clone();
  flipped.weights.back() *= -1.0;
  flipped.biases.back() *= -1.0;
  const double d = action_divergence(flipped, net, obs);
  CHECK(d > 0.0);
}

TEST_CASE("strategy names round-trip") {
  for (const Strategy s :
       {Strategy::kEpsGreedy, Strategy::kBoltzmann, Strategy::kParamNoise, Strategy::kAge}) {
    CHECK(strategy_from_string(to_string(s)) == s);
  }
  CHECK_THROWS(strategy_from_string("bogus"));
}
