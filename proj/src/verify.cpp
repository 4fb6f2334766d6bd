#include "agelab/verify.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "agelab/attacks.hpp"
#include "agelab/cartpole.hpp"
#include "agelab/checkpoint.hpp"
#include "agelab/config.hpp"
#include "agelab/csv.hpp"
#include "agelab/experiments.hpp"
#include "agelab/exploration.hpp"
#include "agelab/manifest.hpp"
#include "agelab/neural.hpp"
#include "agelab/replay.hpp"
#include "agelab/resilience.hpp"
#include "agelab/rng.hpp"
#include "agelab/svg.hpp"
#include "agelab/tabular.hpp"
#include "agelab/trainer.hpp"

namespace agelab::verify {

namespace fs = std::filesystem;

namespace {

void expect(bool condition, const std::string& what) {
  if (!condition) throw std::runtime_error(what);
}

void expect_near(double actual, double wanted, double tol, const std::string& what) {
  if (!(std::abs(actual - wanted) <= tol)) {
    std::ostringstream message;
    message << what << ": got " << actual << ", wanted " << wanted << " +/- " << tol;
    throw std::runtime_error(message.str());
  }
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "agelab-verify";
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void check_rng_streams() {
  Rng a(42), b(42);
  for (int i = 0; i < 8; ++i) {
    expect(a.next_u64() == b.next_u64(), "same seed must reproduce the stream");
  }
  Rng parent(7);
  Rng left = parent.split("env");
  Rng right = parent.split("replay");
  expect(left.next_u64() != right.next_u64(), "substream labels must decorrelate");
  double mean = 0.0;
  Rng u(3);
  for (int i = 0; i < 10000; ++i) mean += u.uniform();
  mean /= 10000;
  expect_near(mean, 0.5, 0.02, "uniform mean");
}

void check_cartpole_step() {
  cartpole::EnvState zero;
  const cartpole::StepResult result = cartpole::step(zero, 1);
  expect_near(result.next_state.cart_position, 0.0, 1e-12, "cart position");
  expect_near(result.next_state.cart_velocity, 0.19512, 1e-5, "cart velocity");
  expect_near(result.next_state.pole_angle, 0.0, 1e-12, "pole angle");
  expect_near(result.next_state.pole_tip_velocity, -0.29268, 1e-5, "pole velocity");
  expect(result.reward == 1.0, "reward is 1 per step");
}

void check_gradients() {
  Rng rng(11);
  for (int trial = 0; trial < 3; ++trial) {
    Rng net_rng = rng.split("net" + std::to_string(trial));
    neural::QNetwork net = neural::QNetwork::make({4, 8, 3}, neural::Activation::kTanh, net_rng);
    std::vector<neural::BatchEntry> batch;
    for (int i = 0; i < 4; ++i) {
      neural::BatchEntry entry;
      entry.observation = neural::Vector(4);
      for (int d = 0; d < 4; ++d) entry.observation(d) = rng.uniform(-1.0, 1.0);
      entry.action = static_cast<int>(rng.uniform_int(3));
      entry.td_target = rng.uniform(-2.0, 2.0);
      batch.push_back(entry);
    }
    const neural::Gradients grads = neural::loss_and_gradients(net, batch);
    const double h = 1e-6;
    for (int probes = 0; probes < 6; ++probes) {
      const std::size_t layer = rng.uniform_int(net.weights.size());
      const Eigen::Index r = static_cast<Eigen::Index>(rng.uniform_int(net.weights[layer].rows()));
      const Eigen::Index c = static_cast<Eigen::Index>(rng.uniform_int(net.weights[layer].cols()));
      neural::QNetwork plus = net, minus = net;
      plus.weights[layer](r, c) += h;
      minus.weights[layer](r, c) -= h;
      const double fd = (neural::loss_and_gradients(plus, batch).loss -
                         neural::loss_and_gradients(minus, batch).loss) /
                        (2 * h);
      const double analytic = grads.weight_grads[layer](r, c);
      const double scale = std::max({1.0, std::abs(fd), std::abs(analytic)});
      expect(std::abs(fd - analytic) / scale < 1e-4, "weight gradient matches finite diff");
    }
  }
}

void check_checkpoint_roundtrip() {
  const fs::path dir = scratch_dir();
  Rng rng(5);
  neural::QNetwork net = neural::QNetwork::make({4, 16, 2}, neural::Activation::kTanh, rng);
  const fs::path path = dir / "net.ageq";
  save_checkpoint(net, path);
  const neural::QNetwork loaded = load_checkpoint(path);
  for (int i = 0; i < 20; ++i) {
    neural::Vector obs(4);
    for (int d = 0; d < 4; ++d) obs(d) = rng.uniform(-1.0, 1.0);
    expect((net.forward(obs) - loaded.forward(obs)).cwiseAbs().maxCoeff() == 0.0,
           "round-trip forward equality");
  }
  std::string bytes = slurp(path);
  bytes[0] = 'X';
  const fs::path bad = dir / "bad_magic.ageq";
  std::ofstream(bad, std::ios::binary) << bytes;
  try {
    load_checkpoint(bad);
    throw std::runtime_error("bad magic must throw");
  } catch (const BadMagicError&) {
  }
  const fs::path cut = dir / "truncated.ageq";
  std::ofstream(cut, std::ios::binary) << slurp(path).substr(0, 40);
  try {
    load_checkpoint(cut);
    throw std::runtime_error("truncated file must throw");
  } catch (const TruncatedFileError&) {
  }
}

void check_zeta() {
  neural::Vector q(2);
  q << 1.0, 0.0;
  const explore::ZetaDistribution zeta = explore::zeta_adv(q, 1.0);
  expect_near(zeta(0), 0.26894, 1e-5, "zeta(0)");
  expect_near(zeta(1), 0.73106, 1e-5, "zeta(1)");
  expect_near(zeta.sum(), 1.0, 1e-12, "zeta normalization");
  Rng rng(9);
  neural::Vector wide(5);
  for (int i = 0; i < 5; ++i) wide(i) = rng.uniform(-3.0, 3.0);
  const explore::ZetaDistribution z = explore::zeta_adv(wide, 0.7);
  expect(explore::argmax(z) == explore::argmin(wide), "zeta peaks on argmin Q");
  const explore::ZetaDistribution cold = explore::zeta_adv(wide, 1e-3);
  expect(cold(explore::argmin(wide)) > 0.999, "low temperature concentrates on argmin");
}

void check_eq3_example() {
  tabular::ToyMdp mdp;
  mdp.num_states = 2;
  mdp.num_actions = 1;
  mdp.gamma = 0.99;
  mdp.terminal = {false, false};
  mdp.transition = {0.0, 1.0, 0.0, 1.0};
  mdp.reward = {1.0, 1.0, 1.0, 1.0};
  tabular::SamplingProfile profile;
  profile.p_s = {1.0, 0.0};
  profile.p_attack_given_s = {0.4, 0.0};
  const std::vector<double> values = {1.0, 2.0};
  const double td = tabular::expected_td_error(profile, mdp, values, 0, 0, 1, 0);
  expect_near(td, 1.584, 1e-12, "Eq. 3 hand example");
  profile.p_attack_given_s = {0.0, 0.0};
  const double nominal = tabular::expected_td_error(profile, mdp, values, 0, 0, 1, 0);
  expect_near(nominal, 1.0 + 0.99 * 2.0 - 1.0, 1e-12, "no-attack reduction");
}

void check_threshold() {
  expect(tabular::uniform_threshold_holds(0.2), "p=0.2 below threshold");
  expect(tabular::uniform_threshold_holds(0.4), "p=0.4 below threshold");
  expect(!tabular::uniform_threshold_holds(0.5), "p=0.5 at boundary fails (strict)");
  expect(!tabular::uniform_threshold_holds(0.8), "p=0.8 above threshold");
  expect(!tabular::uniform_threshold_holds(1.0), "p=1.0 above threshold");
}

void check_replay_overwrite() {
  Rng rng(13);
  replay::ReplayBuffer buffer(10);
  replay::Experience nominal;
  for (int i = 0; i < 10; ++i) buffer.push(nominal);
  const std::uint64_t mark = buffer.push_count();
  replay::Experience perturbed;
  perturbed.perturbed = true;
  for (int i = 0; i < 9; ++i) buffer.push(perturbed);
  expect(buffer.count_pushed_before(mark) == 1, "one pre-mark entry before the last push");
  buffer.push(perturbed);
  expect(buffer.count_pushed_before(mark) == 0,
         "pre-mark entries vanish exactly capacity pushes after the mark");
  expect(buffer.composition().second == 1.0, "buffer fully perturbed after overwrite");
  (void)rng;
}

void check_replay_tree() {
  Rng rng(17);
  replay::ReplayBuffer buffer(33, 0.6);
  for (int i = 0; i < 100; ++i) {
    replay::Experience e;
    e.reward = rng.uniform();
    buffer.push(e);
    if (i % 3 == 0) {
      const std::vector<replay::Sample> batch = buffer.sample_prioritized(4, 0.5, rng);
      std::vector<std::uint64_t> ids;
      std::vector<double> errors;
      for (const replay::Sample& s : batch) {
        ids.push_back(s.id);
        errors.push_back(rng.uniform(-2.0, 2.0));
      }
      buffer.update_priorities(ids, errors);
    }
  }
  expect_near(buffer.priority_tree_root(), buffer.priority_leaf_sum(), 1e-9,
              "sum tree root equals leaf sum");
}

void check_age_selection() {
  neural::Vector q(3);
  q << 0.5, -0.2, 0.1;
  Rng rng(23);
  const double epsilon = 0.3;
  expect(explore::age_select_given(q, epsilon, 0.99, rng) == explore::argmax(q),
         "draw above epsilon acts greedily");
  const explore::ZetaDistribution zeta = explore::zeta_adv(q, epsilon);
  std::vector<long> counts(3, 0);
  const int trials = 200000;
  for (int i = 0; i < trials; ++i) ++counts[explore::age_select(q, epsilon, rng)];
  for (int a = 0; a < 3; ++a) {
    const double want = epsilon * zeta(a) + (a == explore::argmax(q) ? 1.0 - epsilon : 0.0);
    const double got = static_cast<double>(counts[a]) / trials;
    const double sigma = std::sqrt(want * (1.0 - want) / trials);
    expect(std::abs(got - want) < 5 * sigma + 1e-9, "two-stage selection frequency");
  }
}

void check_attack_fallback() {
  neural::QNetwork net;
  net.layer_dims = {4, 2};
  net.hidden_activation = neural::Activation::kTanh;
  net.weights = {neural::Matrix::Zero(2, 4)};
  net.biases = {neural::Vector::Zero(2)};
  attack::AttackSpec spec;
  spec.p_attack = 1.0;
  spec.mode = attack::Mode::kStateNeutral;
  const attack::CraftResult crafted = attack::craft(spec, net, {0.0, 0.0, 0.0, 0.0});
  expect(crafted.success, "oracle fallback always succeeds");
  expect(crafted.used_oracle, "flat Q forces the oracle fallback");
  expect(crafted.induced_action != 0, "state-neutral induces a non-greedy action");
}

void check_td_target() {
  neural::QNetwork net;
  net.layer_dims = {4, 2};
  net.hidden_activation = neural::Activation::kTanh;
  net.weights = {neural::Matrix::Zero(2, 4)};
  net.biases = {neural::Vector::Zero(2)};
  net.biases[0] << 10.0, 3.0;
  replay::Experience e;
  e.reward = 1.0;
  expect_near(train::td_target(e, net, 0.99), 10.9, 1e-12, "td target arithmetic");
  e.terminal = true;
  expect_near(train::td_target(e, net, 0.99), 1.0, 1e-12, "terminal td target");
  e.terminal = false;
  expect_near(train::td_target(e, net, 0.0), 1.0, 1e-12, "gamma 0 td target");
}

void check_adversary_reward() {
  expect(resilience::adversary_step_reward(1.0, false, 1.0) == -1.0, "no attack step");
  expect(resilience::adversary_step_reward(1.0, true, 1.0) == -2.0, "attack step");
  expect(resilience::adversary_step_reward(1.0, true, 0.0) == -1.0, "cost-free attack");
}

void check_value_iteration() {
  const tabular::ToyMdp chain = tabular::ToyMdp::chain();
  const std::vector<double> values = tabular::value_iteration(chain);
  expect_near(values[0], 0.99 * 0.99 * 0.99, 1e-9, "chain start value");
  tabular::TabularQ q(chain.num_states, chain.num_actions);
  const std::vector<double> q_star = tabular::q_from_values(chain, values);
  q.q = q_star;
  expect(tabular::policy_is_optimal(chain, q), "greedy from Q* is optimal");
}

void check_schedule() {
  explore::Schedule schedule;
  expect_near(schedule.epsilon_at(0), 1.0, 1e-12, "initial epsilon");
  expect_near(schedule.epsilon_at(5000), 0.51, 1e-12, "midpoint epsilon");
  expect_near(schedule.epsilon_at(10000), 0.02, 1e-12, "final epsilon");
  expect_near(schedule.epsilon_at(90000), 0.02, 1e-12, "epsilon stays final");
}

void check_artifact_determinism() {
  const fs::path dir = scratch_dir();
  const auto write_csv = [&](const fs::path& path) {
    csv::Writer writer(path, "demo.v1", {"x", "y"});
    for (int i = 0; i < 200; ++i) {
      writer.row({csv::format(static_cast<long>(i)),
                  csv::format(i < 100 ? 0.0 : 1.0)});
    }
  };
  write_csv(dir / "a.csv");
  write_csv(dir / "b.csv");
  expect(slurp(dir / "a.csv") == slurp(dir / "b.csv"), "same rows produce identical csv");

  svg::PlotSpec spec;
  spec.series = {{"x", "y", "step"}};
  spec.smoothing_window = 100;
  spec.title = "determinism";
  svg::emit_plot(dir / "a.csv", spec, dir / "a.svg");
  svg::emit_plot(dir / "b.csv", spec, dir / "b.svg");
  expect(slurp(dir / "a.svg") == slurp(dir / "b.svg"), "same csv produces identical svg");

  const std::vector<double> smoothed =
      svg::smooth(csv::read(dir / "a.csv").numeric_column("y"), 100);
  expect(std::isnan(smoothed[98]), "smoothing undefined before the window fills");
  expect_near(smoothed[99], 0.0, 1e-12, "flat before the step");
  expect_near(smoothed[149], 0.5, 1e-12, "mid-ramp value");
  expect_near(smoothed[199], 1.0, 1e-12, "flat after the ramp");

  manifest::write_manifest(dir);
  expect(manifest::verify_manifest(dir).empty(), "fresh manifest verifies");
  std::ofstream(dir / "a.csv", std::ios::binary | std::ios::app) << "tamper\n";
  expect(!manifest::verify_manifest(dir).empty(), "tampering is detected");
}

void check_config_rejection() {
  const config::ConfigFile file = config::parse(
      "[experiment]\nname = nominal-age\nbogus_key = 1\n");
  try {
    config::require_known(file, experiments::config_schema());
    throw std::runtime_error("unknown key must be rejected");
  } catch (const std::invalid_argument& e) {
    expect(std::string(e.what()).find("bogus_key") != std::string::npos,
           "rejection names the offending key");
  }
}

}  // namespace

const std::vector<Check>& all_checks() {
  static const std::vector<Check> checks = {
      {"rng-streams", check_rng_streams},
      {"cartpole-step-oracle", check_cartpole_step},
      {"gradient-finite-difference", check_gradients},
      {"checkpoint-roundtrip-and-errors", check_checkpoint_roundtrip},
      {"zeta-distribution", check_zeta},
      {"expected-td-error-example", check_eq3_example},
      {"uniform-sampling-threshold", check_threshold},
      {"replay-overwrite-exact", check_replay_overwrite},
      {"replay-priority-tree", check_replay_tree},
      {"age-two-stage-selection", check_age_selection},
      {"attack-oracle-fallback", check_attack_fallback},
      {"td-target-arithmetic", check_td_target},
      {"adversary-step-reward", check_adversary_reward},
      {"value-iteration-oracle", check_value_iteration},
      {"epsilon-schedule", check_schedule},
      {"artifact-determinism", check_artifact_determinism},
      {"config-unknown-keys", check_config_rejection},
  };
  return checks;
}

int run_all(std::ostream& out) {
  int failures = 0;
  for (const Check& check : all_checks()) {
    try {
      check.run();
      out << "PASS  " << check.name << "\n";
    } catch (const std::exception& e) {
      ++failures;
      out << "FAIL  " << check.name << ": " << e.what() << "\n";
    }
  }
  out << (failures == 0 ? "all checks passed" : std::to_string(failures) + " check(s) failed")
      << " (" << all_checks().size() << " total)\n";
  return failures;
}

}  // namespace agelab::verify
