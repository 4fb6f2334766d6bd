#pragma once

#include <string>
#include <vector>

#include "agelab/attacks.hpp"
#include "agelab/rng.hpp"

namespace agelab::tabular {

// Explicit finite MDP: dense transition kernel T[s][a] -> distribution over
// states and reward table r(s, a, s'). Terminal states absorb with zero
// reward and are never updated.
struct ToyMdp {
  int num_states = 0;
  int num_actions = 0;
  std::vector<double> transition;  // (s * A + a) * S + s'
  std::vector<double> reward;      // same layout
  double gamma = 0.99;
  std::vector<bool> terminal;
  int start_state = 0;

  double t(int s, int a, int next) const {
    return transition[(static_cast<std::size_t>(s) * num_actions + a) * num_states + next];
  }
  double r(int s, int a, int next) const {
    return reward[(static_cast<std::size_t>(s) * num_actions + a) * num_states + next];
  }

  // Throws unless every non-terminal row sums to 1 within 1e-12.
  void validate() const;

  // 0..n-1 left/right chain; the last state is the rewarding terminal goal.
  static ToyMdp chain(int length = 5);

  // 5x5 grid, four moves, goal (+1) at one corner and a pit (-1) mid-grid.
  static ToyMdp gridworld5();
};

// Per-state sampling probabilities of the replay memory: p_s[s] is the
// probability of drawing an experience beginning with s (nominal or crafted),
// p_attack_given_s[s] the probability of drawing a crafted one.
struct SamplingProfile {
  std::vector<double> p_s;
  std::vector<double> p_attack_given_s;

  double p_nominal(int s) const { return p_s[s] - p_attack_given_s[s]; }
  void validate() const;
};

struct TabularQ {
  int num_states = 0;
  int num_actions = 0;
  std::vector<double> q;

  TabularQ() = default;
  TabularQ(int states, int actions)
      : num_states(states), num_actions(actions),
        q(static_cast<std::size_t>(states) * actions, 0.0) {}

  double& at(int s, int a) { return q[static_cast<std::size_t>(s) * num_actions + a]; }
  double at(int s, int a) const { return q[static_cast<std::size_t>(s) * num_actions + a]; }
  int greedy(int s) const;   // lowest index wins ties
  int worst(int s) const;
};

// Expected TD-error of state s with attacked and nominal successors given
// explicitly:
//   p(attack|s) [r(s,a,att) + g V(att)] + (p(s) - p(attack|s)) [r(s,a,nom) + g V(nom)] - V(s)
double expected_td_error(const SamplingProfile& profile, const ToyMdp& mdp,
                         const std::vector<double>& values, int s, int a, int nominal_next,
                         int attacked_next);

// Kernel form for stochastic MDPs: the nominal term takes expectation over
// T[s][a], the attacked term over T[true_source][a] (the outcome that got
// attributed to s came from true_source).
double expected_td_error_kernel(const SamplingProfile& profile, const ToyMdp& mdp,
                                const std::vector<double>& values, int s, int a,
                                int true_source);

// Strict bias-decrease condition between consecutive training iterations.
bool bias_decrease_holds(const SamplingProfile& profile_i,
                         const SamplingProfile& profile_i_plus_1, int s);

// Uniform-sampling recovery threshold.
bool uniform_threshold_holds(double p_attack);

std::vector<double> value_iteration(const ToyMdp& mdp, double tol = 1e-12,
                                    int max_sweeps = 100000);
std::vector<double> q_from_values(const ToyMdp& mdp, const std::vector<double>& values);

// Greedy action of q is value-optimal at every non-terminal state.
bool policy_is_optimal(const ToyMdp& mdp, const TabularQ& q, double tol = 1e-9);

// Exact value of the greedy-from-q policy at the start state.
double greedy_policy_value(const ToyMdp& mdp, const TabularQ& q, double tol = 1e-12);

struct TabularConfig {
  double learning_rate = 0.1;
  bool visit_count_decay = false;  // 1 / (1 + visits) step sizes instead
  long episodes = 50000;
  int max_episode_steps = 100;
  double behavior_epsilon = 1.0;  // uniform behavior covers every cell
  double initial_q = 1.0;         // optimistic: both toy MDPs cap returns at 1
  std::size_t replay_capacity = 5000;
  int replay_samples_per_step = 4;
};

struct TabularResult {
  bool converged = false;
  TabularQ final_q;
  double greedy_value = 0.0;
  long episodes_to_converge = -1;
};

// Tabular Q-learning with uniform experience replay under an oracle
// observation adversary: with probability p_attack each drawn sample's
// start-state is replaced by a forged state and its action redirected per
// the mode (state-neutral: any non-greedy action; targeted: argmin Q), so
// the true outcome is attributed to the forged state-action. Convergence
// requires the greedy policy to match the value-iteration optimum over the
// last 20% of episodes.
TabularResult tabular_attack_experiment(const ToyMdp& mdp, double p_attack, attack::Mode mode,
                                        long episodes, Rng& rng,
                                        const TabularConfig& config = TabularConfig{});

struct SweepCell {
  double p_attack = 0.0;
  std::uint64_t seed = 0;
  attack::Mode mode = attack::Mode::kStateNeutral;
  std::string mdp_name;
  bool converged = false;
  long episodes_to_converge = -1;
};

struct SweepConfig {
  std::vector<double> p_attacks = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  int seeds_per_cell = 20;
  attack::Mode mode = attack::Mode::kStateNeutral;
  long episodes = 30000;
  TabularConfig tabular;
  bool include_chain = true;
  bool include_gridworld = true;

  SweepConfig() { tabular.visit_count_decay = true; }  // 1/n averages sharpen the threshold
};

std::vector<SweepCell> run_sweep(const SweepConfig& config, std::uint64_t master_seed);

}  // namespace agelab::tabular
