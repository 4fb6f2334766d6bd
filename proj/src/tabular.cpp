#include "agelab/tabular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace agelab::tabular {

void ToyMdp::validate() const {
  if (num_states <= 0 || num_actions <= 0) {
    throw std::invalid_argument("ToyMdp: empty state or action space");
  }
  const std::size_t expected = static_cast<std::size_t>(num_states) * num_actions * num_states;
  if (transition.size() != expected || reward.size() != expected ||
      terminal.size() != static_cast<std::size_t>(num_states)) {
    throw std::invalid_argument("ToyMdp: table sizes do not match dimensions");
  }
  for (int s = 0; s < num_states; ++s) {
    if (terminal[s]) continue;
    for (int a = 0; a < num_actions; ++a) {
      double row = 0.0;
      for (int next = 0; next < num_states; ++next) row += t(s, a, next);
      if (std::abs(row - 1.0) > 1e-12) {
        throw std::invalid_argument("ToyMdp: transition row does not sum to 1");
      }
    }
  }
}

namespace {

struct MdpBuilder {
  ToyMdp mdp;
  MdpBuilder(int states, int actions) {
    mdp.num_states = states;
    mdp.num_actions = actions;
    mdp.transition.assign(static_cast<std::size_t>(states) * actions * states, 0.0);
    mdp.reward.assign(static_cast<std::size_t>(states) * actions * states, 0.0);
    mdp.terminal.assign(states, false);
  }
  std::size_t idx(int s, int a, int next) const {
    return (static_cast<std::size_t>(s) * mdp.num_actions + a) * mdp.num_states + next;
  }
  void arc(int s, int a, int next, double prob, double reward) {
    mdp.transition[idx(s, a, next)] += prob;
    mdp.reward[idx(s, a, next)] = reward;
  }
};

}  // namespace

ToyMdp ToyMdp::chain(int length) {
  if (length < 2) throw std::invalid_argument("chain: need at least two states");
  MdpBuilder b(length, 2);
  const int goal = length - 1;
  for (int s = 0; s < length; ++s) {
    if (s == goal) {
      b.mdp.terminal[s] = true;
      continue;
    }
    const int left = std::max(0, s - 1);
    const int right = s + 1;
    b.arc(s, 0, left, 1.0, 0.0);
    b.arc(s, 1, right, 1.0, right == goal ? 1.0 : 0.0);
  }
  b.mdp.gamma = 0.99;
  b.mdp.start_state = 0;
  b.mdp.validate();
  return b.mdp;
}

ToyMdp ToyMdp::gridworld5() {
  constexpr int kSide = 5;
  constexpr int kStates = kSide * kSide;
  const int goal = kStates - 1;     // (4, 4)
  const int pit = 2 * kSide + 2;    // (2, 2)
  MdpBuilder b(kStates, 4);
  b.mdp.terminal[goal] = true;
  b.mdp.terminal[pit] = true;
  constexpr int kDeltaRow[4] = {-1, 1, 0, 0};  // up, down, left, right
  constexpr int kDeltaCol[4] = {0, 0, -1, 1};
  for (int row = 0; row < kSide; ++row) {
    for (int col = 0; col < kSide; ++col) {
      const int s = row * kSide + col;
      if (b.mdp.terminal[s]) continue;
      for (int a = 0; a < 4; ++a) {
        const int next_row = std::clamp(row + kDeltaRow[a], 0, kSide - 1);
        const int next_col = std::clamp(col + kDeltaCol[a], 0, kSide - 1);
        const int next = next_row * kSide + next_col;
        double reward = -0.04;  // step cost keeps action gaps wide everywhere
        if (next == goal) reward = 1.0;
        if (next == pit) reward = -1.0;
        b.arc(s, a, next, 1.0, reward);
      }
    }
  }
  b.mdp.gamma = 0.99;
  b.mdp.start_state = 0;
  b.mdp.validate();
  return b.mdp;
}

void SamplingProfile::validate() const {
  if (p_s.size() != p_attack_given_s.size()) {
    throw std::invalid_argument("SamplingProfile: size mismatch");
  }
  double total = 0.0;
  for (std::size_t s = 0; s < p_s.size(); ++s) {
    if (p_attack_given_s[s] < -1e-12 || p_attack_given_s[s] > p_s[s] + 1e-12) {
      throw std::invalid_argument("SamplingProfile: need 0 <= p(attack|s) <= p(s)");
    }
    total += p_s[s];
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("SamplingProfile: p_s must sum to 1");
  }
}

int TabularQ::greedy(int s) const {
  int best = 0;
  for (int a = 1; a < num_actions; ++a) {
    if (at(s, a) > at(s, best)) best = a;
  }
  return best;
}

int TabularQ::worst(int s) const {
  int best = 0;
  for (int a = 1; a < num_actions; ++a) {
    if (at(s, a) < at(s, best)) best = a;
  }
  return best;
}

double expected_td_error(const SamplingProfile& profile, const ToyMdp& mdp,
                         const std::vector<double>& values, int s, int a, int nominal_next,
                         int attacked_next) {
  if (s < 0 || s >= mdp.num_states || nominal_next < 0 || nominal_next >= mdp.num_states ||
      attacked_next < 0 || attacked_next >= mdp.num_states) {
    throw std::invalid_argument("expected_td_error: state index out of range");
  }
  if (a < 0 || a >= mdp.num_actions) {
    throw std::invalid_argument("expected_td_error: action index out of range");
  }
  const double p_attack = profile.p_attack_given_s[s];
  const double p_nominal = profile.p_s[s] - p_attack;
  const double attacked_term = mdp.r(s, a, attacked_next) + mdp.gamma * values[attacked_next];
  const double nominal_term = mdp.r(s, a, nominal_next) + mdp.gamma * values[nominal_next];
  return p_attack * attacked_term + p_nominal * nominal_term - values[s];
}

double expected_td_error_kernel(const SamplingProfile& profile, const ToyMdp& mdp,
                                const std::vector<double>& values, int s, int a,
                                int true_source) {
  if (s < 0 || s >= mdp.num_states || true_source < 0 || true_source >= mdp.num_states) {
    throw std::invalid_argument("expected_td_error_kernel: state index out of range");
  }
  const double p_attack = profile.p_attack_given_s[s];
  const double p_nominal = profile.p_s[s] - p_attack;
  double attacked_term = 0.0;
  double nominal_term = 0.0;
  for (int next = 0; next < mdp.num_states; ++next) {
    attacked_term +=
        mdp.t(true_source, a, next) * (mdp.r(s, a, next) + mdp.gamma * values[next]);
    nominal_term += mdp.t(s, a, next) * (mdp.r(s, a, next) + mdp.gamma * values[next]);
  }
  return p_attack * attacked_term + p_nominal * nominal_term - values[s];
}

bool bias_decrease_holds(const SamplingProfile& profile_i,
                         const SamplingProfile& profile_i_plus_1, int s) {
  return profile_i_plus_1.p_nominal(s) > profile_i.p_nominal(s);
}

bool uniform_threshold_holds(double p_attack) {
  if (p_attack < 0.0 || p_attack > 1.0) {
    throw std::invalid_argument("uniform_threshold_holds: p_attack outside [0, 1]");
  }
  return p_attack < 0.5;
}

std::vector<double> value_iteration(const ToyMdp& mdp, double tol, int max_sweeps) {
  std::vector<double> values(mdp.num_states, 0.0);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double delta = 0.0;
    for (int s = 0; s < mdp.num_states; ++s) {
      if (mdp.terminal[s]) continue;
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < mdp.num_actions; ++a) {
        double q = 0.0;
        for (int next = 0; next < mdp.num_states; ++next) {
          const double p = mdp.t(s, a, next);
          if (p > 0.0) q += p * (mdp.r(s, a, next) + mdp.gamma * values[next]);
        }
        best = std::max(best, q);
      }
      delta = std::max(delta, std::abs(best - values[s]));
      values[s] = best;
    }
    if (delta < tol) break;
  }
  return values;
}

std::vector<double> q_from_values(const ToyMdp& mdp, const std::vector<double>& values) {
  std::vector<double> q(static_cast<std::size_t>(mdp.num_states) * mdp.num_actions, 0.0);
  for (int s = 0; s < mdp.num_states; ++s) {
    if (mdp.terminal[s]) continue;
    for (int a = 0; a < mdp.num_actions; ++a) {
      double value = 0.0;
      for (int next = 0; next < mdp.num_states; ++next) {
        const double p = mdp.t(s, a, next);
        if (p > 0.0) value += p * (mdp.r(s, a, next) + mdp.gamma * values[next]);
      }
      q[static_cast<std::size_t>(s) * mdp.num_actions + a] = value;
    }
  }
  return q;
}

bool policy_is_optimal(const ToyMdp& mdp, const TabularQ& q, double tol) {
  const std::vector<double> v_star = value_iteration(mdp);
  const std::vector<double> q_star = q_from_values(mdp, v_star);
  for (int s = 0; s < mdp.num_states; ++s) {
    if (mdp.terminal[s]) continue;
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < mdp.num_actions; ++a) {
      best = std::max(best, q_star[static_cast<std::size_t>(s) * mdp.num_actions + a]);
    }
    const int chosen = q.greedy(s);
    if (q_star[static_cast<std::size_t>(s) * mdp.num_actions + chosen] < best - tol) {
      return false;
    }
  }
  return true;
}

double greedy_policy_value(const ToyMdp& mdp, const TabularQ& q, double tol) {
  std::vector<double> values(mdp.num_states, 0.0);
  for (int sweep = 0; sweep < 100000; ++sweep) {
    double delta = 0.0;
    for (int s = 0; s < mdp.num_states; ++s) {
      if (mdp.terminal[s]) continue;
      const int a = q.greedy(s);
      double value = 0.0;
      for (int next = 0; next < mdp.num_states; ++next) {
        const double p = mdp.t(s, a, next);
        if (p > 0.0) value += p * (mdp.r(s, a, next) + mdp.gamma * values[next]);
      }
      delta = std::max(delta, std::abs(value - values[s]));
      values[s] = value;
    }
    if (delta < tol) break;
  }
  return values[mdp.start_state];
}

namespace {

struct TabularExperience {
  int state;
  int action;
  double reward;
  int next_state;
  bool terminal;
};

int sample_next(const ToyMdp& mdp, int s, int a, Rng& rng) {
  const double draw = rng.uniform();
  double cumulative = 0.0;
  int last = 0;
  for (int next = 0; next < mdp.num_states; ++next) {
    const double p = mdp.t(s, a, next);
    if (p <= 0.0) continue;
    cumulative += p;
    last = next;
    if (draw < cumulative) return next;
  }
  return last;
}

// Oracle perception forgery: another buffer tuple's start-state, so forged
// states follow the same occupancy as nominal ones and each state's attacked
// sample share stays at p_attack.
int forge_state(const std::vector<TabularExperience>& buffer, int true_state, Rng& rng) {
  for (int attempt = 0; attempt < 8; ++attempt) {
    const int s = buffer[rng.uniform_int(buffer.size())].state;
    if (s != true_state) return s;
  }
  return true_state;
}

}  // namespace

TabularResult tabular_attack_experiment(const ToyMdp& mdp, double p_attack, attack::Mode mode,
                                        long episodes, Rng& rng, const TabularConfig& config) {
  mdp.validate();
  if (mdp.num_states > 25) {
    throw std::invalid_argument("tabular_attack_experiment: MDP too large (S <= 25)");
  }
  if (p_attack < 0.0 || p_attack > 1.0) {
    throw std::invalid_argument("tabular_attack_experiment: p_attack outside [0, 1]");
  }

  Rng env_rng = rng.split("env");
  Rng explore_rng = rng.split("exploration");
  Rng attack_rng = rng.split("attack");
  Rng replay_rng = rng.split("replay");

  // Oracle targets, computed once; the per-episode optimality check reuses
  // them instead of re-running value iteration.
  const std::vector<double> v_star = value_iteration(mdp);
  const std::vector<double> q_star = q_from_values(mdp, v_star);
  const auto greedy_is_optimal = [&](const TabularQ& table) {
    for (int s = 0; s < mdp.num_states; ++s) {
      if (mdp.terminal[s]) continue;
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < mdp.num_actions; ++a) {
        best = std::max(best, q_star[static_cast<std::size_t>(s) * mdp.num_actions + a]);
      }
      const int chosen = table.greedy(s);
      if (q_star[static_cast<std::size_t>(s) * mdp.num_actions + chosen] < best - 1e-9) {
        return false;
      }
    }
    return true;
  };

  TabularQ q(mdp.num_states, mdp.num_actions);
  std::fill(q.q.begin(), q.q.end(), config.initial_q);  // optimistic start drives coverage
  std::vector<long> visits(q.q.size(), 0);
  std::vector<TabularExperience> buffer;
  buffer.reserve(config.replay_capacity);
  std::size_t cursor = 0;

  std::vector<int> starts;  // exploring starts balance occupancy across states
  for (int s = 0; s < mdp.num_states; ++s) {
    if (!mdp.terminal[s]) starts.push_back(s);
  }

  long last_suboptimal_episode = -1;  // episode index of the latest failed policy check

  for (long episode = 0; episode < episodes; ++episode) {
    int state = starts[explore_rng.uniform_int(starts.size())];
    for (int step = 0; step < config.max_episode_steps; ++step) {
      if (mdp.terminal[state]) break;

      int action;
      if (explore_rng.bernoulli(config.behavior_epsilon)) {
        action = static_cast<int>(explore_rng.uniform_int(mdp.num_actions));
      } else {
        action = q.greedy(state);
      }

      const int next = sample_next(mdp, state, action, env_rng);
      const double reward = mdp.r(state, action, next);
      const TabularExperience exp{state, action, reward, next, mdp.terminal[next]};
      if (buffer.size() < config.replay_capacity) {
        buffer.push_back(exp);
      } else {
        buffer[cursor] = exp;
        cursor = (cursor + 1) % config.replay_capacity;
      }

      for (int k = 0; k < config.replay_samples_per_step; ++k) {
        TabularExperience drawn = buffer[replay_rng.uniform_int(buffer.size())];
        if (p_attack > 0.0 && attack_rng.bernoulli(p_attack)) {
          // Perception forgery on the drawn sample: the true outcome is
          // attributed to a forged start-state, with the action redirected
          // away from the forged state's greedy choice.
          const int forged = forge_state(buffer, drawn.state, attack_rng);
          int redirected;
          if (mode == attack::Mode::kTargeted) {
            redirected = q.worst(forged);
          } else {
            const int greedy = q.greedy(forged);
            int pick = static_cast<int>(attack_rng.uniform_int(mdp.num_actions - 1));
            redirected = pick >= greedy ? pick + 1 : pick;
          }
          drawn.state = forged;
          drawn.action = redirected;
        }
        double target_value = drawn.reward;
        if (!drawn.terminal) {
          target_value += mdp.gamma * q.at(drawn.next_state, q.greedy(drawn.next_state));
        }
        const std::size_t cell =
            static_cast<std::size_t>(drawn.state) * mdp.num_actions + drawn.action;
        const double lr = config.visit_count_decay
                              ? 1.0 / (1.0 + static_cast<double>(visits[cell]))
                              : config.learning_rate;
        ++visits[cell];
        q.q[cell] += lr * (target_value - q.q[cell]);
      }

      state = next;
    }

    if (!greedy_is_optimal(q)) last_suboptimal_episode = episode;
  }

  TabularResult result;
  result.final_q = q;
  result.greedy_value = greedy_policy_value(mdp, q);
  const long holdout_start = episodes - episodes / 5;  // last 20% of episodes
  result.converged =
      episodes > 0 && last_suboptimal_episode < holdout_start && greedy_is_optimal(q);
  result.episodes_to_converge = result.converged ? last_suboptimal_episode + 1 : -1;
  return result;
}

std::vector<SweepCell> run_sweep(const SweepConfig& config, std::uint64_t master_seed) {
  std::vector<std::pair<std::string, ToyMdp>> mdps;
  if (config.include_chain) mdps.emplace_back("chain", ToyMdp::chain());
  if (config.include_gridworld) mdps.emplace_back("gridworld", ToyMdp::gridworld5());

  std::vector<SweepCell> cells;
  for (const auto& [name, mdp] : mdps) {
    for (const double p : config.p_attacks) {
      for (int k = 0; k < config.seeds_per_cell; ++k) {
        SweepCell cell;
        cell.p_attack = p;
        cell.seed = master_seed + static_cast<std::uint64_t>(k);
        cell.mode = config.mode;
        cell.mdp_name = name;
        Rng cell_rng = Rng(cell.seed).split("tabular").split(name);
        // decorrelate the p-levels without perturbing the seed list
        Rng run_rng = cell_rng.split(std::to_string(p));
        const TabularResult run = tabular_attack_experiment(mdp, p, config.mode,
                                                            config.episodes, run_rng,
                                                            config.tabular);
        cell.converged = run.converged;
        cell.episodes_to_converge = run.episodes_to_converge;
        cells.push_back(std::move(cell));
      }
    }
  }
  return cells;
}

}  // namespace agelab::tabular
