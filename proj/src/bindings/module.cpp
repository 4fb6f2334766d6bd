// Python bindings for the agelab core: environment, network, exploration,
// attacks, trainers, and the tabular analysis toolkit.

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "agelab/attacks.hpp"
#include "agelab/cartpole.hpp"
#include "agelab/checkpoint.hpp"
#include "agelab/experiments.hpp"
#include "agelab/exploration.hpp"
#include "agelab/neural.hpp"
#include "agelab/resilience.hpp"
#include "agelab/rng.hpp"
#include "agelab/tabular.hpp"
#include "agelab/trainer.hpp"

namespace py = pybind11;
using namespace agelab;

PYBIND11_MODULE(_agelab, m) {
  m.doc() = "Adversarially-guided exploration laboratory (C++ core)";

  py::class_<Rng>(m, "Rng")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("uniform", py::overload_cast<>(&Rng::uniform))
      .def("uniform", py::overload_cast<double, double>(&Rng::uniform))
      .def("uniform_int", &Rng::uniform_int, py::arg("n"))
      .def("bernoulli", &Rng::bernoulli, py::arg("p"))
      .def("normal", &Rng::normal)
      .def("split", &Rng::split, py::arg("label"));

  // --- cart-pole -------------------------------------------------------
  py::class_<cartpole::EnvState>(m, "EnvState")
      .def(py::init<>())
      .def_readwrite("cart_position", &cartpole::EnvState::cart_position)
      .def_readwrite("cart_velocity", &cartpole::EnvState::cart_velocity)
      .def_readwrite("pole_angle", &cartpole::EnvState::pole_angle)
      .def_readwrite("pole_tip_velocity", &cartpole::EnvState::pole_tip_velocity)
      .def_readwrite("step_count", &cartpole::EnvState::step_count)
      .def("obs", &cartpole::EnvState::obs);
  py::class_<cartpole::StepResult>(m, "StepResult")
      .def_readonly("next_state", &cartpole::StepResult::next_state)
      .def_readonly("reward", &cartpole::StepResult::reward)
      .def_readonly("terminated", &cartpole::StepResult::terminated);
  m.def("reset", &cartpole::reset, py::arg("rng"));
  m.def("step", &cartpole::step, py::arg("state"), py::arg("action"));
  m.def("is_terminal", &cartpole::is_terminal, py::arg("state"));
  m.attr("MAX_EPISODE_STEPS") = cartpole::kMaxEpisodeSteps;

  // --- network ---------------------------------------------------------
  py::enum_<neural::Activation>(m, "Activation")
      .value("tanh", neural::Activation::kTanh)
      .value("relu", neural::Activation::kRelu);
  py::class_<neural::QNetwork>(m, "QNetwork")
      .def_static("make", &neural::QNetwork::make, py::arg("dims"), py::arg("activation"),
                  py::arg("rng"))
      .def_readonly("layer_dims", &neural::QNetwork::layer_dims)
      .def_property_readonly("weights",
                             [](const neural::QNetwork& net) { return net.weights; })
      .def_property_readonly("biases",
                             [](const neural::QNetwork& net) { return net.biases; })
      .def("input_dim", &neural::QNetwork::input_dim)
      .def("num_actions", &neural::QNetwork::num_actions)
      .def("forward", &neural::QNetwork::forward, py::arg("observation"))
      .def("forward_batch", &neural::QNetwork::forward_batch, py::arg("observations"))
      .def("clone", &neural::QNetwork::clone);
  m.def("input_gradient", &neural::input_gradient, py::arg("net"), py::arg("observation"),
        py::arg("target_action"));

  m.def("save_checkpoint", &agelab::save_checkpoint, py::arg("net"), py::arg("path"));
  m.def("load_checkpoint", &agelab::load_checkpoint, py::arg("path"));

  // --- exploration -----------------------------------------------------
  py::enum_<explore::Strategy>(m, "Strategy")
      .value("eps_greedy", explore::Strategy::kEpsGreedy)
      .value("boltzmann", explore::Strategy::kBoltzmann)
      .value("param_noise", explore::Strategy::kParamNoise)
      .value("age", explore::Strategy::kAge);
  py::class_<explore::Schedule>(m, "Schedule")
      .def(py::init<>())
      .def_readwrite("initial_epsilon", &explore::Schedule::initial_epsilon)
      .def_readwrite("final_epsilon", &explore::Schedule::final_epsilon)
      .def_readwrite("exploration_fraction", &explore::Schedule::exploration_fraction)
      .def_readwrite("total_timesteps", &explore::Schedule::total_timesteps)
      .def("epsilon_at", &explore::Schedule::epsilon_at, py::arg("step"));
  m.def("argmax", &explore::argmax, py::arg("values"));
  m.def("zeta_adv", &explore::zeta_adv, py::arg("q_values"), py::arg("epsilon"));
  m.def("age_select", &explore::age_select, py::arg("q_values"), py::arg("epsilon"),
        py::arg("rng"), py::arg("temperature_override") = -1.0);
  m.def("eps_greedy_select", &explore::eps_greedy_select, py::arg("q_values"),
        py::arg("epsilon"), py::arg("rng"));
  m.def("boltzmann_probs", &explore::boltzmann_probs, py::arg("q_values"),
        py::arg("temperature"));

  // --- attacks ---------------------------------------------------------
  py::enum_<attack::Mode>(m, "AttackMode")
      .value("state_neutral", attack::Mode::kStateNeutral)
      .value("targeted", attack::Mode::kTargeted);
  py::class_<attack::AttackSpec>(m, "AttackSpec")
      .def(py::init<>())
      .def_readwrite("p_attack", &attack::AttackSpec::p_attack)
      .def_readwrite("mode", &attack::AttackSpec::mode)
      .def_readwrite("step_size", &attack::AttackSpec::step_size)
      .def_readwrite("max_iterations", &attack::AttackSpec::max_iterations)
      .def_readwrite("max_linf_radius", &attack::AttackSpec::max_linf_radius)
      .def_readwrite("oracle_fallback", &attack::AttackSpec::oracle_fallback)
      .def_readwrite("c_adv", &attack::AttackSpec::c_adv);
  py::class_<attack::CraftResult>(m, "CraftResult")
      .def_readonly("perturbed_observation", &attack::CraftResult::perturbed_observation)
      .def_readonly("induced_action", &attack::CraftResult::induced_action)
      .def_readonly("success", &attack::CraftResult::success)
      .def_readonly("used_oracle", &attack::CraftResult::used_oracle)
      .def_readonly("iterations_used", &attack::CraftResult::iterations_used);
  m.def("craft", &attack::craft, py::arg("spec"), py::arg("net"), py::arg("true_obs"));
  m.def("should_attack", &attack::should_attack, py::arg("spec"), py::arg("rng"));

  // --- DQN trainer -----------------------------------------------------
  py::enum_<train::Sampler>(m, "Sampler")
      .value("uniform", train::Sampler::kUniform)
      .value("prioritized", train::Sampler::kPrioritized);
  py::enum_<train::AttackStart>(m, "AttackStart")
      .value("immediately", train::AttackStart::kImmediately)
      .value("after_convergence", train::AttackStart::kAfterConvergence);
  py::class_<train::TrainerConfig>(m, "TrainerConfig")
      .def(py::init<>())
      .def_readwrite("total_timesteps", &train::TrainerConfig::total_timesteps)
      .def_readwrite("gamma", &train::TrainerConfig::gamma)
      .def_readwrite("learning_rate", &train::TrainerConfig::learning_rate)
      .def_readwrite("buffer_size", &train::TrainerConfig::buffer_size)
      .def_readwrite("first_learning_step", &train::TrainerConfig::first_learning_step)
      .def_readwrite("target_update_freq", &train::TrainerConfig::target_update_freq)
      .def_readwrite("batch_size", &train::TrainerConfig::batch_size)
      .def_readwrite("train_freq", &train::TrainerConfig::train_freq)
      .def_readwrite("sampler", &train::TrainerConfig::sampler)
      .def_readwrite("strategy", &train::TrainerConfig::strategy)
      .def_readwrite("schedule", &train::TrainerConfig::schedule)
      .def_readwrite("hidden_dims", &train::TrainerConfig::hidden_dims)
      .def_readwrite("activation", &train::TrainerConfig::activation)
      .def_readwrite("age_temperature_override",
                     &train::TrainerConfig::age_temperature_override)
      .def_readwrite("attack", &train::TrainerConfig::attack)
      .def_readwrite("attack_start", &train::TrainerConfig::attack_start)
      .def_readwrite("convergence_threshold", &train::TrainerConfig::convergence_threshold)
      .def_readwrite("convergence_window", &train::TrainerConfig::convergence_window)
      .def_readwrite("post_attack_timesteps", &train::TrainerConfig::post_attack_timesteps)
      .def("validate", &train::TrainerConfig::validate);
  py::class_<train::StepRecord>(m, "StepRecord")
      .def_readonly("step", &train::StepRecord::step)
      .def_readonly("episode", &train::StepRecord::episode)
      .def_readonly("episode_reward", &train::StepRecord::episode_reward)
      .def_readonly("epsilon", &train::StepRecord::epsilon)
      .def_readonly("loss", &train::StepRecord::loss)
      .def_readonly("attacked", &train::StepRecord::attacked);
  py::class_<train::EpisodeRecord>(m, "EpisodeRecord")
      .def_readonly("episode", &train::EpisodeRecord::episode)
      .def_readonly("end_step", &train::EpisodeRecord::end_step)
      .def_readonly("reward", &train::EpisodeRecord::reward)
      .def_readonly("ma100", &train::EpisodeRecord::ma100);
  py::class_<train::TrainLog>(m, "TrainLog")
      .def_readonly("steps", &train::TrainLog::steps)
      .def_readonly("episodes", &train::TrainLog::episodes)
      .def_readonly("target_sync_steps", &train::TrainLog::target_sync_steps)
      .def_readonly("convergence_step", &train::TrainLog::convergence_step)
      .def_readonly("attack_start_step", &train::TrainLog::attack_start_step)
      .def_readonly("attack_start_push", &train::TrainLog::attack_start_push)
      .def_readonly("overwrite_pushes", &train::TrainLog::overwrite_pushes)
      .def_readonly("final_perturbed_fraction", &train::TrainLog::final_perturbed_fraction);
  py::class_<train::TrainResult>(m, "TrainResult")
      .def_readonly("network", &train::TrainResult::network)
      .def_readonly("log", &train::TrainResult::log);
  py::class_<train::EvalStats>(m, "EvalStats")
      .def_readonly("mean", &train::EvalStats::mean)
      .def_readonly("stddev", &train::EvalStats::stddev);
  m.def("train", &train::train, py::arg("config"), py::arg("rng"),
        py::call_guard<py::gil_scoped_release>());
  m.def("evaluate", &train::evaluate, py::arg("net"), py::arg("episodes"), py::arg("rng"),
        py::call_guard<py::gil_scoped_release>());
  m.def("detect_convergence", &train::detect_convergence, py::arg("log"),
        py::arg("threshold") = 475.0, py::arg("window") = 100);

  // --- resilience benchmark --------------------------------------------
  m.def("adversary_step_reward", &resilience::adversary_step_reward,
        py::arg("victim_step_reward"), py::arg("attacked"), py::arg("c_adv"));

  // --- tabular analysis --------------------------------------------------
  py::class_<tabular::ToyMdp>(m, "ToyMdp")
      .def_static("chain", &tabular::ToyMdp::chain, py::arg("length") = 5)
      .def_static("gridworld5", &tabular::ToyMdp::gridworld5)
      .def_readonly("num_states", &tabular::ToyMdp::num_states)
      .def_readonly("num_actions", &tabular::ToyMdp::num_actions)
      .def_readonly("gamma", &tabular::ToyMdp::gamma)
      .def_readonly("start_state", &tabular::ToyMdp::start_state)
      .def("t", &tabular::ToyMdp::t, py::arg("s"), py::arg("a"), py::arg("next"))
      .def("r", &tabular::ToyMdp::r, py::arg("s"), py::arg("a"), py::arg("next"));
  py::class_<tabular::SamplingProfile>(m, "SamplingProfile")
      .def(py::init<>())
      .def_readwrite("p_s", &tabular::SamplingProfile::p_s)
      .def_readwrite("p_attack_given_s", &tabular::SamplingProfile::p_attack_given_s)
      .def("p_nominal", &tabular::SamplingProfile::p_nominal, py::arg("s"));
  py::class_<tabular::TabularQ>(m, "TabularQ")
      .def_readonly("num_states", &tabular::TabularQ::num_states)
      .def_readonly("num_actions", &tabular::TabularQ::num_actions)
      .def("at", py::overload_cast<int, int>(&tabular::TabularQ::at, py::const_),
           py::arg("s"), py::arg("a"))
      .def("greedy", &tabular::TabularQ::greedy, py::arg("s"));
  py::class_<tabular::TabularConfig>(m, "TabularConfig")
      .def(py::init<>())
      .def_readwrite("learning_rate", &tabular::TabularConfig::learning_rate)
      .def_readwrite("visit_count_decay", &tabular::TabularConfig::visit_count_decay)
      .def_readwrite("episodes", &tabular::TabularConfig::episodes)
      .def_readwrite("max_episode_steps", &tabular::TabularConfig::max_episode_steps)
      .def_readwrite("behavior_epsilon", &tabular::TabularConfig::behavior_epsilon)
      .def_readwrite("replay_capacity", &tabular::TabularConfig::replay_capacity)
      .def_readwrite("replay_samples_per_step", &tabular::TabularConfig::replay_samples_per_step);
  py::class_<tabular::TabularResult>(m, "TabularResult")
      .def_readonly("converged", &tabular::TabularResult::converged)
      .def_readonly("final_q", &tabular::TabularResult::final_q)
      .def_readonly("greedy_value", &tabular::TabularResult::greedy_value)
      .def_readonly("episodes_to_converge", &tabular::TabularResult::episodes_to_converge);
  m.def("expected_td_error", &tabular::expected_td_error, py::arg("profile"), py::arg("mdp"),
        py::arg("values"), py::arg("s"), py::arg("a"), py::arg("nominal_next"),
        py::arg("attacked_next"));
  m.def("uniform_threshold_holds", &tabular::uniform_threshold_holds, py::arg("p_attack"));
  m.def("value_iteration", &tabular::value_iteration, py::arg("mdp"), py::arg("tol") = 1e-12,
        py::arg("max_sweeps") = 100000);
  m.def("tabular_attack_experiment", &tabular::tabular_attack_experiment, py::arg("mdp"),
        py::arg("p_attack"), py::arg("mode"), py::arg("episodes"), py::arg("rng"),
        py::arg("config") = tabular::TabularConfig{},
        py::call_guard<py::gil_scoped_release>());

  // --- experiment harness -----------------------------------------------
  py::class_<experiments::RunSummary>(m, "RunSummary")
      .def_readonly("experiment", &experiments::RunSummary::experiment)
      .def_readonly("output_dir", &experiments::RunSummary::output_dir)
      .def_readonly("files", &experiments::RunSummary::files)
      .def_readonly("notes", &experiments::RunSummary::notes);
  m.def("run_from_config", &experiments::run_from_config, py::arg("config_path"),
        py::call_guard<py::gil_scoped_release>());
  m.def("known_experiment_names", &experiments::known_experiment_names);
}
