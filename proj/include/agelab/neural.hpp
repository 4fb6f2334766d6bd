#pragma once

#include <Eigen/Dense>
#include <vector>

#include "agelab/rng.hpp"

namespace agelab::neural {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class Activation { kTanh, kRelu };

// Small fully-connected Q-value network. Parameters are 64-bit floats and the
// network is a plain value: copying yields an independent, forward-identical
// clone.
struct QNetwork {
  std::vector<int> layer_dims;  // e.g. {4, 64, 64, 2}
  Activation hidden_activation = Activation::kTanh;
  std::vector<Matrix> weights;  // weights[l] maps layer_dims[l] -> layer_dims[l+1]
  std::vector<Vector> biases;

  int input_dim() const { return layer_dims.front(); }
  int num_actions() const { return layer_dims.back(); }

  // Xavier-uniform weights, zero biases.
  static QNetwork make(std::vector<int> dims, Activation activation, Rng& rng);

  // Q(s, .) for a single observation. Throws on dimension mismatch.
  Vector forward(const Vector& observation) const;

  // Columns are observations; returns a num_actions x batch matrix.
  Matrix forward_batch(const Matrix& observations) const;

  QNetwork clone() const { return *this; }
};

struct BatchEntry {
  Vector observation;
  int action = 0;
  double td_target = 0.0;
  double weight = 1.0;  // importance weight; 1 for uniform sampling
};

struct Gradients {
  double loss = 0.0;
  std::vector<Matrix> weight_grads;
  std::vector<Vector> bias_grads;
  Vector td_errors;  // per-entry Q(s,a) - target, before weighting
};

inline constexpr double kHuberDelta = 1.0;

double huber(double residual);

// Mean (weighted) Huber loss between Q(s,a) and td_target over the batch,
// with exact gradients for every parameter. Throws on an empty batch.
Gradients loss_and_gradients(const QNetwork& net, const std::vector<BatchEntry>& batch);

// Gradient of cross-entropy(softmax(Q(s,.)), one-hot target) w.r.t. the
// observation. Throws on an invalid action index.
Vector input_gradient(const QNetwork& net, const Vector& observation, int target_action);

// Global L2 norm over every weight and bias gradient.
double global_grad_norm(const Gradients& grads);

// Adaptive-moment optimizer; decay 0.9/0.999, epsilon 1e-8. Gradients are
// rescaled to max_grad_norm (global L2) before the moment update; 0 disables.
struct Adam {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double max_grad_norm = 10.0;
  long step_count = 0;
  std::vector<Matrix> m_weights, v_weights;
  std::vector<Vector> m_biases, v_biases;

  static Adam for_network(const QNetwork& net, double learning_rate = 1e-3);

  // Applies one update in place. Throws on shape mismatch.
  void step(QNetwork& net, const Gradients& grads);
};

}  // namespace agelab::neural
