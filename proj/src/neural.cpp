#include "agelab/neural.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace agelab::neural {

namespace {

void apply_activation(Matrix& z, Activation activation) {
  if (activation == Activation::kTanh) {
    z = z.array().tanh();
  } else {
    z = z.array().max(0.0);
  }
}

// Derivative expressed through the activated value a = act(z).
Matrix activation_grad_from_output(const Matrix& a, Activation activation) {
  if (activation == Activation::kTanh) {
    return 1.0 - a.array().square();
  }
  return (a.array() > 0.0).cast<double>();
}

}  // namespace

QNetwork QNetwork::make(std::vector<int> dims, Activation activation, Rng& rng) {
  if (dims.size() < 2) {
    throw std::invalid_argument("QNetwork::make: need at least input and output dims");
  }
  QNetwork net;
  net.layer_dims = std::move(dims);
  net.hidden_activation = activation;
  for (std::size_t l = 0; l + 1 < net.layer_dims.size(); ++l) {
    const int in = net.layer_dims[l];
    const int out = net.layer_dims[l + 1];
    const double limit = std::sqrt(6.0 / (in + out));
    Matrix w(out, in);
    for (int r = 0; r < out; ++r) {
      for (int c = 0; c < in; ++c) {
        w(r, c) = rng.uniform(-limit, limit);
      }
    }
    net.weights.push_back(std::move(w));
    net.biases.push_back(Vector::Zero(out));
  }
  return net;
}

Matrix QNetwork::forward_batch(const Matrix& observations) const {
  if (observations.rows() != input_dim()) {
    throw std::invalid_argument("QNetwork::forward: observation dimension mismatch");
  }
  Matrix a = observations;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    Matrix z = weights[l] * a;
    z.colwise() += biases[l];
    if (l + 1 < weights.size()) apply_activation(z, hidden_activation);
    a = std::move(z);
  }
  return a;
}

Vector QNetwork::forward(const Vector& observation) const {
  return forward_batch(observation);
}

double huber(double residual) {
  const double r = std::abs(residual);
  if (r <= kHuberDelta) return 0.5 * residual * residual;
  return kHuberDelta * (r - 0.5 * kHuberDelta);
}

Gradients loss_and_gradients(const QNetwork& net, const std::vector<BatchEntry>& batch) {
  if (batch.empty()) {
    throw std::invalid_argument("loss_and_gradients: empty batch");
  }
  const int batch_size = static_cast<int>(batch.size());
  const int in_dim = net.input_dim();
  const int num_layers = static_cast<int>(net.weights.size());

  Matrix inputs(in_dim, batch_size);
  for (int j = 0; j < batch_size; ++j) {
    if (batch[j].observation.size() != in_dim) {
      throw std::invalid_argument("loss_and_gradients: observation dimension mismatch");
    }
    inputs.col(j) = batch[j].observation;
  }

  // Forward pass retaining every layer's activations.
  std::vector<Matrix> activations;
  activations.reserve(num_layers + 1);
  activations.push_back(inputs);
  for (int l = 0; l < num_layers; ++l) {
    Matrix z = net.weights[l] * activations.back();
    z.colwise() += net.biases[l];
    if (l + 1 < num_layers) apply_activation(z, net.hidden_activation);
    activations.push_back(std::move(z));
  }
  const Matrix& q = activations.back();

  Gradients grads;
  grads.td_errors = Vector::Zero(batch_size);
  Matrix delta = Matrix::Zero(q.rows(), batch_size);
  double loss = 0.0;
  for (int j = 0; j < batch_size; ++j) {
    const int action = batch[j].action;
    if (action < 0 || action >= q.rows()) {
      throw std::invalid_argument("loss_and_gradients: action index out of range");
    }
    const double residual = q(action, j) - batch[j].td_target;
    grads.td_errors(j) = residual;
    loss += batch[j].weight * huber(residual);
    const double dq = std::clamp(residual, -kHuberDelta, kHuberDelta);
    delta(action, j) = batch[j].weight * dq / batch_size;
  }
  grads.loss = loss / batch_size;

  grads.weight_grads.resize(num_layers);
  grads.bias_grads.resize(num_layers);
  for (int l = num_layers - 1; l >= 0; --l) {
    grads.weight_grads[l] = delta * activations[l].transpose();
    grads.bias_grads[l] = delta.rowwise().sum();
    if (l > 0) {
      Matrix upstream = net.weights[l].transpose() * delta;
      delta = upstream.cwiseProduct(
          activation_grad_from_output(activations[l], net.hidden_activation));
    }
  }
  return grads;
}

Vector input_gradient(const QNetwork& net, const Vector& observation, int target_action) {
  if (target_action < 0 || target_action >= net.num_actions()) {
    throw std::invalid_argument("input_gradient: invalid action index");
  }
  const int num_layers = static_cast<int>(net.weights.size());
  std::vector<Matrix> activations;
  activations.reserve(num_layers + 1);
  activations.push_back(observation);
  for (int l = 0; l < num_layers; ++l) {
    Matrix z = net.weights[l] * activations.back();
    z.colwise() += net.biases[l];
    if (l + 1 < num_layers) apply_activation(z, net.hidden_activation);
    activations.push_back(std::move(z));
  }

  // Stabilized softmax of the Q-values; dL/dq = softmax - one_hot(target).
  const Vector q = activations.back();
  const double q_max = q.maxCoeff();
  Vector soft = (q.array() - q_max).exp();
  soft /= soft.sum();
  Matrix delta = soft;
  delta(target_action, 0) -= 1.0;

  for (int l = num_layers - 1; l >= 0; --l) {
    Matrix upstream = net.weights[l].transpose() * delta;
    if (l > 0) {
      delta = upstream.cwiseProduct(
          activation_grad_from_output(activations[l], net.hidden_activation));
    } else {
      delta = std::move(upstream);
    }
  }
  return delta.col(0);
}

Adam Adam::for_network(const QNetwork& net, double learning_rate) {
  Adam opt;
  opt.learning_rate = learning_rate;
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    opt.m_weights.push_back(Matrix::Zero(net.weights[l].rows(), net.weights[l].cols()));
    opt.v_weights.push_back(Matrix::Zero(net.weights[l].rows(), net.weights[l].cols()));
    opt.m_biases.push_back(Vector::Zero(net.biases[l].size()));
    opt.v_biases.push_back(Vector::Zero(net.biases[l].size()));
  }
  return opt;
}

double global_grad_norm(const Gradients& grads) {
  double sum_sq = 0.0;
  for (const Matrix& g : grads.weight_grads) sum_sq += g.squaredNorm();
  for (const Vector& g : grads.bias_grads) sum_sq += g.squaredNorm();
  return std::sqrt(sum_sq);
}

void Adam::step(QNetwork& net, const Gradients& grads) {
  if (grads.weight_grads.size() != net.weights.size() ||
      m_weights.size() != net.weights.size()) {
    throw std::invalid_argument("Adam::step: gradient/parameter shape mismatch");
  }
  ++step_count;
  double scale = 1.0;
  if (max_grad_norm > 0.0) {
    const double norm = global_grad_norm(grads);
    if (norm > max_grad_norm) scale = max_grad_norm / norm;
  }
  const double bias1 = 1.0 - std::pow(beta1, static_cast<double>(step_count));
  const double bias2 = 1.0 - std::pow(beta2, static_cast<double>(step_count));
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    if (grads.weight_grads[l].rows() != net.weights[l].rows() ||
        grads.weight_grads[l].cols() != net.weights[l].cols()) {
      throw std::invalid_argument("Adam::step: gradient/parameter shape mismatch");
    }
    auto& mw = m_weights[l];
    auto& vw = v_weights[l];
    mw = beta1 * mw + (1.0 - beta1) * scale * grads.weight_grads[l];
    vw = beta2 * vw.array() +
         (1.0 - beta2) * (scale * grads.weight_grads[l]).array().square();
    net.weights[l].array() -=
        learning_rate * (mw.array() / bias1) / ((vw.array() / bias2).sqrt() + epsilon);

    auto& mb = m_biases[l];
    auto& vb = v_biases[l];
    mb = beta1 * mb + (1.0 - beta1) * scale * grads.bias_grads[l];
    vb = beta2 * vb.array() + (1.0 - beta2) * (scale * grads.bias_grads[l]).array().square();
    net.biases[l].array() -=
        learning_rate * (mb.array() / bias1) / ((vb.array() / bias2).sqrt() + epsilon);
  }
}

}  // namespace agelab::neural
