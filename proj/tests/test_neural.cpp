#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "agelab/checkpoint.hpp"
#include "agelab/neural.hpp"
#include "agelab/rng.hpp"

using namespace agelab;
using namespace agelab::neural;

namespace {

QNetwork random_net(std::vector<int> dims, Activation act, std::uint64_t seed) {
  Rng rng(seed);
  return QNetwork::make(std::move(dims), act, rng);
}

double batch_loss(const QNetwork& net, const std::vector<BatchEntry>& batch) {
  return loss_and_gradients(net, batch).loss;
}

}  // namespace

TEST_CASE("forward returns one finite value per action") {
  const QNetwork net = random_net({4, 8, 8, 2}, Activation::kTanh, 1);
  Vector obs(4);
  obs << 0.1, -0.2, 0.05, 0.3;
  const Vector q = net.forward(obs);
  REQUIRE(q.size() == 2);
  CHECK(std::isfinite(q[0]));
  CHECK(std::isfinite(q[1]));
  CHECK_THROWS(net.forward(Vector::Zero(3)));
}

TEST_CASE("forward_batch agrees with forward column by column") {
  const QNetwork net = random_net({4, 6, 3}, Activation::kRelu, 2);
  Rng rng(3);
  Matrix obs(4, 5);
  for (int c = 0; c < 5; ++c)
    for (int r = 0; r < 4; ++r) obs(r, c) = rng.uniform(-1.0, 1.0);
  const Matrix q = net.forward_batch(obs);
  REQUIRE(q.rows() == 3);
  REQUIRE(q.cols() == 5);
  for (int c = 0; c < 5; ++c) {
    const Vector single = net.forward(obs.col(c));
    for (int a = 0; a < 3; ++a) CHECK(q(a, c) == doctest::Approx(single[a]).epsilon(1e-12));
  }
}

TEST_CASE("clone is forward-identical but independent") {
  const QNetwork net = random_net({4, 8, 2}, Activation::kTanh, 4);
  QNetwork copy = net.clone();
  Vector obs(4);
  obs << 0.2, 0.1, -0.3, 0.0;
  CHECK((copy.forward(obs).array() == net.forward(obs).array()).all());
  copy.weights[0](0, 0) += 1.0;
  CHECK_FALSE((copy.forward(obs).array() == net.forward(obs).array()).all());
}

TEST_CASE("huber is quadratic inside the delta and linear outside") {
  CHECK(huber(0.0) == 0.0);
  CHECK(huber(0.5) == doctest::Approx(0.125).epsilon(1e-15));   // r^2/2
  CHECK(huber(-0.5) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(huber(1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(huber(2.0) == doctest::Approx(1.5).epsilon(1e-15));     // |r| - 1/2
  CHECK(huber(-3.0) == doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("parameter gradients match central finite differences") {
  for (const Activation act : {Activation::kTanh, Activation::kRelu}) {
    QNetwork net = random_net({4, 5, 3, 2}, act, 11 + static_cast<int>(act));
    Rng rng(23);
    std::vector<BatchEntry> batch;
    for (int i = 0; i < 4; ++i) {
      BatchEntry e;
      e.observation = Vector::NullaryExpr(4, [&](Eigen::Index) { return rng.uniform(-1.0, 1.0); });
      e.action = static_cast<int>(rng.uniform_int(2));
      e.td_target = rng.uniform(-2.0, 2.0);
      e.weight = rng.uniform(0.25, 1.0);
      batch.push_back(e);
    }
    const Gradients grads = loss_and_gradients(net, batch);
    const double h = 1e-6;
    for (std::size_t layer = 0; layer < net.weights.size(); ++layer) {
      for (int r = 0; r < net.weights[layer].rows(); ++r) {
        for (int c = 0; c < net.weights[layer].cols(); ++c) {
          const double saved = net.weights[layer](r, c);
          net.weights[layer](r, c) = saved + h;
          const double up = batch_loss(net, batch);
          net.weights[layer](r, c) = saved - h;
          const double down = batch_loss(net, batch);
          net.weights[layer](r, c) = saved;
          const double fd = (up - down) / (2.0 * h);
          const double analytic = grads.weight_grads[layer](r, c);
          const double scale = std::max({std::abs(fd), std::abs(analytic), 1e-3});
          CHECK(std::abs(fd - analytic) / scale < 1e-4);
        }
      }
      for (int r = 0; r < net.biases[layer].size(); ++r) {
        const double saved = net.biases[layer][r];
        net.biases[layer][r] = saved + h;
        const double up = batch_loss(net, batch);
        net.biases[layer][r] = saved - h;
        const double down = batch_loss(net, batch);
        net.biases[layer][r] = saved;
        const double fd = (up - down) / (2.0 * h);
        const double analytic = grads.bias_grads[layer][r];
        const double scale = std::max({std::abs(fd), std::abs(analytic), 1e-3});
        CHECK(std::abs(fd - analytic) / scale < 1e-4);
      }
    }
  }
}

TEST_CASE("input gradient matches central finite differences") {
  const QNetwork net = random_net({4, 6, 2}, Activation::kTanh, 31);
  Rng rng(32);
  Vector obs = Vector::NullaryExpr(4, [&](Eigen::Index) { return rng.uniform(-0.5, 0.5); });
  const int target = 1;
  const Vector grad = input_gradient(net, obs, target);
  const auto loss_at = [&](const Vector& x) {
    const Vector q = net.forward(x);
    // cross-entropy of softmax(q) against the one-hot target
    const double zmax = q.maxCoeff();
    const double log_sum = std::log((q.array() - zmax).exp().sum()) + zmax;
    return log_sum - q[target];
  };
  const double h = 1e-6;
  for (int i = 0; i < 4; ++i) {
    Vector up = obs, down = obs;
    up[i] += h;
    down[i] -= h;
    const double fd = (loss_at(up) - loss_at(down)) / (2.0 * h);
    const double scale = std::max({std::abs(fd), std::abs(grad[i]), 1e-3});
    CHECK(std::abs(fd - grad[i]) / scale < 1e-4);
  }
  CHECK_THROWS(input_gradient(net, obs, 5));
}

TEST_CASE("loss is the weighted mean huber of the residuals") {
  // Zero weights leave Q(s, a) = output bias, so the residual is exact.
  QNetwork net = random_net({4, 2, 2}, Activation::kTanh, 41);
  for (auto& w : net.weights) w.setZero();
  for (auto& b : net.biases) b.setZero();
  net.biases.back() << 0.4, -0.3;
  std::vector<BatchEntry> batch(2);
  batch[0].observation = Vector::Zero(4);
  batch[0].action = 0;
  batch[0].td_target = 0.0;   // residual 0.4 -> huber 0.08
  batch[0].weight = 1.0;
  batch[1].observation = Vector::Ones(4);
  batch[1].action = 1;
  batch[1].td_target = 1.7;   // residual -2.0 -> huber 1.5
  batch[1].weight = 0.5;
  const Gradients grads = loss_and_gradients(net, batch);
  CHECK(grads.loss == doctest::Approx((1.0 * 0.08 + 0.5 * 1.5) / 2.0).epsilon(1e-12));
  CHECK(grads.td_errors[0] == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(grads.td_errors[1] == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK_THROWS(loss_and_gradients(net, {}));
}

TEST_CASE("the first optimizer step moves a parameter by roughly lr * sign(grad)") {
  // m-hat = g, v-hat = g^2 after one step, so the update is lr * g / (|g| + eps).
  QNetwork net = random_net({4, 2, 2}, Activation::kTanh, 51);
  for (auto& w : net.weights) w.setZero();
  for (auto& b : net.biases) b.setZero();
  Adam adam = Adam::for_network(net, 1e-2);
  std::vector<BatchEntry> batch(1);
  batch[0].observation = Vector::Zero(4);
  batch[0].action = 0;
  batch[0].td_target = -0.5;  // residual +0.5 -> d loss / d bias = +0.5
  const Gradients grads = loss_and_gradients(net, batch);
  REQUIRE(grads.bias_grads.back()[0] == doctest::Approx(0.5).epsilon(1e-12));
  adam.step(net, grads);
  CHECK(adam.step_count == 1);
  CHECK(net.biases.back()[0] == doctest::Approx(-1e-2).epsilon(1e-6));
  CHECK(net.biases.back()[1] == 0.0);  // untouched action
}

TEST_CASE("repeated optimizer steps fit a fixed target") {
  QNetwork net = random_net({4, 8, 2}, Activation::kTanh, 61);
  Adam adam = Adam::for_network(net, 3e-3);
  Rng rng(62);
  std::vector<BatchEntry> batch;
  for (int i = 0; i < 8; ++i) {
    BatchEntry e;
    e.observation = Vector::NullaryExpr(4, [&](Eigen::Index) { return rng.uniform(-1.0, 1.0); });
    e.action = static_cast<int>(rng.uniform_int(2));
    e.td_target = 1.0;
    batch.push_back(e);
  }
  const double before = batch_loss(net, batch);
  for (int i = 0; i < 500; ++i) adam.step(net, loss_and_gradients(net, batch));
  const double after = batch_loss(net, batch);
  CHECK(after < before * 0.05);
}

TEST_CASE("checkpoints round-trip bit for bit") {
  const QNetwork net = random_net({4, 7, 5, 2}, Activation::kTanh, 71);
  const auto path = std::filesystem::temp_directory_path() / "agelab_test_net.ageq";
  save_checkpoint(net, path);
  const QNetwork loaded = load_checkpoint(path);
  REQUIRE(loaded.layer_dims == net.layer_dims);
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    CHECK((loaded.weights[l].array() == net.weights[l].array()).all());
    CHECK((loaded.biases[l].array() == net.biases[l].array()).all());
  }
  std::filesystem::remove(path);
}

TEST_CASE("corrupt checkpoints raise typed errors") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto bad_magic = dir / "agelab_bad_magic.ageq";
  {
    std::ofstream out(bad_magic, std::ios::binary);
    out << "NOPE" << std::string(64, '\0');
  }
  CHECK_THROWS_AS(load_checkpoint(bad_magic), BadMagicError);
  std::filesystem::remove(bad_magic);

  const QNetwork net = random_net({4, 3, 2}, Activation::kTanh, 72);
  const auto truncated = dir / "agelab_truncated.ageq";
  save_checkpoint(net, truncated);
  const auto size = std::filesystem::file_size(truncated);
  std::filesystem::resize_file(truncated, size - 9);
  CHECK_THROWS_AS(load_checkpoint(truncated), TruncatedFileError);
  std::filesystem::remove(truncated);
}
