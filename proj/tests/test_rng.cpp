#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "agelab/rng.hpp"

using agelab::Rng;

TEST_CASE("identical seeds give identical streams") {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds give different streams") {
  Rng a(1);
  Rng b(2);
  int same = 0;
  for (int i = 0; i < 64; ++i) same += a.next_u64() == b.next_u64() ? 1 : 0;
  CHECK(same == 0);
}

TEST_CASE("split is label-stable and label-sensitive") {
  const Rng root(7);
  CHECK(root.split("env").state() == root.split("env").state());
  CHECK(root.split("env").state() != root.split("attack").state());
  CHECK(root.split("env").state() != root.state());
  // splitting does not advance the parent
  Rng parent(7);
  const auto before = parent.state();
  (void)parent.split("child");
  CHECK(parent.state() == before);
}

TEST_CASE("uniform stays in the half-open unit interval") {
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("uniform(lo, hi) respects its bounds and mean") {
  Rng rng(4);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform(-2.0, 6.0);
    REQUIRE(u >= -2.0);
    REQUIRE(u < 6.0);
    sum += u;
  }
  // mean 2, stddev 8/sqrt(12); 5 sigma over n draws
  const double tol = 5.0 * (8.0 / std::sqrt(12.0)) / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(sum / n - 2.0) < tol);
}

TEST_CASE("uniform_int covers all residues roughly evenly") {
  Rng rng(5);
  const int n = 60000;
  const std::uint64_t buckets = 6;
  std::vector<int> counts(buckets, 0);
  for (int i = 0; i < n; ++i) {
    const std::uint64_t v = rng.uniform_int(buckets);
    REQUIRE(v < buckets);
    ++counts[static_cast<std::size_t>(v)];
  }
  const double expected = static_cast<double>(n) / buckets;
  const double sigma = std::sqrt(expected * (1.0 - 1.0 / buckets));
  for (const int c : counts) CHECK(std::abs(c - expected) < 5.0 * sigma);
}

TEST_CASE("bernoulli matches its probability") {
  Rng rng(6);
  const int n = 100000;
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += rng.bernoulli(0.3) ? 1 : 0;
  const double sigma = std::sqrt(0.3 * 0.7 * n);
  CHECK(std::abs(hits - 0.3 * n) < 5.0 * sigma);
  Rng edge(7);
  for (int i = 0; i < 1000; ++i) CHECK_FALSE(edge.bernoulli(0.0));
}

TEST_CASE("normal has unit scale and zero center") {
  Rng rng(8);
  const int n = 100000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sum_sq += z * z;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean) < 5.0 / std::sqrt(static_cast<double>(n)));
  // var of sample variance ~ 2/n for the normal
  CHECK(std::abs(var - 1.0) < 5.0 * std::sqrt(2.0 / n));
}

TEST_CASE("substream draws are reproducible after interleaving") {
  Rng root(99);
  Rng env = root.split("env");
  Rng attack = root.split("attack");
  const double e1 = env.uniform();
  const double a1 = attack.uniform();
  Rng env2 = Rng(99).split("env");
  Rng attack2 = Rng(99).split("attack");
  CHECK(env2.uniform() == e1);
  CHECK(attack2.uniform() == a1);
}
