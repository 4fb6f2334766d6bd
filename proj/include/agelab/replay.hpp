#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "agelab/rng.hpp"

namespace agelab::replay {

// One replay tuple. perturbed = false marks a nominal experience, perturbed =
// true an adversarial one whose state field holds the crafted observation.
struct Experience {
  std::array<double, 4> state{};
  int action = 0;
  double reward = 0.0;
  std::array<double, 4> next_state{};
  bool terminal = false;
  bool perturbed = false;
};

struct Sample {
  std::uint64_t id = 0;  // global insertion id; stale once overwritten
  Experience experience;
  double importance_weight = 1.0;
};

// FIFO ring with uniform and proportional-prioritized sampling. Priorities
// live in a segment tree over priority^alpha; a parallel max tree tracks the
// raw priority assigned to fresh pushes.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity, double alpha = 0.6);

  void push(const Experience& experience);

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return size_ == 0; }
  std::uint64_t push_count() const { return push_count_; }

  // Sampling is with replacement; throws std::invalid_argument when empty.
  std::vector<Sample> sample_uniform(std::size_t batch_size, Rng& rng) const;
  std::vector<Sample> sample_prioritized(std::size_t batch_size, double beta, Rng& rng) const;

  // priority <- |td_error| + 1e-6. Ids pointing at overwritten slots are
  // skipped and counted.
  void update_priorities(std::span<const std::uint64_t> ids,
                         std::span<const double> td_errors);
  std::uint64_t stale_update_count() const { return stale_update_count_; }

  // (nominal_fraction, perturbed_fraction); (0, 0) when empty.
  std::pair<double, double> composition() const;

  // Number of live entries pushed before the given insertion id.
  std::uint64_t count_pushed_before(std::uint64_t id) const;

  const Experience& at_id(std::uint64_t id) const;
  bool contains_id(std::uint64_t id) const;

  double priority_tree_root() const;
  double priority_leaf_sum() const;
  double max_priority() const;  // 1.0 when empty

 private:
  std::size_t slot_of(std::uint64_t id) const { return static_cast<std::size_t>(id % capacity_); }
  std::uint64_t first_live_id() const { return push_count_ - size_; }
  void set_priority(std::size_t slot, double raw_priority);
  std::size_t sample_leaf(double mass) const;

  std::size_t capacity_;
  double alpha_;
  std::size_t size_ = 0;
  std::uint64_t push_count_ = 0;
  std::uint64_t stale_update_count_ = 0;
  std::size_t perturbed_count_ = 0;
  std::vector<Experience> storage_;
  std::vector<double> raw_priority_;
  std::size_t tree_leaves_;      // capacity rounded up to a power of two
  std::vector<double> sum_tree_; // priority^alpha
  std::vector<double> max_tree_; // raw priority
};

inline constexpr double kPriorityFloor = 1e-6;

}  // namespace agelab::replay
