#include "agelab/replay.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace agelab::replay {

ReplayBuffer::ReplayBuffer(std::size_t capacity, double alpha)
    : capacity_(capacity), alpha_(alpha) {
  if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
  storage_.resize(capacity);
  raw_priority_.assign(capacity, 0.0);
  tree_leaves_ = 1;
  while (tree_leaves_ < capacity_) tree_leaves_ <<= 1;
  sum_tree_.assign(2 * tree_leaves_, 0.0);
  max_tree_.assign(2 * tree_leaves_, 0.0);
}

void ReplayBuffer::set_priority(std::size_t slot, double raw_priority) {
  raw_priority_[slot] = raw_priority;
  std::size_t node = tree_leaves_ + slot;
  sum_tree_[node] = std::pow(raw_priority, alpha_);
  max_tree_[node] = raw_priority;
  while (node > 1) {
    node >>= 1;
    sum_tree_[node] = sum_tree_[2 * node] + sum_tree_[2 * node + 1];
    max_tree_[node] = std::max(max_tree_[2 * node], max_tree_[2 * node + 1]);
  }
}

double ReplayBuffer::max_priority() const {
  return size_ == 0 ? 1.0 : max_tree_[1];
}

void ReplayBuffer::push(const Experience& experience) {
  const std::size_t slot = slot_of(push_count_);
  const double fresh_priority = max_priority();
  if (size_ == capacity_) {
    if (storage_[slot].perturbed) --perturbed_count_;
  } else {
    ++size_;
  }
  storage_[slot] = experience;
  if (experience.perturbed) ++perturbed_count_;
  set_priority(slot, fresh_priority);
  ++push_count_;
}

std::vector<Sample> ReplayBuffer::sample_uniform(std::size_t batch_size, Rng& rng) const {
  if (empty()) throw std::invalid_argument("ReplayBuffer: cannot sample from empty buffer");
  std::vector<Sample> out;
  out.reserve(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) {
    const std::uint64_t id = first_live_id() + rng.uniform_int(size_);
    out.push_back(Sample{id, storage_[slot_of(id)], 1.0});
  }
  return out;
}

std::size_t ReplayBuffer::sample_leaf(double mass) const {
  std::size_t node = 1;
  while (node < tree_leaves_) {
    const std::size_t left = 2 * node;
    if (mass < sum_tree_[left] || sum_tree_[left + 1] <= 0.0) {
      node = left;
    } else {
      mass -= sum_tree_[left];
      node = left + 1;
    }
  }
  return node - tree_leaves_;
}

std::vector<Sample> ReplayBuffer::sample_prioritized(std::size_t batch_size, double beta,
                                                     Rng& rng) const {
  if (empty()) throw std::invalid_argument("ReplayBuffer: cannot sample from empty buffer");
  const double total = sum_tree_[1];
  if (total <= 0.0) return sample_uniform(batch_size, rng);

  std::vector<Sample> out;
  out.reserve(batch_size);
  double max_weight = 0.0;
  for (std::size_t i = 0; i < batch_size; ++i) {
    const std::size_t slot = sample_leaf(rng.uniform() * total);
    // slot -> live id (every live slot satisfies this uniquely)
    const std::uint64_t base = first_live_id();
    std::uint64_t id = base - (base % capacity_) + slot;
    if (id < base) id += capacity_;
    const double prob = sum_tree_[tree_leaves_ + slot] / total;
    const double weight = std::pow(static_cast<double>(size_) * prob, -beta);
    max_weight = std::max(max_weight, weight);
    out.push_back(Sample{id, storage_[slot], weight});
  }
  for (auto& sample : out) sample.importance_weight /= max_weight;
  return out;
}

void ReplayBuffer::update_priorities(std::span<const std::uint64_t> ids,
                                     std::span<const double> td_errors) {
  if (ids.size() != td_errors.size()) {
    throw std::invalid_argument("update_priorities: ids/td_errors size mismatch");
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!contains_id(ids[i])) {
      ++stale_update_count_;
      continue;
    }
    set_priority(slot_of(ids[i]), std::abs(td_errors[i]) + kPriorityFloor);
  }
}

std::pair<double, double> ReplayBuffer::composition() const {
  if (size_ == 0) return {0.0, 0.0};
  const double perturbed = static_cast<double>(perturbed_count_) / static_cast<double>(size_);
  return {1.0 - perturbed, perturbed};
}

std::uint64_t ReplayBuffer::count_pushed_before(std::uint64_t id) const {
  const std::uint64_t first = first_live_id();
  if (id <= first) return 0;
  return std::min<std::uint64_t>(id - first, size_);
}

bool ReplayBuffer::contains_id(std::uint64_t id) const {
  return id >= first_live_id() && id < push_count_;
}

const Experience& ReplayBuffer::at_id(std::uint64_t id) const {
  if (!contains_id(id)) throw std::out_of_range("ReplayBuffer::at_id: stale or unknown id");
  return storage_[slot_of(id)];
}

double ReplayBuffer::priority_tree_root() const { return sum_tree_[1]; }

double ReplayBuffer::priority_leaf_sum() const {
  double total = 0.0;
  for (std::size_t slot = 0; slot < capacity_; ++slot) {
    total += sum_tree_[tree_leaves_ + slot];
  }
  return total;
}

}  // namespace agelab::replay
