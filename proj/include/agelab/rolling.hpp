#pragma once

#include <cstddef>
#include <deque>
#include <limits>

namespace agelab {

// Mean over the trailing `window` values; NaN until the window fills.
class RollingMean {
 public:
  explicit RollingMean(int window) : window_(static_cast<std::size_t>(window)) {}

  void push(double value) {
    values_.push_back(value);
    sum_ += value;
    if (values_.size() > window_) {
      sum_ -= values_.front();
      values_.pop_front();
    }
  }

  bool full() const { return values_.size() == window_; }
  double mean() const {
    return full() ? sum_ / static_cast<double>(window_)
                  : std::numeric_limits<double>::quiet_NaN();
  }

 private:
  std::size_t window_;
  std::deque<double> values_;
  double sum_ = 0.0;
};

}  // namespace agelab
