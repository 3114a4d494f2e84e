#pragma once

#include <cmath>
#include <cstddef>
#include <functional>

namespace gdl {

/// Number of hardware threads (at least 1).
std::size_t default_workers();

/// Runs body(i) for i in [0, count) on up to `workers` threads (0 = default_workers()).
/// Indices are claimed dynamically; the caller must make body(i) write only to slot i.
/// If any call throws, the exception from the smallest failing index is rethrown after
/// all threads have joined.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& body);

/// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    comp_ += std::abs(sum_) >= std::abs(v) ? (sum_ - t) + v : (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace gdl
