#pragma once

#include <algorithm>
#include <cstdint>

namespace actgate {

/// Cumulative mean and population variance of a single channel, kept as
/// plain running sums (avg = sum/n, var = sq_sum/n - avg^2). This is the
/// cheap per-sample form used inside the feature recursions; the
/// numerically careful Welford form lives in DispersionAccumulator.
template <typename Scalar>
class RunningMoments {
 public:
  void add(Scalar x) {
    sum_ += x;
    sq_sum_ += x * x;
    ++n_;
  }

  std::int64_t count() const { return n_; }

  Scalar mean() const { return n_ > 0 ? sum_ / Scalar(n_) : Scalar(0); }

  Scalar variance() const {
    if (n_ == 0) return Scalar(0);
    const Scalar m = mean();
    return std::max(Scalar(0), sq_sum_ / Scalar(n_) - m * m);
  }

  void reset() { *this = RunningMoments{}; }

 private:
  std::int64_t n_{0};
  Scalar sum_{0};
  Scalar sq_sum_{0};
};

}  // namespace actgate
