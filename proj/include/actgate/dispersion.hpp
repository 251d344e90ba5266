#pragma once

#include <array>
#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>

#include "actgate/errors.hpp"
#include "actgate/types.hpp"

namespace actgate {

/// One-pass dispersion statistics for a single feature: Welford mean and
/// sum of squared deviations, sum of squared successive differences, and
/// sum of squares for the RMS normalizer.
template <typename Scalar>
class DispersionAccumulator {
 public:
  void update(Scalar x) {
    if (n_ > 0) {
      const Scalar d = x - prev_;
      ssd_sum_ += d * d;
    }
    ++n_;
    const Scalar delta = x - mu_;
    mu_ += delta / Scalar(n_);
    m2_ += delta * (x - mu_);
    sq_sum_ += x * x;
    prev_ = x;
  }

  std::int64_t count() const { return n_; }
  Scalar mean() const { return mu_; }

  /// Sample variance M2/(n-1). No variance is associated with a single
  /// observation.
  Scalar variance() const {
    require_two("variance");
    return m2_ / Scalar(n_ - 1);
  }

  /// Mean of squared successive differences, sum/(n).
  Scalar mssd() const {
    require_two("mssd");
    return ssd_sum_ / Scalar(n_);
  }

  Scalar rms_squared() const { return n_ > 0 ? sq_sum_ / Scalar(n_) : Scalar(0); }

  void reset() { *this = DispersionAccumulator{}; }

 private:
  void require_two(const char* what) const {
    if (n_ < 2) throw InsufficientDataError{std::string(what) + " needs at least 2 samples"};
  }

  std::int64_t n_{0};
  Scalar mu_{0};
  Scalar m2_{0};
  Scalar prev_{0};
  Scalar ssd_sum_{0};
  Scalar sq_sum_{0};
};

/// Score of one feature for template selection: high sustained amplitude
/// (variance) against low short-term variability (MSSD), both normalized
/// by the squared RMS so dynamic range cancels out.
template <typename Scalar>
struct FeatureScore {
  int feature{0};
  Scalar normalized_variance{0};
  Scalar normalized_mssd{0};
  Scalar score{0};
};

template <typename Scalar>
FeatureScore<Scalar> score_feature(const DispersionAccumulator<Scalar>& acc, int index,
                                   Scalar epsilon = Scalar(1e-12)) {
  FeatureScore<Scalar> s;
  s.feature = index;
  const Scalar rms2 = acc.rms_squared();
  if (!(rms2 > Scalar(0))) {
    // An identically-zero feature carries no information; never select it.
    s.score = -std::numeric_limits<Scalar>::infinity();
    return s;
  }
  s.normalized_variance = acc.variance() / rms2;
  s.normalized_mssd = acc.mssd() / rms2;
  s.score = s.normalized_variance / (s.normalized_mssd + epsilon);
  return s;
}

/// Feature indices ordered best-first by score; ties break toward the
/// lower index so the ranking is a deterministic total order.
template <typename Scalar>
std::array<int, kFeatureCount> rank_features(
    const std::array<DispersionAccumulator<Scalar>, kFeatureCount>& accs,
    Scalar epsilon = Scalar(1e-12)) {
  std::array<Scalar, kFeatureCount> scores;
  for (int i = 0; i < kFeatureCount; ++i) scores[i] = score_feature(accs[i], i, epsilon).score;
  std::array<int, kFeatureCount> order;
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  return order;
}

}  // namespace actgate
