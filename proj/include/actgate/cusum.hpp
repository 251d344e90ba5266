#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "actgate/gate.hpp"
#include "actgate/running_moments.hpp"
#include "actgate/types.hpp"

namespace actgate {

/// Which scalar stream the detector monitors.
enum class CusumSignal { kAccelNorm, kGyroNorm };

template <typename Scalar>
struct CusumConfig {
  Scalar sensitivity{Scalar(3)};   // k, per-sample drift allowance in z units
  int warmup_samples{26};          // 1 s at 26 Hz; scale with the sample rate
  Scalar threshold{Scalar(0.3)};   // h, on the standardized cumulative sums
  CusumSignal signal{CusumSignal::kAccelNorm};

  void validate() const {
    if (!(sensitivity > Scalar(0))) throw std::invalid_argument{"sensitivity must be > 0"};
    if (warmup_samples < 2) throw std::invalid_argument{"warmup_samples must be >= 2"};
    if (!(threshold > Scalar(0))) throw std::invalid_argument{"threshold must be > 0"};
  }
};

/// Two-sided CUSUM on a standardized scalar stream. The warm-up window
/// estimates the in-control mean and deviation; afterwards the positive
/// and negative sums accumulate standardized excess beyond the
/// sensitivity, and crossing the threshold flags a change and restarts
/// the warm-up on the new regime.
template <typename Scalar>
class CusumDetector {
 public:
  explicit CusumDetector(CusumConfig<Scalar> config) : cfg_(config) { cfg_.validate(); }

  bool step(Scalar x) {
    if (!warm_) {
      baseline_.add(x);
      if (baseline_.count() == cfg_.warmup_samples) {
        mu0_ = baseline_.mean();
        sigma0_ = std::max(std::sqrt(baseline_.variance()), Scalar(1e-6));
        warm_ = true;
      }
      return false;
    }
    const Scalar z = (x - mu0_) / sigma0_;
    s_pos_ = std::max(Scalar(0), s_pos_ + z - cfg_.sensitivity);
    s_neg_ = std::max(Scalar(0), s_neg_ - z - cfg_.sensitivity);
    if (s_pos_ > cfg_.threshold || s_neg_ > cfg_.threshold) {
      restart();
      return true;
    }
    return false;
  }

  bool in_warmup() const { return !warm_; }
  Scalar s_pos() const { return s_pos_; }
  Scalar s_neg() const { return s_neg_; }
  Scalar baseline_mean() const { return mu0_; }

 private:
  void restart() {
    baseline_.reset();
    s_pos_ = s_neg_ = Scalar(0);
    warm_ = false;
  }

  CusumConfig<Scalar> cfg_;
  RunningMoments<Scalar> baseline_{};
  Scalar mu0_{0};
  Scalar sigma0_{1};
  Scalar s_pos_{0};
  Scalar s_neg_{0};
  bool warm_{false};
};

/// Window-level adapter so the baseline plugs into the same evaluation as
/// the gate: one verdict per sliding window, transition = true iff any
/// sample-level detection fired inside the window's span. Verdicts carry
/// no ncc and no selected features.
template <typename Scalar>
std::vector<WindowVerdict<Scalar>> run_cusum_windowed(std::span<const Sample<Scalar>> samples,
                                                      const CusumConfig<Scalar>& config,
                                                      int window_samples, int hop_samples) {
  if (window_samples < 1 || hop_samples < 1)
    throw std::invalid_argument{"window and hop must be positive"};
  CusumDetector<Scalar> det(config);
  std::vector<std::int64_t> hits;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Scalar x = config.signal == CusumSignal::kAccelNorm ? samples[i].acc.norm()
                                                              : samples[i].gyro.norm();
    if (det.step(x)) hits.push_back(std::int64_t(i));
  }

  std::vector<WindowVerdict<Scalar>> verdicts;
  const std::int64_t n = std::int64_t(samples.size());
  std::size_t first_hit = 0;
  for (std::int64_t w = 0; w * hop_samples + window_samples <= n; ++w) {
    const std::int64_t begin = w * hop_samples;
    const std::int64_t end = begin + window_samples;  // exclusive
    while (first_hit < hits.size() && hits[first_hit] < begin) ++first_hit;
    bool fired = false;
    for (std::size_t k = first_hit; k < hits.size() && hits[k] < end; ++k) fired = true;
    WindowVerdict<Scalar> v;
    v.window_index = w;
    v.end_sample = end - 1;
    v.transition = fired;
    verdicts.push_back(v);
  }
  return verdicts;
}

}  // namespace actgate
