#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "actgate/activity_template.hpp"
#include "actgate/dispersion.hpp"
#include "actgate/features.hpp"
#include "actgate/types.hpp"

namespace actgate {

template <typename Scalar>
struct GateConfig {
  int window_samples{78};   // W = round(window seconds * sample rate)
  int hop_samples{39};      // 50% overlap
  Scalar ncc_threshold{Scalar(0.5)};
  FeatureParams<Scalar> features{};
  // Alternative re-reference strategy: reuse the window that triggered the
  // detection as the new reference instead of collecting W fresh samples.
  bool rebuild_from_trigger_window{false};

  static GateConfig for_sample_rate(Scalar rate_hz, Scalar window_seconds = Scalar(3),
                                    Scalar overlap = Scalar(0.5)) {
    GateConfig c;
    c.window_samples = int(std::lround(window_seconds * rate_hz));
    c.hop_samples = std::max(1, int(std::lround(c.window_samples * (Scalar(1) - overlap))));
    return c;
  }

  void validate() const {
    if (window_samples < 4) throw std::invalid_argument{"window_samples must be >= 4"};
    if (hop_samples < 1 || hop_samples > window_samples)
      throw std::invalid_argument{"hop_samples must be in [1, window_samples]"};
    if (!(ncc_threshold > Scalar(-1) && ncc_threshold < Scalar(1)))
      throw std::invalid_argument{"ncc_threshold must lie in (-1, 1)"};
    if (!(features.gamma_mc > Scalar(0) && features.gamma_mc <= Scalar(1)) ||
        !(features.gamma_p2p > Scalar(0) && features.gamma_p2p <= Scalar(1)))
      throw std::invalid_argument{"decay factors must lie in (0, 1]"};
    if (features.hysteresis_fraction < Scalar(0))
      throw std::invalid_argument{"hysteresis_fraction must be >= 0"};
  }
};

/// One per-window decision. `window_index` is the position on the global
/// W/hop sliding grid, derived from the end sample; reference-building
/// windows report no ncc and never a transition. After a transition the
/// next verdict arrives W samples later, so one grid slot is skipped.
template <typename Scalar>
struct WindowVerdict {
  std::int64_t window_index{0};
  std::int64_t end_sample{0};
  std::optional<Scalar> ncc{};
  bool transition{false};
  int f1{-1};
  int f2{-1};
};

/// Streaming change gate: build a reference template from the first window,
/// then at every hop compare the current window's template against it and
/// re-reference when the correlation falls below the threshold.
///
/// Feed samples one at a time; a verdict is returned at window boundaries.
/// Results are independent of how the stream is chunked around step calls.
template <typename Scalar>
class ChangeGate {
 public:
  enum class Phase { kBuildingReference, kMonitoring };

  /// manual_control disables automatic re-referencing: verdicts still carry
  /// ncc values but transitions must be injected via force_transition().
  /// The calibration collector runs the gate this way.
  explicit ChangeGate(GateConfig<Scalar> config, bool manual_control = false)
      : cfg_(validated(std::move(config))), manual_(manual_control),
        extractor_(cfg_.features), ring_(std::size_t(cfg_.window_samples)) {}

  std::optional<WindowVerdict<Scalar>> step(const Sample<Scalar>& s) {
    const FeatureVector<Scalar> f = extractor_.extract(s);
    ring_[std::size_t(ring_pos_)] = f;
    ring_pos_ = (ring_pos_ + 1) % cfg_.window_samples;
    ++consumed_;
    ++in_phase_;

    if (phase_ == Phase::kBuildingReference) {
      for (int i = 0; i < kFeatureCount; ++i) disp_[std::size_t(i)].update(f[i]);
      if (in_phase_ == cfg_.window_samples) return finish_reference();
      return std::nullopt;
    }
    if (in_phase_ == cfg_.hop_samples) {
      in_phase_ = 0;
      return monitor();
    }
    return std::nullopt;
  }

  /// Treat the current activity as changed: restart the running statistics
  /// and rebuild the reference from the next W samples.
  void force_transition() { begin_rebuild(); }

  Phase phase() const { return phase_; }
  std::pair<int, int> selected_features() const { return {f1_, f2_}; }
  const ActivityTemplate<Scalar>& reference() const { return reference_; }
  const BinBounds<Scalar>& bounds() const { return bounds_; }
  std::int64_t samples_consumed() const { return consumed_; }

 private:
  static GateConfig<Scalar> validated(GateConfig<Scalar> c) {
    c.validate();
    return c;
  }

  std::int64_t grid_index(std::int64_t end_sample) const {
    return std::int64_t(std::llround(double(end_sample + 1 - cfg_.window_samples) /
                                     double(cfg_.hop_samples)));
  }

  void begin_rebuild() {
    for (auto& d : disp_) d.reset();
    extractor_.reset();
    phase_ = Phase::kBuildingReference;
    in_phase_ = 0;
  }

  // Rank features over the dispersion stats, freeze the bin bounds from
  // this window's extrema and turn the window into the reference template.
  void adopt_reference() {
    const auto order = rank_features(disp_);
    f1_ = order[0];
    f2_ = order[1];
    bounds_.f1 = window_range(f1_);
    bounds_.f2 = window_range(f2_);
    reference_ = window_template();
  }

  WindowVerdict<Scalar> finish_reference() {
    adopt_reference();
    WindowVerdict<Scalar> v;
    v.window_index = grid_index(consumed_ - 1);
    v.end_sample = consumed_ - 1;
    v.transition = false;
    v.f1 = f1_;
    v.f2 = f2_;
    phase_ = Phase::kMonitoring;
    in_phase_ = 0;
    return v;
  }

  WindowVerdict<Scalar> monitor() {
    const ActivityTemplate<Scalar> current = window_template();
    const Scalar similarity = gate_similarity(current, reference_);
    WindowVerdict<Scalar> v;
    v.window_index = grid_index(consumed_ - 1);
    v.end_sample = consumed_ - 1;
    v.ncc = similarity;
    v.transition = !manual_ && similarity < cfg_.ncc_threshold;
    v.f1 = f1_;
    v.f2 = f2_;
    if (v.transition) {
      if (cfg_.rebuild_from_trigger_window) {
        // Re-reference in place from the triggering window; running
        // statistics keep their history and monitoring continues.
        for (auto& d : disp_) d.reset();
        for (const auto& fv : ring_)
          for (int i = 0; i < kFeatureCount; ++i) disp_[std::size_t(i)].update(fv[i]);
        adopt_reference();
      } else {
        begin_rebuild();
      }
    }
    return v;
  }

  FeatureRange<Scalar> window_range(int feature) const {
    FeatureRange<Scalar> r{ring_.front()[feature], ring_.front()[feature]};
    for (const auto& fv : ring_) {
      r.lo = std::min(r.lo, fv[feature]);
      r.hi = std::max(r.hi, fv[feature]);
    }
    return r;
  }

  // The histogram is permutation-invariant, so the ring buffer can be
  // consumed in storage order.
  ActivityTemplate<Scalar> window_template() const {
    std::vector<std::array<Scalar, 2>> pairs;
    pairs.reserve(ring_.size());
    for (const auto& fv : ring_)
      pairs.push_back({normalize_feature(fv[f1_], bounds_.f1),
                       normalize_feature(fv[f2_], bounds_.f2)});
    return ActivityTemplate<Scalar>::build(pairs);
  }

  GateConfig<Scalar> cfg_;
  bool manual_{false};
  FeatureExtractor<Scalar> extractor_;
  std::array<DispersionAccumulator<Scalar>, kFeatureCount> disp_{};
  std::vector<FeatureVector<Scalar>> ring_;
  int ring_pos_{0};
  Phase phase_{Phase::kBuildingReference};
  int in_phase_{0};
  std::int64_t consumed_{0};
  int f1_{-1};
  int f2_{-1};
  BinBounds<Scalar> bounds_{};
  ActivityTemplate<Scalar> reference_{};
};

// ---------------------------------------------------------------------------
// Static cost model.
//
// Counting convention: every floating add/sub, mul, div, sqrt and trig call
// is one FLOP; comparisons, abs and integer work are free. One "step" is a
// full pass over a window of W samples through all four phases: (A) feature
// extraction, (B) dispersion updates plus scoring, (C) histogram build,
// (D) template comparison.
// ---------------------------------------------------------------------------

struct FlopCounts {
  std::int64_t feature_extraction{0};
  std::int64_t dispersion{0};
  std::int64_t template_build{0};
  std::int64_t comparison{0};
  std::int64_t total() const {
    return feature_extraction + dispersion + template_build + comparison;
  }
};

inline FlopCounts flops_per_step(int window_samples) {
  constexpr std::int64_t norm = 6;           // 3 mul + 2 add + sqrt, twice per sample
  constexpr std::int64_t derivatives = 3;    // three first differences
  constexpr std::int64_t gravity = 15;       // norm + div + 2 inverse trig + 4 trig + 2 mul
  constexpr std::int64_t mean_crossing = 13; // mean/var queries, hysteresis band, accumulate, moment update
  constexpr std::int64_t peak_to_peak = 11;  // mean query, two decays, spread, moment update
  constexpr std::int64_t per_sample_a =
      2 * norm + derivatives + gravity + 2 * mean_crossing + 2 * peak_to_peak;  // 78

  constexpr std::int64_t welford_update = 11;  // delta, mean, M2, ssd, sq_sum
  constexpr std::int64_t per_feature_score = 7;  // var, mssd, rms2, two normalizations, score

  constexpr std::int64_t per_pair_bin = 6;   // two rescales + two bin scalings
  constexpr std::int64_t grid_normalize = 100 + 2;

  constexpr std::int64_t ncc_means = 2 * 100;
  constexpr std::int64_t ncc_accumulate = 100 * 8;  // two deviations, products, squares
  constexpr std::int64_t ncc_final = 4;             // two sqrt, mul, div

  const std::int64_t w = window_samples;
  FlopCounts c;
  c.feature_extraction = per_sample_a * w;
  c.dispersion = welford_update * kFeatureCount * w + per_feature_score * kFeatureCount;
  c.template_build = per_pair_bin * w + grid_normalize;
  c.comparison = ncc_means + ncc_accumulate + ncc_final;
  return c;
}

template <typename Scalar>
FlopCounts flops_per_step(const GateConfig<Scalar>& cfg) {
  return flops_per_step(cfg.window_samples);
}

/// Memory needed by one gate instance under a 4-byte-scalar deployment
/// convention (counters included at 4 bytes as well).
struct StateFootprint {
  std::int64_t ring_bytes{0};        // W feature vectors
  std::int64_t extractor_bytes{0};   // recursions' running state
  std::int64_t dispersion_bytes{0};  // 12 accumulators
  std::int64_t template_bytes{0};    // reference + current grids, bounds
  std::int64_t misc_bytes{0};        // threshold, counters, selected pair
  std::int64_t total() const {
    return ring_bytes + extractor_bytes + dispersion_bytes + template_bytes + misc_bytes;
  }
};

inline StateFootprint state_footprint(int window_samples) {
  if (window_samples < 1) throw std::invalid_argument{"window_samples must be >= 1"};
  constexpr std::int64_t slot = 4;
  StateFootprint f;
  f.ring_bytes = slot * kFeatureCount * window_samples;
  // 3 differencer prevs + 3 gravity + 2 mean-crossing channels of
  // (sum, sq_sum, prev, mc) + 2 peak channels of (sum, sq_sum, max, min),
  // plus five counters.
  f.extractor_bytes = slot * (3 + 3 + 2 * 4 + 2 * 4 + 5);
  f.dispersion_bytes = slot * kFeatureCount * 6;  // mu, M2, prev, ssd, sq_sum, count
  f.template_bytes = slot * (2 * 100 + 2 + 4);    // two grids, their counts, bin bounds
  f.misc_bytes = slot * 9;  // threshold, gammas, hysteresis, pair, phase counters
  return f;
}

inline std::int64_t state_size_bytes(int window_samples) {
  return state_footprint(window_samples).total();
}

template <typename Scalar>
std::int64_t state_size_bytes(const GateConfig<Scalar>& cfg) {
  return state_size_bytes(cfg.window_samples);
}

}  // namespace actgate
