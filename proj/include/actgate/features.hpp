#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <type_traits>

#include "actgate/running_moments.hpp"
#include "actgate/types.hpp"

namespace actgate {

template <typename Scalar>
Scalar euclidean_norm(const Vec3<Scalar>& v) {
  return v.norm();
}

/// Gravity direction estimated from one accelerometer reading via roll
/// (atan2(ay, az)) and pitch (asin(ax/|a|)) Euler angles. Returns a unit
/// vector, or nullopt for a zero-norm reading (the caller substitutes the
/// previous estimate).
template <typename Scalar>
std::optional<Vec3<Scalar>> gravity_components(const Vec3<Scalar>& a) {
  const Scalar n = a.norm();
  if (!(n > Scalar(0))) return std::nullopt;
  const Scalar roll = std::atan2(a.y(), a.z());
  const Scalar pitch = std::asin(std::clamp(a.x() / n, Scalar(-1), Scalar(1)));
  const Scalar cp = std::cos(pitch);
  return Vec3<Scalar>{std::sin(pitch), cp * std::sin(roll), cp * std::cos(roll)};
}

/// Per-sample tuning of the recursive features. Defaults are the tuned
/// decay constants; the hysteresis band is a fraction of the channel's
/// running standard deviation with a small absolute floor.
template <typename Scalar>
struct FeatureParams {
  Scalar gamma_mc{Scalar(0.8)};
  Scalar gamma_p2p{Scalar(0.7)};
  Scalar hysteresis_fraction{Scalar(0.1)};
  Scalar hysteresis_floor{Scalar(1e-6)};
};

template <typename Scalar>
struct DifferencerState {
  Scalar prev{0};
  bool primed{false};
};

/// u[i] - u[i-1]; zero for the first sample of a stream.
template <typename Scalar>
Scalar derivative_update(DifferencerState<Scalar>& s, Scalar u) {
  const Scalar d = s.primed ? u - s.prev : Scalar(0);
  s.prev = u;
  s.primed = true;
  return d;
}

template <typename Scalar>
struct MeanCrossingState {
  RunningMoments<Scalar> moments;
  Scalar prev{0};
  Scalar mc{0};
};

/// Hysteretic mean-crossing accumulator. A crossing requires the previous
/// sample on one side of the running mean beyond the hysteresis band and
/// the current one beyond the opposite side; it adds |u - avg| to the
/// accumulator, any other sample decays it by gamma. The running mean and
/// band are the ones from before this sample.
template <typename Scalar>
Scalar mean_crossing_update(MeanCrossingState<Scalar>& s, Scalar u,
                            const FeatureParams<Scalar>& p) {
  if (s.moments.count() > 0) {
    const Scalar avg = s.moments.mean();
    const Scalar hyst = std::max(
        p.hysteresis_floor, p.hysteresis_fraction * std::sqrt(s.moments.variance()));
    const bool up = s.prev < avg - hyst && u >= avg + hyst;
    const bool down = s.prev > avg + hyst && u <= avg - hyst;
    s.mc = (up || down) ? s.mc + std::abs(u - avg) : s.mc * p.gamma_mc;
  }
  s.moments.add(u);
  s.prev = u;
  return s.mc;
}

template <typename Scalar>
struct PeakToPeakState {
  RunningMoments<Scalar> moments;
  Scalar max{0};
  Scalar min{0};
  bool seeded{false};
};

/// Recursive peak-to-peak amplitude: extrema are adopted outright and
/// otherwise decay toward the running mean by gamma, so the spread tracks
/// the recent signal rather than the whole history. Non-negative for
/// gamma >= 0.5.
template <typename Scalar>
Scalar peak_to_peak_update(PeakToPeakState<Scalar>& s, Scalar u,
                           const FeatureParams<Scalar>& p) {
  if (!s.seeded) {
    s.max = s.min = u;
    s.seeded = true;
    s.moments.add(u);
    return Scalar(0);
  }
  const Scalar avg = s.moments.mean();
  s.max = u > s.max ? u : avg + p.gamma_p2p * (s.max - avg);
  s.min = u < s.min ? u : avg - p.gamma_p2p * (avg - s.min);
  s.moments.add(u);
  return s.max - s.min;
}

/// Streaming extractor for the 12-feature vector. Every feature is a pure
/// sample-wise recursion: no raw data is buffered and the state size is a
/// compile-time constant independent of stream length.
template <typename Scalar>
class FeatureExtractor {
 public:
  FeatureExtractor() = default;
  explicit FeatureExtractor(FeatureParams<Scalar> params) : params_(params) {}

  FeatureVector<Scalar> extract(const Sample<Scalar>& s) {
    FeatureVector<Scalar> f;
    const Scalar norm_a = s.acc.norm();
    const Scalar norm_w = s.gyro.norm();
    f[kNormA] = norm_a;
    f[kNormW] = norm_w;
    f[kDerAx] = derivative_update(d_ax_, s.acc.x());
    f[kDerWy] = derivative_update(d_wy_, s.gyro.y());
    f[kDerNormW] = derivative_update(d_nw_, norm_w);
    if (auto g = gravity_components(s.acc)) gravity_ = *g;
    f[kGravX] = gravity_.x();
    f[kGravY] = gravity_.y();
    f[kGravZ] = gravity_.z();
    f[kMcWx] = mean_crossing_update(mc_wx_, s.gyro.x(), params_);
    f[kMcWy] = mean_crossing_update(mc_wy_, s.gyro.y(), params_);
    f[kP2pNormA] = peak_to_peak_update(p2p_na_, norm_a, params_);
    f[kP2pWx] = peak_to_peak_update(p2p_wx_, s.gyro.x(), params_);
    ++samples_seen_;
    return f;
  }

  /// Full restart: derivative history, running means/variances, extrema and
  /// crossing accumulators all reset, as after a detected transition.
  void reset() {
    const FeatureParams<Scalar> p = params_;
    *this = FeatureExtractor{p};
  }

  std::int64_t samples_seen() const { return samples_seen_; }
  const FeatureParams<Scalar>& params() const { return params_; }

  static constexpr std::size_t state_bytes() { return sizeof(FeatureExtractor); }

 private:
  FeatureParams<Scalar> params_{};
  DifferencerState<Scalar> d_ax_{};
  DifferencerState<Scalar> d_wy_{};
  DifferencerState<Scalar> d_nw_{};
  Vec3<Scalar> gravity_{Scalar(0), Scalar(0), Scalar(1)};
  MeanCrossingState<Scalar> mc_wx_{};
  MeanCrossingState<Scalar> mc_wy_{};
  PeakToPeakState<Scalar> p2p_na_{};
  PeakToPeakState<Scalar> p2p_wx_{};
  std::int64_t samples_seen_{0};
};

static_assert(std::is_standard_layout_v<FeatureExtractor<float>> &&
                  sizeof(FeatureExtractor<float>) < 256,
              "extractor state must stay flat (no heap, bounded size)");

}  // namespace actgate
