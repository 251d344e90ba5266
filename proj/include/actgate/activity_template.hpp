#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>

#include "actgate/errors.hpp"

namespace actgate {

/// Window-wise extrema of one feature, captured when a reference is built
/// and shared with every later window so both templates bin identically.
template <typename Scalar>
struct FeatureRange {
  Scalar lo{0};
  Scalar hi{0};
};

template <typename Scalar>
struct BinBounds {
  FeatureRange<Scalar> f1{};
  FeatureRange<Scalar> f2{};
};

/// Rescale x into [0,1] against the captured range. Values outside the
/// range clamp to the edge, concentrating drift mass in the border bins;
/// a collapsed range maps everything to the midpoint.
template <typename Scalar>
Scalar normalize_feature(Scalar x, const FeatureRange<Scalar>& r) {
  if (!(r.hi > r.lo)) return Scalar(0.5);
  return std::clamp((x - r.lo) / (r.hi - r.lo), Scalar(0), Scalar(1));
}

/// Normalized 10x10 joint-density histogram of two unit-range features:
/// the first feature indexes columns, the second rows, and the bins sum
/// to one. Immutable once built.
template <typename Scalar>
class ActivityTemplate {
 public:
  static constexpr int kBins = 10;
  static constexpr int kCells = kBins * kBins;
  using Grid = Eigen::Matrix<Scalar, kBins, kBins>;

  ActivityTemplate() : grid_(Grid::Zero()) {}

  /// Half-open bins [k/10,(k+1)/10); 1.0 lands in the last bin.
  static int bin_index(Scalar x_hat) {
    return std::min(int(x_hat * Scalar(kBins)), kBins - 1);
  }

  /// Build from pairs already normalized into the unit square.
  /// `pairs` is any range of two-component values accessible via [0]/[1].
  template <typename PairRange>
  static ActivityTemplate build(const PairRange& pairs) {
    ActivityTemplate t;
    for (const auto& p : pairs) {
      t.grid_(bin_index(Scalar(p[1])), bin_index(Scalar(p[0]))) += Scalar(1);
      ++t.count_;
    }
    if (t.count_ == 0) throw InsufficientDataError{"template built from an empty window"};
    t.grid_ /= Scalar(t.count_);
    return t;
  }

  /// Rehydrate from a row-major 100-value dump (debug and golden-test surface).
  static ActivityTemplate from_flat(std::span<const Scalar> values, std::int64_t sample_count) {
    if (values.size() != kCells) throw DataFormatError{"template dump must hold 100 values"};
    ActivityTemplate t;
    for (int r = 0; r < kBins; ++r)
      for (int c = 0; c < kBins; ++c) t.grid_(r, c) = values[r * kBins + c];
    t.count_ = sample_count;
    return t;
  }

  std::array<Scalar, kCells> flat() const {
    std::array<Scalar, kCells> out;
    for (int r = 0; r < kBins; ++r)
      for (int c = 0; c < kBins; ++c) out[r * kBins + c] = grid_(r, c);
    return out;
  }

  const Grid& bins() const { return grid_; }
  std::int64_t sample_count() const { return count_; }

  Scalar bin_mean() const { return grid_.mean(); }

  /// Sum of squared deviations of the bins from their mean.
  Scalar bin_scatter() const { return (grid_.array() - bin_mean()).square().sum(); }

  /// A grid with no bin-to-bin structure (all cells equal); the Pearson
  /// correlation is undefined against it.
  bool degenerate() const {
    constexpr Scalar eps = std::numeric_limits<Scalar>::epsilon();
    return count_ == 0 || bin_scatter() <= Scalar(1e4) * eps * eps;
  }

 private:
  Grid grid_;
  std::int64_t count_{0};
};

/// Pearson correlation of two templates over their 100 bins; 1 is a
/// perfect match. Throws DegenerateTemplateError when either grid is
/// constant.
template <typename Scalar>
Scalar ncc(const ActivityTemplate<Scalar>& a, const ActivityTemplate<Scalar>& b) {
  if (a.degenerate() || b.degenerate())
    throw DegenerateTemplateError{"ncc undefined for a constant template"};
  const auto da = (a.bins().array() - a.bin_mean()).eval();
  const auto db = (b.bins().array() - b.bin_mean()).eval();
  const Scalar num = (da * db).sum();
  return num / (std::sqrt(da.square().sum()) * std::sqrt(db.square().sum()));
}

/// Decision-path similarity with the degenerate cases folded in: two
/// constant densities are both uniform, hence identical (1); constant
/// against structured counts as no match (0), which fails open toward
/// detection.
template <typename Scalar>
Scalar gate_similarity(const ActivityTemplate<Scalar>& a, const ActivityTemplate<Scalar>& b) {
  const bool da = a.degenerate();
  const bool db = b.degenerate();
  if (da || db) return (da && db) ? Scalar(1) : Scalar(0);
  return ncc(a, b);
}

}  // namespace actgate
