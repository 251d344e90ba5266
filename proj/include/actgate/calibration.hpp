#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "actgate/dataset.hpp"
#include "actgate/gate.hpp"

namespace actgate {

/// One calibration observation: the similarity of a monitored window and
/// whether a labeled transition fell inside that window. Only these
/// scalars are kept; no sensor data survives collection.
struct NccPoint {
  double ncc{0};
  int cls{0};  // 1 = the window contains a labeled transition
};
static_assert(sizeof(NccPoint) <= 16, "calibration points are two scalars, never raw samples");

struct LabeledNccSeries {
  std::vector<NccPoint> points;

  std::int64_t count(int cls) const;
};

/// Emulate inference on a labeled recording: the gate runs with detection
/// disabled, the reference is force-rebuilt at the first window boundary
/// after each labeled transition, and every monitored window contributes
/// its (ncc, class) pair.
LabeledNccSeries collect_ncc_series(const LabeledStream& stream, const GateConfig<double>& config);

struct CalibrationResult {
  double threshold{0};
  double tpr{0};
  double tnr{0};
  double weight{0};
  int window_samples{0};
  double sample_rate_hz{0};
};

/// Pick the threshold maximizing weight*TPR + (1-weight)*TNR over the
/// candidate midpoints between consecutive distinct ncc values (plus the
/// two all-one-class extremes). The objective is piecewise constant, so
/// this sweep is exhaustive. Ties break toward higher TPR, then the lower
/// threshold.
CalibrationResult fit_threshold(const LabeledNccSeries& series, double weight = 0.7);

/// Key-value text file: threshold, weight, tpr, tnr, window_samples,
/// sample_rate_hz. Stable across reruns (no timestamps).
void write_calibration(const CalibrationResult& result, const std::filesystem::path& file);
CalibrationResult read_calibration(const std::filesystem::path& file);

}  // namespace actgate
