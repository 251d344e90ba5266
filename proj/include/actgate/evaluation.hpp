#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "actgate/dataset.hpp"
#include "actgate/gate.hpp"

namespace actgate {

/// Ground truth projected onto the W/hop sliding-window grid. Each change
/// point is anchored at the first window whose span contains it; its
/// detection zone spans windows anchor-1 .. anchor+2 (a +-3 s latency
/// margin at 50% overlap).
struct WindowTruth {
  std::int64_t window_count{0};
  int window_samples{0};
  int hop_samples{0};
  std::vector<std::int64_t> anchors;  // ascending

  static WindowTruth from_change_points(std::span<const std::int64_t> change_points,
                                        std::int64_t n_samples, int window_samples,
                                        int hop_samples);
  static WindowTruth from_stream(const LabeledStream& stream, int window_samples,
                                 int hop_samples);

  std::int64_t zone_begin(std::size_t k) const;  // inclusive
  std::int64_t zone_end(std::size_t k) const;    // inclusive
  bool in_any_zone(std::int64_t window) const;
};

struct ConfusionCounts {
  std::int64_t tp{0};
  std::int64_t fp{0};
  std::int64_t tn{0};
  std::int64_t fn{0};

  /// Change points plus out-of-zone verdict windows; the four counts
  /// always partition this total.
  std::int64_t evaluable() const { return tp + fp + tn + fn; }
};

/// Relaxed detection matching: a transition verdict claims the leftmost
/// unclaimed zone covering it (one TP per change point, extra verdicts in
/// a claimed zone are absorbed); outside every zone a transition verdict
/// is an FP and a quiet verdict a TN; unclaimed zones are FNs. Quiet
/// verdicts inside zones are excluded, the zone is accounted via its
/// change point.
ConfusionCounts relaxed_match(std::span<const WindowVerdict<double>> verdicts,
                              const WindowTruth& truth);

struct RateStats {
  double mean{0};
  double stddev{0};  // population std across subjects
  int n{0};          // subjects with a defined rate
};

struct MetricsSummary {
  RateStats tpr;
  RateStats tnr;
};

/// Per-subject TPR/TNR aggregated across subjects; subjects without
/// ground-truth transitions contribute only to TNR (undefined rates are
/// skipped, never zero-filled).
MetricsSummary metrics(std::span<const ConfusionCounts> per_subject);

struct CostReport {
  std::int64_t n_windows{0};
  std::int64_t n_invocations{0};
  double gate_flops_per_step{0};
  double har_flops_per_invocation{0};
  double always_on_flops{0};
  double gated_flops{0};
  double reduction{0};  // 1 - gated/always-on
};

CostReport cost_model(std::int64_t n_windows, std::int64_t n_invocations, double gate_flops,
                      double har_flops);

/// Verdict rows as "window_index,end_sample,ncc,transition,f1,f2"; the ncc
/// column is empty for reference-building windows.
void write_verdicts_csv(std::span<const WindowVerdict<double>> verdicts,
                        const std::filesystem::path& file);

/// Drive a gate over a whole recording.
std::vector<WindowVerdict<double>> run_gate(const LabeledStream& stream,
                                            const GateConfig<double>& config);

/// Windows on which the classifier must run: the startup reference plus
/// every detected transition.
std::int64_t count_har_invocations(std::span<const WindowVerdict<double>> verdicts);

}  // namespace actgate
