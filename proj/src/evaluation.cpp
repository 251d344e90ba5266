#include "actgate/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "actgate/errors.hpp"

namespace actgate {

WindowTruth WindowTruth::from_change_points(std::span<const std::int64_t> change_points,
                                            std::int64_t n_samples, int window_samples,
                                            int hop_samples) {
  if (window_samples < 1 || hop_samples < 1)
    throw std::invalid_argument{"window and hop must be positive"};
  WindowTruth t;
  t.window_samples = window_samples;
  t.hop_samples = hop_samples;
  t.window_count =
      n_samples < window_samples ? 0 : (n_samples - window_samples) / hop_samples + 1;
  for (const std::int64_t c : change_points) {
    // First grid window whose [w*hop, w*hop + W) span contains c.
    std::int64_t w = c < window_samples ? 0 : (c - window_samples) / hop_samples + 1;
    if (w >= t.window_count) continue;  // change at the tail no window can see
    t.anchors.push_back(w);
  }
  std::sort(t.anchors.begin(), t.anchors.end());
  return t;
}

WindowTruth WindowTruth::from_stream(const LabeledStream& stream, int window_samples,
                                     int hop_samples) {
  const auto cps = stream.change_points();
  return from_change_points(cps, std::int64_t(stream.samples.size()), window_samples,
                            hop_samples);
}

std::int64_t WindowTruth::zone_begin(std::size_t k) const {
  return std::max<std::int64_t>(0, anchors[k] - 1);
}

std::int64_t WindowTruth::zone_end(std::size_t k) const {
  return std::min(window_count - 1, anchors[k] + 2);
}

bool WindowTruth::in_any_zone(std::int64_t window) const {
  for (std::size_t k = 0; k < anchors.size(); ++k)
    if (window >= zone_begin(k) && window <= zone_end(k)) return true;
  return false;
}

ConfusionCounts relaxed_match(std::span<const WindowVerdict<double>> verdicts,
                              const WindowTruth& truth) {
  std::int64_t prev_index = -1;
  for (const auto& v : verdicts) {
    if (v.window_index <= prev_index)
      throw ProtocolError{"verdict window indices must be strictly increasing"};
    if (v.window_index < 0 || v.window_index >= truth.window_count)
      throw ProtocolError{"verdict window off the ground-truth grid"};
    prev_index = v.window_index;
  }

  ConfusionCounts c;
  std::vector<bool> claimed(truth.anchors.size(), false);
  for (const auto& v : verdicts) {
    bool in_zone = false;
    if (v.transition) {
      for (std::size_t k = 0; k < truth.anchors.size(); ++k) {
        if (v.window_index < truth.zone_begin(k) || v.window_index > truth.zone_end(k)) continue;
        in_zone = true;
        if (!claimed[k]) {
          claimed[k] = true;
          ++c.tp;
          break;
        }
        // already claimed: keep scanning for a later unclaimed zone
      }
      if (!in_zone) ++c.fp;
    } else {
      if (!truth.in_any_zone(v.window_index)) ++c.tn;
    }
  }
  for (const bool cl : claimed)
    if (!cl) ++c.fn;
  return c;
}

MetricsSummary metrics(std::span<const ConfusionCounts> per_subject) {
  auto aggregate = [](const std::vector<double>& rates) {
    RateStats s;
    s.n = int(rates.size());
    if (rates.empty()) return s;
    double sum = 0, sq = 0;
    for (double r : rates) {
      sum += r;
      sq += r * r;
    }
    s.mean = sum / double(s.n);
    s.stddev = std::sqrt(std::max(0.0, sq / double(s.n) - s.mean * s.mean));
    return s;
  };

  std::vector<double> tprs, tnrs;
  for (const auto& c : per_subject) {
    if (c.tp + c.fn > 0) tprs.push_back(double(c.tp) / double(c.tp + c.fn));
    if (c.tn + c.fp > 0) tnrs.push_back(double(c.tn) / double(c.tn + c.fp));
  }
  return {aggregate(tprs), aggregate(tnrs)};
}

CostReport cost_model(std::int64_t n_windows, std::int64_t n_invocations, double gate_flops,
                      double har_flops) {
  if (n_invocations > n_windows || n_windows < 0 || n_invocations < 0)
    throw std::invalid_argument{"invocations must lie in [0, n_windows]"};
  if (!(gate_flops > 0) || !(har_flops > 0))
    throw std::invalid_argument{"flop costs must be positive"};
  CostReport r;
  r.n_windows = n_windows;
  r.n_invocations = n_invocations;
  r.gate_flops_per_step = gate_flops;
  r.har_flops_per_invocation = har_flops;
  r.always_on_flops = double(n_windows) * har_flops;
  r.gated_flops = double(n_windows) * gate_flops + double(n_invocations) * har_flops;
  r.reduction = r.always_on_flops > 0 ? 1.0 - r.gated_flops / r.always_on_flops : 0.0;
  return r;
}

std::vector<WindowVerdict<double>> run_gate(const LabeledStream& stream,
                                            const GateConfig<double>& config) {
  ChangeGate<double> gate(config);
  std::vector<WindowVerdict<double>> verdicts;
  for (const auto& s : stream.samples)
    if (auto v = gate.step(s)) verdicts.push_back(*v);
  return verdicts;
}

std::int64_t count_har_invocations(std::span<const WindowVerdict<double>> verdicts) {
  if (verdicts.empty()) return 0;
  std::int64_t n = 1;  // initial classification when the first reference lands
  for (const auto& v : verdicts)
    if (v.transition) ++n;
  return n;
}

void write_verdicts_csv(std::span<const WindowVerdict<double>> verdicts,
                        const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw DataFormatError{"cannot write " + file.string()};
  out << "window_index,end_sample,ncc,transition,f1,f2\n";
  char buf[64];
  for (const auto& v : verdicts) {
    out << v.window_index << ',' << v.end_sample << ',';
    if (v.ncc) {
      std::snprintf(buf, sizeof buf, "%.9f", *v.ncc);
      out << buf;
    }
    out << ',' << (v.transition ? 1 : 0) << ',' << v.f1 << ',' << v.f2 << "\n";
  }
  if (!out) throw DataFormatError{"write failed: " + file.string()};
}

}  // namespace actgate
