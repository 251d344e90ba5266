#include "actgate/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "actgate/errors.hpp"

namespace actgate {

std::int64_t LabeledNccSeries::count(int cls) const {
  return std::count_if(points.begin(), points.end(),
                       [cls](const NccPoint& p) { return p.cls == cls; });
}

LabeledNccSeries collect_ncc_series(const LabeledStream& stream,
                                    const GateConfig<double>& config) {
  config.validate();
  const std::int64_t n = std::int64_t(stream.samples.size());
  if (n < config.window_samples + config.hop_samples)
    throw InsufficientDataError{"calibration stream shorter than two windows"};

  const auto changes = stream.change_points();
  std::size_t next_change = 0;

  ChangeGate<double> gate(config, /*manual_control=*/true);
  LabeledNccSeries series;
  for (const auto& s : stream.samples) {
    const auto verdict = gate.step(s);
    if (!verdict || !verdict->ncc) continue;

    // Labeled transitions that have passed by the end of this window.
    const std::int64_t span_begin = verdict->end_sample - config.window_samples + 1;
    bool passed = false, contained = false;
    while (next_change < changes.size() && changes[next_change] <= verdict->end_sample) {
      passed = true;
      if (changes[next_change] >= span_begin) contained = true;
      ++next_change;
    }
    series.points.push_back({*verdict->ncc, contained ? 1 : 0});
    if (passed) gate.force_transition();
  }
  return series;
}

CalibrationResult fit_threshold(const LabeledNccSeries& series, double weight) {
  if (!(weight > 0.0 && weight < 1.0))
    throw std::invalid_argument{"weight must lie in (0, 1)"};
  const std::int64_t n1 = series.count(1);
  const std::int64_t n0 = series.count(0);
  if (n1 == 0 || n0 == 0)
    throw InsufficientDataError{
        "calibration needs windows of both classes; record 2-3 minutes with 8-10 transitions"};

  std::vector<double> values;
  values.reserve(series.points.size());
  for (const auto& p : series.points) values.push_back(p.ncc);
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());

  // Midpoints cover every achievable split; the two extremes cover the
  // all-transition and no-transition classifications. The high extreme must
  // lie strictly above the maximum, which the midpoint toward 1 cannot do
  // once the maximum is 1 itself.
  std::vector<double> candidates;
  candidates.push_back((values.front() - 1.0) / 2.0);
  for (std::size_t i = 0; i + 1 < values.size(); ++i)
    candidates.push_back((values[i] + values[i + 1]) / 2.0);
  candidates.push_back(values.back() < 1.0 ? (values.back() + 1.0) / 2.0
                                           : std::nextafter(values.back(), 2.0));

  CalibrationResult best;
  double best_objective = -1.0;
  for (const double th : candidates) {
    std::int64_t tp = 0, tn = 0;
    for (const auto& p : series.points) {
      const bool flagged = p.ncc < th;
      if (p.cls == 1 && flagged) ++tp;
      if (p.cls == 0 && !flagged) ++tn;
    }
    const double tpr = double(tp) / double(n1);
    const double tnr = double(tn) / double(n0);
    const double objective = weight * tpr + (1.0 - weight) * tnr;
    const bool better = objective > best_objective ||
                        (objective == best_objective &&
                         (tpr > best.tpr || (tpr == best.tpr && th < best.threshold)));
    if (better) {
      best_objective = objective;
      best.threshold = th;
      best.tpr = tpr;
      best.tnr = tnr;
    }
  }
  best.weight = weight;
  return best;
}

void write_calibration(const CalibrationResult& result, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw DataFormatError{"cannot write " + file.string()};
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "threshold=%.17g\nweight=%.17g\ntpr=%.17g\ntnr=%.17g\n"
                "window_samples=%d\nsample_rate_hz=%.17g\n",
                result.threshold, result.weight, result.tpr, result.tnr, result.window_samples,
                result.sample_rate_hz);
  out << buf;
  if (!out) throw DataFormatError{"write failed: " + file.string()};
}

CalibrationResult read_calibration(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw DataFormatError{"cannot open " + file.string()};
  std::map<std::string, double> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    try {
      kv[line.substr(0, eq)] = std::stod(line.substr(eq + 1));
    } catch (const std::exception&) {
      throw DataFormatError{file.string() + ": bad value for key " + line.substr(0, eq)};
    }
  }
  if (!kv.contains("threshold"))
    throw DataFormatError{file.string() + ": missing 'threshold' key"};
  CalibrationResult r;
  r.threshold = kv["threshold"];
  r.weight = kv.contains("weight") ? kv["weight"] : 0.7;
  r.tpr = kv.contains("tpr") ? kv["tpr"] : 0.0;
  r.tnr = kv.contains("tnr") ? kv["tnr"] : 0.0;
  r.window_samples = int(kv.contains("window_samples") ? kv["window_samples"] : 0);
  r.sample_rate_hz = kv.contains("sample_rate_hz") ? kv["sample_rate_hz"] : 0.0;
  return r;
}

}  // namespace actgate
