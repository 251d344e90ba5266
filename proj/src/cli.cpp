#include "actgate/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "actgate/calibration.hpp"
#include "actgate/cusum.hpp"
#include "actgate/dataset.hpp"
#include "actgate/errors.hpp"
#include "actgate/evaluation.hpp"
#include "actgate/gate.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace actgate {
namespace {

struct DatasetOptions {
  std::string kind{"synth"};
  std::string path;
  std::string device{"watch"};
  double window_s{3.0};
  double overlap{0.5};
  double rate_hz{0};  // override for csv streams lacking metadata
  std::optional<std::uint64_t> seed;  // overrides synth spec seeds
};

void add_dataset_options(CLI::App* cmd, DatasetOptions& o) {
  cmd->add_option("--dataset", o.kind, "dataset kind")
      ->check(CLI::IsMember({"uca-ehar", "wisdm", "synth", "csv"}))
      ->capture_default_str();
  cmd->add_option("--path", o.path, "dataset directory, synth spec file or stream csv")
      ->required();
  cmd->add_option("--device", o.device, "wisdm device")
      ->check(CLI::IsMember({"watch", "phone"}))
      ->capture_default_str();
  cmd->add_option("--window-s", o.window_s, "window length in seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--overlap", o.overlap, "window overlap fraction")
      ->check(CLI::Range(0.0, 0.999))
      ->capture_default_str();
  cmd->add_option("--rate-hz", o.rate_hz, "sample rate override for csv streams");
  cmd->add_option("--seed", o.seed, "override the seeds of a synth spec");
}

std::vector<LabeledStream> load_streams(const DatasetOptions& o) {
  std::vector<LabeledStream> streams;
  if (o.kind == "uca-ehar") {
    streams = load_uca_ehar(o.path);
  } else if (o.kind == "wisdm") {
    streams = load_wisdm(o.path, o.device == "watch" ? Device::kWatch : Device::kPhone);
  } else if (o.kind == "synth") {
    auto specs = load_synth_suite(o.path);
    if (o.seed)
      for (std::size_t i = 0; i < specs.size(); ++i) specs[i].seed = *o.seed + i;
    for (const auto& spec : specs) streams.push_back(synth(spec));
  } else if (o.kind == "csv") {
    if (fs::is_directory(o.path)) {
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(o.path))
        if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
      std::sort(files.begin(), files.end());
      if (files.empty()) throw DataFormatError{"no .csv files under " + o.path};
      for (const auto& f : files) streams.push_back(load_stream_csv(f));
    } else {
      streams.push_back(load_stream_csv(o.path));
    }
  }
  if (o.rate_hz > 0)
    for (auto& s : streams) s.sample_rate_hz = o.rate_hz;
  if (streams.empty()) throw EmptyStreamError{"dataset produced no streams"};
  for (const auto& s : streams) {
    if (!(s.sample_rate_hz > 0))
      throw DataFormatError{"stream " + s.subject +
                            " has no sample rate; pass --rate-hz to supply one"};
    if (s.sample_rate_hz != streams.front().sample_rate_hz)
      throw DataFormatError{"streams mix sample rates; evaluate them separately"};
  }
  return streams;
}

GateConfig<double> gate_config(const DatasetOptions& o, double rate_hz) {
  return GateConfig<double>::for_sample_rate(rate_hz, o.window_s, o.overlap);
}

const LabeledStream* find_subject(const std::vector<LabeledStream>& streams,
                                  const std::string& subject) {
  for (const auto& s : streams)
    if (s.subject == subject) return &s;
  return nullptr;
}

std::string format_rate(double r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", r);
  return buf;
}

// ---------------------------------------------------------------------------
// calibrate
// ---------------------------------------------------------------------------

std::array<double, 5> quartiles(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  auto at = [&](double q) {
    const double pos = q * double(v.size() - 1);
    const std::size_t lo = std::size_t(pos);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - double(lo)) * (v[hi] - v[lo]);
  };
  return {v.front(), at(0.25), at(0.5), at(0.75), v.back()};
}

int cmd_calibrate(const DatasetOptions& data, const std::string& subject, double weight,
                  const std::string& out_file) {
  auto streams = load_streams(data);
  if (!subject.empty()) {
    const auto* s = find_subject(streams, subject);
    if (!s) throw DataFormatError{"unknown subject '" + subject + "'"};
    streams = {*s};
  }
  const auto cfg = gate_config(data, streams.front().sample_rate_hz);

  LabeledNccSeries series;
  for (const auto& s : streams) {
    const auto part = collect_ncc_series(s, cfg);
    series.points.insert(series.points.end(), part.points.begin(), part.points.end());
  }

  auto result = fit_threshold(series, weight);
  result.window_samples = cfg.window_samples;
  result.sample_rate_hz = streams.front().sample_rate_hz;
  write_calibration(result, out_file);

  std::printf("calibration: %zu windows (%lld with a transition, %lld without)\n",
              series.points.size(), (long long)series.count(1), (long long)series.count(0));
  for (int cls : {0, 1}) {
    std::vector<double> vals;
    for (const auto& p : series.points)
      if (p.cls == cls) vals.push_back(p.ncc);
    const auto q = quartiles(std::move(vals));
    std::printf("  class %d ncc: min %.3f  q1 %.3f  median %.3f  q3 %.3f  max %.3f\n", cls,
                q[0], q[1], q[2], q[3], q[4]);
  }
  std::printf("threshold %.6f (weight %.2f) -> TPR %.4f, TNR %.4f\n", result.threshold,
              result.weight, result.tpr, result.tnr);
  std::printf("wrote %s\n", out_file.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

struct SubjectReport {
  std::string subject;
  ConfusionCounts counts;
  std::int64_t windows{0};
  std::int64_t invocations{0};
};

std::vector<WindowVerdict<double>> detect(const LabeledStream& stream,
                                          const std::string& detector,
                                          const GateConfig<double>& cfg) {
  if (detector == "gate") return run_gate(stream, cfg);
  CusumConfig<double> cc;
  cc.warmup_samples = std::max(2, int(std::lround(stream.sample_rate_hz)));  // 1 s of warm-up
  return run_cusum_windowed<double>(stream.samples, cc, cfg.window_samples, cfg.hop_samples);
}

int cmd_evaluate(const DatasetOptions& data, const std::string& detector,
                 std::optional<double> threshold, const std::string& calibration_file,
                 double har_flops, bool always_on, const std::string& out_dir) {
  const auto streams = load_streams(data);
  auto cfg = gate_config(data, streams.front().sample_rate_hz);
  if (detector == "gate") {
    if (threshold.has_value() == !calibration_file.empty())
      throw std::invalid_argument{"pass exactly one of --threshold or --calibration"};
    cfg.ncc_threshold = threshold ? *threshold : read_calibration(calibration_file).threshold;
  }

  std::vector<SubjectReport> reports;
  std::vector<ConfusionCounts> confusion;
  std::int64_t total_windows = 0, total_invocations = 0;
  for (const auto& s : streams) {
    const auto verdicts = detect(s, detector, cfg);
    const auto truth = WindowTruth::from_stream(s, cfg.window_samples, cfg.hop_samples);
    SubjectReport r;
    r.subject = s.subject;
    r.counts = relaxed_match(verdicts, truth);
    r.windows = std::int64_t(verdicts.size());
    r.invocations = count_har_invocations(verdicts);
    total_windows += r.windows;
    total_invocations += r.invocations;
    confusion.push_back(r.counts);
    reports.push_back(std::move(r));
  }

  const auto summary = metrics(confusion);
  const auto gate_cost = double(flops_per_step(cfg.window_samples).total());
  const auto cost =
      cost_model(total_windows, always_on ? total_windows : total_invocations, gate_cost,
                 har_flops);

  fs::create_directories(out_dir);

  // machine CSV: per-subject rows plus an aggregate row
  {
    std::ofstream csv(fs::path(out_dir) / "report.csv");
    if (!csv) throw DataFormatError{"cannot write report.csv under " + out_dir};
    csv << "subject,tp,fp,tn,fn,tpr,tnr,tpr_std,tnr_std,windows,invocations\n";
    for (const auto& r : reports) {
      csv << r.subject << ',' << r.counts.tp << ',' << r.counts.fp << ',' << r.counts.tn << ','
          << r.counts.fn << ',';
      if (r.counts.tp + r.counts.fn > 0)
        csv << format_rate(double(r.counts.tp) / double(r.counts.tp + r.counts.fn));
      csv << ',';
      if (r.counts.tn + r.counts.fp > 0)
        csv << format_rate(double(r.counts.tn) / double(r.counts.tn + r.counts.fp));
      csv << ",,," << r.windows << ',' << r.invocations << "\n";
    }
    csv << "aggregate,,,,," << format_rate(summary.tpr.mean) << ',' << format_rate(summary.tnr.mean)
        << ',' << format_rate(summary.tpr.stddev) << ',' << format_rate(summary.tnr.stddev) << ','
        << total_windows << ',' << total_invocations << "\n";
  }

  // machine JSON: everything including the cost report
  {
    ordered_json j;
    j["detector"] = detector;
    j["window_samples"] = cfg.window_samples;
    j["hop_samples"] = cfg.hop_samples;
    if (detector == "gate") j["ncc_threshold"] = cfg.ncc_threshold;
    j["subjects"] = ordered_json::array();
    for (const auto& r : reports) {
      ordered_json js;
      js["subject"] = r.subject;
      js["tp"] = r.counts.tp;
      js["fp"] = r.counts.fp;
      js["tn"] = r.counts.tn;
      js["fn"] = r.counts.fn;
      js["windows"] = r.windows;
      js["invocations"] = r.invocations;
      j["subjects"].push_back(js);
    }
    j["aggregate"] = {{"tpr_mean", summary.tpr.mean},
                      {"tpr_std", summary.tpr.stddev},
                      {"tnr_mean", summary.tnr.mean},
                      {"tnr_std", summary.tnr.stddev},
                      {"tpr_subjects", summary.tpr.n},
                      {"tnr_subjects", summary.tnr.n}};
    j["cost"] = {{"n_windows", cost.n_windows},
                 {"n_invocations", cost.n_invocations},
                 {"gate_flops_per_step", cost.gate_flops_per_step},
                 {"har_flops_per_invocation", cost.har_flops_per_invocation},
                 {"always_on_flops", cost.always_on_flops},
                 {"gated_flops", cost.gated_flops},
                 {"reduction", cost.reduction}};
    std::ofstream out(fs::path(out_dir) / "report.json");
    if (!out) throw DataFormatError{"cannot write report.json under " + out_dir};
    out << j.dump(2) << "\n";
  }

  // human-readable table
  std::printf("%-16s %5s %5s %5s %5s %8s %8s\n", "subject", "TP", "FP", "TN", "FN", "TPR", "TNR");
  for (const auto& r : reports) {
    std::printf("%-16s %5lld %5lld %5lld %5lld %8s %8s\n", r.subject.c_str(),
                (long long)r.counts.tp, (long long)r.counts.fp, (long long)r.counts.tn,
                (long long)r.counts.fn,
                r.counts.tp + r.counts.fn > 0
                    ? format_rate(double(r.counts.tp) / double(r.counts.tp + r.counts.fn)).c_str()
                    : "-",
                r.counts.tn + r.counts.fp > 0
                    ? format_rate(double(r.counts.tn) / double(r.counts.tn + r.counts.fp)).c_str()
                    : "-");
  }
  std::printf("aggregate: TPR %.4f +- %.4f (%d subjects), TNR %.4f +- %.4f (%d subjects)\n",
              summary.tpr.mean, summary.tpr.stddev, summary.tpr.n, summary.tnr.mean,
              summary.tnr.stddev, summary.tnr.n);
  std::printf("cost: %lld windows, %lld invocations, reduction %.1f%%\n",
              (long long)cost.n_windows, (long long)cost.n_invocations, 100.0 * cost.reduction);
  std::printf("wrote %s/report.csv and report.json\n", out_dir.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// trace
// ---------------------------------------------------------------------------

int cmd_trace(const DatasetOptions& data, const std::string& subject,
              const std::string& detector, std::optional<double> threshold,
              const std::string& calibration_file, const std::string& out_dir) {
  const auto streams = load_streams(data);
  const auto* stream = find_subject(streams, subject);
  if (!stream) {
    std::fprintf(stderr, "unknown subject '%s'; available:\n", subject.c_str());
    for (const auto& s : streams) std::fprintf(stderr, "  %s\n", s.subject.c_str());
    throw DataFormatError{"unknown subject '" + subject + "'"};
  }

  auto cfg = gate_config(data, stream->sample_rate_hz);
  if (detector == "gate") {
    if (threshold.has_value() == !calibration_file.empty())
      throw std::invalid_argument{"pass exactly one of --threshold or --calibration"};
    cfg.ncc_threshold = threshold ? *threshold : read_calibration(calibration_file).threshold;
  }
  const auto verdicts = detect(*stream, detector, cfg);

  fs::create_directories(out_dir);
  write_verdicts_csv(verdicts, fs::path(out_dir) / ("verdicts_" + subject + ".csv"));

  // plot-ready activation timeline
  const fs::path timeline_file = fs::path(out_dir) / ("timeline_" + subject + ".csv");
  {
    std::ofstream out(timeline_file);
    if (!out) throw DataFormatError{"cannot write " + timeline_file.string()};
    out << "window_index,end_sample,label,triggered\n";
    std::size_t seg = 0;
    bool first = true;
    for (const auto& v : verdicts) {
      while (seg + 1 < stream->segments.size() && v.end_sample >= stream->segments[seg].end)
        ++seg;
      const bool triggered = v.transition || first;
      first = false;
      out << v.window_index << ',' << v.end_sample << ',' << stream->segments[seg].label << ','
          << (triggered ? 1 : 0) << "\n";
    }
  }
  std::printf("trace %s: %zu windows, %lld activations\n", subject.c_str(), verdicts.size(),
              (long long)count_har_invocations(verdicts));
  std::printf("wrote %s\n", timeline_file.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// synth / cost
// ---------------------------------------------------------------------------

int cmd_synth(const std::string& spec_file, const std::string& out_path,
              std::optional<std::uint64_t> seed) {
  auto specs = load_synth_suite(spec_file);
  if (seed)
    for (std::size_t i = 0; i < specs.size(); ++i) specs[i].seed = *seed + i;

  if (specs.size() == 1 && !fs::is_directory(out_path)) {
    write_stream_csv(synth(specs.front()), out_path);
    std::printf("wrote %s\n", out_path.c_str());
    return 0;
  }
  fs::create_directories(out_path);
  for (const auto& spec : specs) {
    const fs::path f = fs::path(out_path) / (spec.subject + ".csv");
    write_stream_csv(synth(spec), f);
  }
  std::printf("wrote %zu streams under %s\n", specs.size(), out_path.c_str());
  return 0;
}

int cmd_cost(std::int64_t windows, std::int64_t invocations, double gate_flops, double har_flops,
             int window_samples) {
  if (gate_flops <= 0) gate_flops = double(flops_per_step(window_samples).total());
  const auto r = cost_model(windows, invocations, gate_flops, har_flops);
  ordered_json j = {{"n_windows", r.n_windows},
                    {"n_invocations", r.n_invocations},
                    {"gate_flops_per_step", r.gate_flops_per_step},
                    {"har_flops_per_invocation", r.har_flops_per_invocation},
                    {"always_on_flops", r.always_on_flops},
                    {"gated_flops", r.gated_flops},
                    {"reduction", r.reduction}};
  std::printf("%s\n", j.dump(2).c_str());
  std::printf("reduction: %.1f%%\n", 100.0 * r.reduction);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("actgate");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(int(argv.size()), argv.data());
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Change-detection gate for IMU activity streams"};
  app.require_subcommand(1);
  app.set_config("--config");

  DatasetOptions data;
  std::string subject;
  std::string detector{"gate"};
  std::string calibration_file;
  std::string out_path;
  double weight = 0.7;
  double har_flops = 853000.0;
  bool always_on = false;
  std::optional<double> threshold;
  std::optional<std::uint64_t> seed;
  std::int64_t windows = 0, invocations = 0;
  double gate_flops = 0;
  int window_samples = 78;

  auto* calibrate = app.add_subcommand("calibrate", "fit the ncc threshold on labeled data");
  add_dataset_options(calibrate, data);
  calibrate->add_option("--subject", subject, "restrict to one subject");
  calibrate->add_option("--tpr-weight", weight, "weight on TPR in the objective")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  calibrate->add_option("--out", out_path, "calibration file to write")->required();

  auto* evaluate = app.add_subcommand("evaluate", "run a detector over all subjects");
  add_dataset_options(evaluate, data);
  evaluate->add_option("--detector", detector, "gate | cusum")
      ->check(CLI::IsMember({"gate", "cusum"}))
      ->capture_default_str();
  evaluate->add_option("--threshold", threshold, "explicit ncc threshold");
  evaluate->add_option("--calibration", calibration_file, "calibration file to read");
  evaluate->add_option("--har-flops", har_flops, "classifier cost per invocation")
      ->capture_default_str();
  evaluate->add_flag("--always-on", always_on, "cost baseline: invoke the classifier every window");
  evaluate->add_option("--out", out_path, "report directory")->required();

  auto* trace = app.add_subcommand("trace", "per-window trace for one subject");
  add_dataset_options(trace, data);
  trace->add_option("--subject", subject, "subject id")->required();
  trace->add_option("--detector", detector, "gate | cusum")
      ->check(CLI::IsMember({"gate", "cusum"}))
      ->capture_default_str();
  trace->add_option("--threshold", threshold, "explicit ncc threshold");
  trace->add_option("--calibration", calibration_file, "calibration file to read");
  trace->add_option("--out", out_path, "output directory")->required();

  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset");
  synth_cmd->add_option("--spec", data.path, "synth spec json (object or array)")->required();
  synth_cmd->add_option("--seed", seed, "override the spec seeds");
  synth_cmd->add_option("--out", out_path, "output csv file or directory")->required();

  auto* cost = app.add_subcommand("cost", "standalone cost-model query");
  cost->add_option("--windows", windows, "total windows")->required();
  cost->add_option("--invocations", invocations, "classifier invocations")->required();
  cost->add_option("--gate-flops", gate_flops, "gate cost per step (default: computed)");
  cost->add_option("--window-samples", window_samples, "W used to compute the gate cost")
      ->capture_default_str();
  cost->add_option("--har-flops", har_flops, "classifier cost per invocation")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
    if (calibrate->parsed()) return cmd_calibrate(data, subject, weight, out_path);
    if (evaluate->parsed())
      return cmd_evaluate(data, detector, threshold, calibration_file, har_flops, always_on,
                          out_path);
    if (trace->parsed())
      return cmd_trace(data, subject, detector, threshold, calibration_file, out_path);
    if (synth_cmd->parsed()) return cmd_synth(data.path, out_path, seed);
    if (cost->parsed()) return cmd_cost(windows, invocations, gate_flops, har_flops, window_samples);
    return 1;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const InsufficientDataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}

}  // namespace actgate
