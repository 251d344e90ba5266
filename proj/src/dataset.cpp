#include "actgate/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "actgate/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace actgate {

std::string_view to_string(Device d) {
  switch (d) {
    case Device::kGlasses: return "glasses";
    case Device::kWatch: return "watch";
    case Device::kPhone: return "phone";
    case Device::kSynthetic: return "synthetic";
  }
  return "?";
}

std::vector<std::int64_t> LabeledStream::change_points() const {
  std::vector<std::int64_t> cps;
  for (std::size_t i = 1; i < segments.size(); ++i) cps.push_back(segments[i].begin);
  return cps;
}

void LabeledStream::validate() const {
  const std::int64_t n = std::int64_t(samples.size());
  if (segments.empty()) {
    if (n != 0) throw std::invalid_argument{"unlabeled samples"};
    return;
  }
  std::int64_t cursor = 0;
  for (const auto& s : segments) {
    if (s.begin != cursor || s.end <= s.begin)
      throw std::invalid_argument{"segments must be contiguous and non-empty"};
    cursor = s.end;
  }
  if (cursor != n) throw std::invalid_argument{"segments must cover the whole stream"};
  for (std::int64_t i = 0; i < n; ++i) {
    const auto& s = samples[std::size_t(i)];
    if (s.t != i) throw std::invalid_argument{"sample indices must run 0..N-1"};
    if (!s.acc.allFinite() || !s.gyro.allFinite())
      throw std::invalid_argument{"samples must be finite"};
  }
}

namespace {

// ---------------------------------------------------------------------------
// small parsing helpers
// ---------------------------------------------------------------------------

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out);
}

bool parse_int(std::string_view s, std::int64_t& out) {
  s = trim(s);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

[[noreturn]] void reject(const fs::path& file, std::size_t line_no, const std::string& what) {
  throw DataFormatError{file.string() + ":" + std::to_string(line_no) + ": " + what};
}

std::string canonical_label(std::string_view raw) {
  std::string out;
  for (char c : trim(raw)) {
    if (c == ' ' || c == '-') c = '_';
    out.push_back(char(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

void close_segments(LabeledStream& stream, const std::vector<std::string>& labels) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (stream.segments.empty() || stream.segments.back().label != labels[i])
      stream.segments.push_back({std::int64_t(i), std::int64_t(i) + 1, labels[i]});
    else
      stream.segments.back().end = std::int64_t(i) + 1;
  }
}

// ---------------------------------------------------------------------------
// UCA-EHAR
// ---------------------------------------------------------------------------

const std::set<std::string>& uca_labels() {
  static const std::set<std::string> labels = {
      "lying",        "running",      "sitting",    "stairs",     "standing",
      "walking",      "stand_to_sit", "sit_to_stand", "sit_to_lie", "lie_to_sit"};
  return labels;
}

LabeledStream load_uca_file(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw DataFormatError{"cannot open " + file.string()};

  LabeledStream stream;
  stream.sample_rate_hz = 26.0;
  stream.device = Device::kGlasses;
  stream.subject = file.stem().string();

  std::vector<std::string> labels;
  std::string line;
  std::size_t line_no = 0;
  int n_cols = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split(line, ',');
    if (n_cols < 0) {
      // Header line: the first field of a data row parses as a number.
      double probe;
      if (!parse_double(fields.front(), probe)) continue;
      if (fields.size() != 7 && fields.size() != 8)
        reject(file, line_no, "expected 7 or 8 columns, got " + std::to_string(fields.size()));
      n_cols = int(fields.size());
    }
    if (int(fields.size()) != n_cols)
      reject(file, line_no, "expected " + std::to_string(n_cols) + " columns, got " +
                                std::to_string(fields.size()));
    const int base = n_cols == 8 ? 1 : 0;  // optional leading timestamp
    double v[6];
    for (int k = 0; k < 6; ++k)
      if (!parse_double(fields[std::size_t(base + k)], v[k]))
        reject(file, line_no, "unreadable numeric field " + std::string(fields[std::size_t(base + k)]));
    const std::string label = canonical_label(fields.back());
    if (label == "drinking") continue;  // fine-grained class, discarded
    if (!uca_labels().contains(label)) reject(file, line_no, "unknown activity label '" + label + "'");

    Sample<double> s;
    s.t = std::int64_t(labels.size());
    s.acc = {v[0], v[1], v[2]};
    s.gyro = {v[3], v[4], v[5]};
    stream.samples.push_back(s);
    labels.push_back(label);
  }
  if (stream.samples.empty()) throw EmptyStreamError{file.string() + ": no usable samples"};
  close_segments(stream, labels);
  stream.validate();
  return stream;
}

// ---------------------------------------------------------------------------
// WISDM
// ---------------------------------------------------------------------------

struct SensorRow {
  std::int64_t ts{0};
  double x{0}, y{0}, z{0};
  std::string label;
};

// Activity key of the published dataset. Codes beyond the five kept
// activities are legitimate recordings of discarded fine-grained classes.
const std::map<char, std::string>& wisdm_kept_codes() {
  static const std::map<char, std::string> kept = {{'A', "walking"},
                                                   {'B', "jogging"},
                                                   {'C', "stairs"},
                                                   {'D', "sitting"},
                                                   {'E', "standing"}};
  return kept;
}

bool wisdm_discarded_code(char c) {
  static const std::string discarded = "FGHIJKLMOPQRS";
  return discarded.find(c) != std::string::npos;
}

std::vector<SensorRow> load_wisdm_sensor(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw DataFormatError{"cannot open " + file.string()};
  std::vector<SensorRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ';')) line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split(line, ',');
    if (fields.size() != 6) reject(file, line_no, "expected 6 fields");
    const auto code_field = trim(fields[1]);
    if (code_field.size() != 1) reject(file, line_no, "activity code must be one character");
    const char code = code_field.front();
    SensorRow r;
    if (!parse_int(fields[2], r.ts)) reject(file, line_no, "unreadable timestamp");
    if (!parse_double(fields[3], r.x) || !parse_double(fields[4], r.y) ||
        !parse_double(fields[5], r.z))
      reject(file, line_no, "unreadable sensor value");
    const auto& kept = wisdm_kept_codes();
    if (auto it = kept.find(code); it != kept.end()) {
      r.label = it->second;
      rows.push_back(std::move(r));
    } else if (!wisdm_discarded_code(code)) {
      reject(file, line_no, std::string("unknown activity code '") + code + "'");
    }
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const SensorRow& a, const SensorRow& b) { return a.ts < b.ts; });
  return rows;
}

std::int64_t median_spacing(const std::vector<SensorRow>& rows) {
  std::vector<std::int64_t> gaps;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const std::int64_t d = rows[i].ts - rows[i - 1].ts;
    if (d > 0) gaps.push_back(d);
  }
  if (gaps.empty()) return 1;
  auto mid = gaps.begin() + std::ptrdiff_t(gaps.size() / 2);
  std::nth_element(gaps.begin(), mid, gaps.end());
  return *mid;
}

LabeledStream pair_wisdm_sensors(std::vector<SensorRow> accel, std::vector<SensorRow> gyro,
                                 Device device, std::string subject) {
  LabeledStream stream;
  stream.sample_rate_hz = 20.0;
  stream.device = device;
  stream.subject = std::move(subject);

  if (accel.empty() || gyro.empty())
    throw EmptyStreamError{"subject " + stream.subject + ": no usable samples after filtering"};

  // Nearest-timestamp pairing, tolerant to half a sample period of skew.
  const std::int64_t tol = median_spacing(accel) / 2;
  std::vector<std::string> labels;
  std::size_t j = 0;
  for (const auto& a : accel) {
    while (j + 1 < gyro.size() &&
           std::llabs(gyro[j + 1].ts - a.ts) < std::llabs(gyro[j].ts - a.ts))
      ++j;
    const auto& g = gyro[j];
    if (std::llabs(g.ts - a.ts) > tol || g.label != a.label) {
      ++stream.alignment_warnings;
      continue;
    }
    Sample<double> s;
    s.t = std::int64_t(labels.size());
    s.acc = {a.x, a.y, a.z};
    s.gyro = {g.x, g.y, g.z};
    stream.samples.push_back(s);
    labels.push_back(a.label);
  }
  if (stream.samples.empty())
    throw EmptyStreamError{"subject " + stream.subject + ": accel/gyro coverage does not overlap"};
  close_segments(stream, labels);
  stream.validate();
  return stream;
}

fs::path wisdm_sensor_dir(const fs::path& root, std::string_view device, std::string_view sensor) {
  const fs::path candidates[] = {
      root / "raw" / device / sensor,
      root / device / sensor,
      root / sensor,
  };
  for (const auto& c : candidates)
    if (fs::is_directory(c)) return c;
  throw DataFormatError{"no " + std::string(sensor) + " directory for device '" +
                        std::string(device) + "' under " + root.string()};
}

std::string wisdm_subject_of(const fs::path& file, std::string_view sensor) {
  // data_<subject>_<sensor>_<device>.txt
  const std::string stem = file.stem().string();
  const std::string prefix = "data_";
  const std::string tail = "_" + std::string(sensor);
  const auto pos = stem.find(tail);
  if (stem.rfind(prefix, 0) != 0 || pos == std::string::npos || pos <= prefix.size()) return {};
  return stem.substr(prefix.size(), pos - prefix.size());
}

}  // namespace

std::vector<LabeledStream> load_uca_ehar(const fs::path& dir) {
  if (fs::is_regular_file(dir)) return {load_uca_file(dir)};
  if (!fs::is_directory(dir)) throw DataFormatError{"no such dataset directory: " + dir.string()};
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw DataFormatError{"no .csv files under " + dir.string()};
  std::vector<LabeledStream> streams;
  streams.reserve(files.size());
  for (const auto& f : files) streams.push_back(load_uca_file(f));
  return streams;
}

std::vector<LabeledStream> load_wisdm(const fs::path& root, Device device) {
  if (device != Device::kWatch && device != Device::kPhone)
    throw std::invalid_argument{"wisdm holds watch and phone recordings only"};
  const std::string_view dev = to_string(device);
  const fs::path accel_dir = wisdm_sensor_dir(root, dev, "accel");
  const fs::path gyro_dir = wisdm_sensor_dir(root, dev, "gyro");

  std::map<std::string, fs::path> accel_files;
  for (const auto& entry : fs::directory_iterator(accel_dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string subject = wisdm_subject_of(entry.path(), "accel");
    if (!subject.empty()) accel_files[subject] = entry.path();
  }
  if (accel_files.empty()) throw DataFormatError{"no accel files under " + accel_dir.string()};

  std::vector<LabeledStream> streams;
  for (const auto& [subject, accel_file] : accel_files) {
    fs::path gyro_file = gyro_dir / ("data_" + subject + "_gyro_" + std::string(dev) + ".txt");
    if (!fs::is_regular_file(gyro_file))
      throw DataFormatError{"missing gyro file for subject " + subject + ": " + gyro_file.string()};
    streams.push_back(pair_wisdm_sensors(load_wisdm_sensor(accel_file),
                                         load_wisdm_sensor(gyro_file), device, subject));
  }
  return streams;
}

// ---------------------------------------------------------------------------
// synthetic generator
// ---------------------------------------------------------------------------

namespace {

// Box-Muller over an explicit 53-bit uniform so streams do not depend on
// the standard library's distribution implementation.
class GaussianRng {
 public:
  explicit GaussianRng(std::uint64_t seed) : eng_(seed) {}

  double next() {
    if (have_) {
      have_ = false;
      return cached_;
    }
    const double u1 = 1.0 - uniform01();  // (0,1], keeps the log finite
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(th);
    have_ = true;
    return r * std::cos(th);
  }

 private:
  double uniform01() { return double(eng_() >> 11) * 0x1.0p-53; }

  std::mt19937_64 eng_;
  bool have_{false};
  double cached_{0};
};

}  // namespace

LabeledStream synth(const SynthSpec& spec) {
  if (spec.segments.empty()) throw std::invalid_argument{"synth spec needs at least one segment"};
  if (!(spec.sample_rate_hz > 0)) throw std::invalid_argument{"sample rate must be positive"};

  LabeledStream stream;
  stream.sample_rate_hz = spec.sample_rate_hz;
  stream.device = Device::kSynthetic;
  stream.subject = spec.subject;

  GaussianRng rng(spec.seed);
  std::int64_t t = 0;
  for (std::size_t k = 0; k < spec.segments.size(); ++k) {
    const auto& seg = spec.segments[k];
    if (!(seg.duration_s > 0)) throw std::invalid_argument{"segment durations must be positive"};
    const std::int64_t n = std::llround(seg.duration_s * spec.sample_rate_hz);
    const std::int64_t begin = t;
    for (std::int64_t i = 0; i < n; ++i, ++t) {
      double v[kChannelCount];
      for (int c = 0; c < kChannelCount; ++c) {
        const ChannelSpec& ch = seg.channels[std::size_t(c)];
        // Phase runs on the global clock, so a pure amplitude change does
        // not inject a phase discontinuity at the boundary.
        double x = ch.offset;
        if (ch.amplitude != 0)
          x += ch.amplitude *
               std::sin(2.0 * std::numbers::pi * ch.frequency_hz * double(t) / spec.sample_rate_hz);
        if (ch.noise_sigma > 0) x += ch.noise_sigma * rng.next();
        v[c] = x;
      }
      Sample<double> s;
      s.t = t;
      s.acc = {v[0], v[1], v[2]};
      s.gyro = {v[3], v[4], v[5]};
      stream.samples.push_back(s);
    }
    stream.segments.push_back(
        {begin, t, seg.label.empty() ? "seg" + std::to_string(k) : seg.label});
  }
  stream.validate();
  return stream;
}

namespace {

SynthSpec synth_spec_from_json(const json& j) {
  SynthSpec spec;
  spec.sample_rate_hz = j.value("sample_rate_hz", 26.0);
  spec.seed = j.value("seed", std::uint64_t{0});
  spec.subject = j.value("subject", std::string{"synth"});
  if (!j.contains("segments") || !j["segments"].is_array() || j["segments"].empty())
    throw DataFormatError{"synth spec needs a non-empty 'segments' array"};
  for (const auto& js : j["segments"]) {
    SynthSegment seg;
    seg.duration_s = js.value("duration_s", 0.0);
    seg.label = js.value("label", std::string{});
    if (js.contains("channels")) {
      const auto& jc = js["channels"];
      if (!jc.is_array() || jc.size() > kChannelCount)
        throw DataFormatError{"'channels' must be an array of up to 6 entries"};
      for (std::size_t c = 0; c < jc.size(); ++c) {
        seg.channels[c].offset = jc[c].value("offset", 0.0);
        seg.channels[c].amplitude = jc[c].value("amplitude", 0.0);
        seg.channels[c].frequency_hz = jc[c].value("frequency_hz", 0.0);
        seg.channels[c].noise_sigma = jc[c].value("noise_sigma", 0.0);
      }
    }
    spec.segments.push_back(std::move(seg));
  }
  return spec;
}

json parse_json_file(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw DataFormatError{"cannot open " + file.string()};
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataFormatError{file.string() + ": " + e.what()};
  }
}

}  // namespace

SynthSpec load_synth_spec(const fs::path& file) {
  const json j = parse_json_file(file);
  try {
    return synth_spec_from_json(j.is_array() ? j.at(0) : j);
  } catch (const json::exception& e) {
    throw DataFormatError{file.string() + ": " + e.what()};
  }
}

std::vector<SynthSpec> load_synth_suite(const fs::path& file) {
  const json j = parse_json_file(file);
  std::vector<SynthSpec> specs;
  try {
    if (j.is_array())
      for (const auto& item : j) specs.push_back(synth_spec_from_json(item));
    else
      specs.push_back(synth_spec_from_json(j));
  } catch (const json::exception& e) {
    throw DataFormatError{file.string() + ": " + e.what()};
  }
  return specs;
}

// ---------------------------------------------------------------------------
// normalized CSV dump
// ---------------------------------------------------------------------------

void write_stream_csv(const LabeledStream& stream, const fs::path& file) {
  std::ofstream out(file);
  if (!out) throw DataFormatError{"cannot write " + file.string()};
  out << "# sample_rate_hz=" << stream.sample_rate_hz << " device=" << to_string(stream.device)
      << " subject=" << stream.subject << "\n";
  out << "t,ax,ay,az,wx,wy,wz,label\n";
  char buf[64];
  std::size_t seg = 0;
  for (const auto& s : stream.samples) {
    while (seg + 1 < stream.segments.size() && s.t >= stream.segments[seg].end) ++seg;
    out << s.t;
    const double vals[6] = {s.acc.x(), s.acc.y(), s.acc.z(), s.gyro.x(), s.gyro.y(), s.gyro.z()};
    for (double v : vals) {
      std::snprintf(buf, sizeof buf, ",%.17g", v);
      out << buf;
    }
    out << ',' << stream.segments[seg].label << "\n";
  }
  if (!out) throw DataFormatError{"write failed: " + file.string()};
}

LabeledStream load_stream_csv(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw DataFormatError{"cannot open " + file.string()};
  LabeledStream stream;
  stream.device = Device::kSynthetic;
  stream.subject = file.stem().string();

  std::vector<std::string> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    if (line.front() == '#') {
      // metadata comment written by write_stream_csv
      std::istringstream meta(line.substr(1));
      std::string kv;
      while (meta >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
        if (key == "sample_rate_hz") stream.sample_rate_hz = std::stod(val);
        if (key == "subject") stream.subject = val;
        if (key == "device") {
          for (Device d : {Device::kGlasses, Device::kWatch, Device::kPhone, Device::kSynthetic})
            if (val == to_string(d)) stream.device = d;
        }
      }
      continue;
    }
    auto fields = split(line, ',');
    std::int64_t t;
    const bool numeric_first = parse_int(fields[0], t);
    if (!numeric_first && line_no <= 2) continue;  // header line
    if (fields.size() != 8) reject(file, line_no, "expected 8 columns");
    if (!numeric_first) reject(file, line_no, "unreadable sample index");
    double v[6];
    for (int k = 0; k < 6; ++k)
      if (!parse_double(fields[std::size_t(1 + k)], v[k]))
        reject(file, line_no, "unreadable numeric field");
    Sample<double> s;
    s.t = std::int64_t(labels.size());
    s.acc = {v[0], v[1], v[2]};
    s.gyro = {v[3], v[4], v[5]};
    stream.samples.push_back(s);
    labels.push_back(std::string(trim(fields[7])));
  }
  if (stream.samples.empty()) throw EmptyStreamError{file.string() + ": no usable samples"};
  close_segments(stream, labels);
  stream.validate();
  return stream;
}

}  // namespace actgate
