#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "actgate/types.hpp"

namespace actgate {

enum class Device { kGlasses, kWatch, kPhone, kSynthetic };

std::string_view to_string(Device d);

/// Contiguous run of one activity, [begin, end) in sample indices.
struct Segment {
  std::int64_t begin{0};
  std::int64_t end{0};
  std::string label;
};

/// One subject's recording: a 6-axis sample stream plus its activity
/// segmentation. Segments are contiguous, non-overlapping and cover the
/// whole stream.
struct LabeledStream {
  double sample_rate_hz{0};
  Device device{Device::kSynthetic};
  std::string subject;
  std::vector<Sample<double>> samples;
  std::vector<Segment> segments;
  std::int64_t alignment_warnings{0};  // accel/gyro rows dropped while pairing

  /// Ground-truth change points: the start of every segment after the first.
  std::vector<std::int64_t> change_points() const;

  /// Throws std::invalid_argument on any coverage violation.
  void validate() const;
};

// --- recorded datasets -----------------------------------------------------

/// Smart-glasses recordings: one CSV per subject/protocol named
/// <subject>_<protocol>.csv with rows "ax,ay,az,wx,wy,wz,label" (an
/// optional leading timestamp column and a header line are accepted).
/// Rows labeled DRINKING are discarded; any other unknown label or a
/// malformed row rejects the file with a line-numbered diagnostic.
std::vector<LabeledStream> load_uca_ehar(const std::filesystem::path& dir);

/// Smartwatch/smartphone recordings in the published raw layout
/// raw/<device>/<sensor>/data_<subject>_<sensor>_<device>.txt with lines
/// "subject,activity_code,timestamp,x,y,z;". Only jogging, sitting,
/// stairs, standing and walking are kept; accelerometer and gyroscope
/// rows are paired by nearest timestamp and trimmed to their overlap.
std::vector<LabeledStream> load_wisdm(const std::filesystem::path& root, Device device);

// --- synthetic streams -----------------------------------------------------

/// Sinusoid plus white noise, per channel: offset + amplitude *
/// sin(2*pi*f*t/rate) + N(0, noise_sigma).
struct ChannelSpec {
  double offset{0};
  double amplitude{0};
  double frequency_hz{0};
  double noise_sigma{0};
};

inline constexpr int kChannelCount = 6;  // ax ay az wx wy wz

struct SynthSegment {
  double duration_s{0};
  std::array<ChannelSpec, kChannelCount> channels{};
  std::string label;  // defaults to seg<k> when empty
};

struct SynthSpec {
  double sample_rate_hz{26};
  std::uint64_t seed{0};
  std::string subject{"synth"};
  std::vector<SynthSegment> segments;
};

/// Deterministic for a fixed spec: the same seed reproduces the stream
/// bit for bit. Segment boundaries are the ground-truth transitions.
LabeledStream synth(const SynthSpec& spec);

/// JSON spec files: either a single spec object or an array of them
/// (one synthetic subject each).
SynthSpec load_synth_spec(const std::filesystem::path& file);
std::vector<SynthSpec> load_synth_suite(const std::filesystem::path& file);

// --- normalized CSV dump ---------------------------------------------------

/// "t,ax,ay,az,wx,wy,wz,label" with a header line; the round-trip is exact.
void write_stream_csv(const LabeledStream& stream, const std::filesystem::path& file);
LabeledStream load_stream_csv(const std::filesystem::path& file);

}  // namespace actgate
