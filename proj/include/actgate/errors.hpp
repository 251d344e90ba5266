#pragma once

#include <stdexcept>
#include <string>

namespace actgate {

// Not enough observations to evaluate a statistic or fit a threshold.
struct InsufficientDataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Both template grids must carry bin-to-bin structure for a correlation
// to be defined; constant grids land here.
struct DegenerateTemplateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A loader produced a stream with no usable samples.
struct EmptyStreamError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed dataset rows, unknown activity labels, unreadable files.
struct DataFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Verdicts and ground truth disagree on the windowing they were produced under.
struct ProtocolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace actgate
