#pragma once

#include <string>
#include <vector>

namespace actgate {

/// Entry point behind the `actgate` binary. Subcommands: calibrate,
/// evaluate, trace, synth, cost. Exit codes: 0 ok, 1 usage, 2 data error,
/// 3 insufficient data.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, const char* const* argv);

}  // namespace actgate
