#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "actgate/calibration.hpp"
#include "actgate/cli.hpp"
#include "actgate/dataset.hpp"

using namespace actgate;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& tail) const { return (path / tail).string(); }
};

void write_file(const fs::path& p, const std::string& body) {
  std::ofstream out(p);
  out << body;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// two alternating activities, several transitions
std::string suite_json(int subjects, int segments) {
  nlohmann::json arr = nlohmann::json::array();
  for (int s = 0; s < subjects; ++s) {
    nlohmann::json spec;
    spec["sample_rate_hz"] = 26.0;
    spec["seed"] = 100 + s;
    spec["subject"] = "s" + std::to_string(s);
    for (int k = 0; k < segments; ++k) {
      nlohmann::json seg;
      seg["duration_s"] = 15.0;
      seg["label"] = k % 2 == 0 ? "low" : "high";
      const double amp = k % 2 == 0 ? 1.0 : 5.0;
      const double freq = k % 2 == 0 ? 1.0 : 2.4;
      seg["channels"] = {
          {{"amplitude", amp}, {"frequency_hz", freq}, {"noise_sigma", 0.05}},
          {{"noise_sigma", 0.05}},
          {{"offset", 1.0}, {"noise_sigma", 0.05}},
          {{"noise_sigma", 0.05}},
          {{"amplitude", 0.6 * amp}, {"frequency_hz", freq}, {"noise_sigma", 0.05}},
          {{"noise_sigma", 0.05}},
      };
      spec["segments"].push_back(seg);
    }
    arr.push_back(spec);
  }
  return arr.dump(1);
}

}  // namespace

TEST_CASE("synth writes deterministic stream csvs") {
  TempDir dir("actgate_cli_synth");
  write_file(dir / "spec.json", suite_json(1, 2));
  CHECK(run_cli({"synth", "--spec", dir / "spec.json", "--out", dir / "a.csv"}) == 0);
  CHECK(run_cli({"synth", "--spec", dir / "spec.json", "--out", dir / "b.csv"}) == 0);
  const auto a = slurp(dir / "a.csv");
  CHECK(a == slurp(dir / "b.csv"));
  CHECK(a.find("t,ax,ay,az,wx,wy,wz,label") != std::string::npos);
  const auto stream = load_stream_csv(dir / "a.csv");
  CHECK(stream.samples.size() == 2 * 15 * 26);
}

TEST_CASE("calibrate then evaluate on a synthetic suite") {
  TempDir dir("actgate_cli_eval");
  write_file(dir / "cal.json", suite_json(1, 10));   // 9 transitions
  write_file(dir / "suite.json", suite_json(3, 6));  // 3 subjects, 5 transitions each

  CHECK(run_cli({"calibrate", "--dataset", "synth", "--path", dir / "cal.json", "--out",
                 dir / "calibration.txt"}) == 0);
  const auto cal = read_calibration(dir / "calibration.txt");
  CHECK(cal.threshold > -1.0);
  CHECK(cal.threshold < 1.0);
  CHECK(cal.tpr > 0.5);
  CHECK(cal.window_samples == 78);

  CHECK(run_cli({"evaluate", "--dataset", "synth", "--path", dir / "suite.json",
                 "--calibration", dir / "calibration.txt", "--out", dir / "report"}) == 0);
  REQUIRE(fs::exists(dir.path / "report/report.csv"));
  REQUIRE(fs::exists(dir.path / "report/report.json"));

  const auto j = nlohmann::json::parse(slurp(dir.path / "report/report.json"));
  CHECK(j["subjects"].size() == 3);
  CHECK(j["aggregate"]["tpr_mean"].get<double>() > 0.5);
  CHECK(j["cost"]["reduction"].get<double>() > 0.0);
  CHECK(j["cost"]["n_invocations"].get<std::int64_t>() >= 3);

  // byte-identical machine outputs on a rerun
  const auto csv1 = slurp(dir.path / "report/report.csv");
  const auto json1 = slurp(dir.path / "report/report.json");
  CHECK(run_cli({"evaluate", "--dataset", "synth", "--path", dir / "suite.json",
                 "--calibration", dir / "calibration.txt", "--out", dir / "report"}) == 0);
  CHECK(slurp(dir.path / "report/report.csv") == csv1);
  CHECK(slurp(dir.path / "report/report.json") == json1);

  // explicit threshold instead of a calibration file
  CHECK(run_cli({"evaluate", "--dataset", "synth", "--path", dir / "suite.json", "--threshold",
                 "0.4", "--out", dir / "report2"}) == 0);
  // both sources at once is a usage error
  CHECK(run_cli({"evaluate", "--dataset", "synth", "--path", dir / "suite.json", "--threshold",
                 "0.4", "--calibration", dir / "calibration.txt", "--out", dir / "x"}) == 1);
  // neither source is too
  CHECK(run_cli({"evaluate", "--dataset", "synth", "--path", dir / "suite.json", "--out",
                 dir / "y"}) == 1);
}

TEST_CASE("cusum baseline evaluates with its table defaults") {
  TempDir dir("actgate_cli_cusum");
  write_file(dir / "suite.json", suite_json(2, 4));
  CHECK(run_cli({"evaluate", "--dataset", "synth", "--path", dir / "suite.json", "--detector",
                 "cusum", "--out", dir / "report"}) == 0);
  const auto j = nlohmann::json::parse(slurp(dir.path / "report/report.json"));
  CHECK(j["detector"] == "cusum");
  CHECK(j["subjects"].size() == 2);
}

TEST_CASE("always-on cost baseline reports non-positive reduction") {
  TempDir dir("actgate_cli_alw");
  write_file(dir / "suite.json", suite_json(1, 3));
  CHECK(run_cli({"evaluate", "--dataset", "synth", "--path", dir / "suite.json", "--threshold",
                 "0.4", "--always-on", "--out", dir / "report"}) == 0);
  const auto j = nlohmann::json::parse(slurp(dir.path / "report/report.json"));
  CHECK(j["cost"]["reduction"].get<double>() <= 0.0);
}

TEST_CASE("calibrate on a single activity exits with the insufficient-data code") {
  TempDir dir("actgate_cli_insuff");
  write_file(dir / "one.json", suite_json(1, 1));
  CHECK(run_cli({"calibrate", "--dataset", "synth", "--path", dir / "one.json", "--out",
                 dir / "cal.txt"}) == 3);
}

TEST_CASE("calibrate reruns reproduce the file byte for byte") {
  TempDir dir("actgate_cli_rerun");
  write_file(dir / "cal.json", suite_json(1, 8));
  CHECK(run_cli({"calibrate", "--dataset", "synth", "--path", dir / "cal.json", "--out",
                 dir / "a.txt"}) == 0);
  CHECK(run_cli({"calibrate", "--dataset", "synth", "--path", dir / "cal.json", "--out",
                 dir / "b.txt"}) == 0);
  CHECK(slurp(dir / "a.txt") == slurp(dir / "b.txt"));
}

TEST_CASE("stationary stream traces an activation only at startup") {
  TempDir dir("actgate_cli_quiet");
  write_file(dir / "one.json", suite_json(1, 1));
  CHECK(run_cli({"trace", "--dataset", "synth", "--path", dir / "one.json", "--subject", "s0",
                 "--threshold", "0.2", "--out", dir / "tr"}) == 0);
  std::ifstream in(dir.path / "tr/timeline_s0.csv");
  std::string line;
  std::getline(in, line);  // header
  int row = 0, activations = 0;
  while (std::getline(in, line)) {
    const bool triggered = line.back() == '1';
    if (triggered) ++activations;
    if (row == 0) CHECK(triggered);  // initial classification
    ++row;
  }
  CHECK(row > 5);
  CHECK(activations == 1);
}

TEST_CASE("trace emits verdicts and a timeline for one subject") {
  TempDir dir("actgate_cli_trace");
  write_file(dir / "suite.json", suite_json(2, 4));
  CHECK(run_cli({"trace", "--dataset", "synth", "--path", dir / "suite.json", "--subject", "s1",
                 "--threshold", "0.4", "--out", dir / "tr"}) == 0);
  REQUIRE(fs::exists(dir.path / "tr/verdicts_s1.csv"));
  REQUIRE(fs::exists(dir.path / "tr/timeline_s1.csv"));
  const auto verdict_lines = slurp(dir.path / "tr/verdicts_s1.csv");
  const auto timeline_lines = slurp(dir.path / "tr/timeline_s1.csv");
  const auto count = [](const std::string& s) {
    return std::count(s.begin(), s.end(), '\n');
  };
  CHECK(count(verdict_lines) == count(timeline_lines));  // one row per verdict in both

  // unknown subject: data error plus a listing
  CHECK(run_cli({"trace", "--dataset", "synth", "--path", dir / "suite.json", "--subject",
                 "nope", "--threshold", "0.4", "--out", dir / "tr"}) == 2);
}

TEST_CASE("cost subcommand reproduces the published numbers") {
  CHECK(run_cli({"cost", "--windows", "2966", "--invocations", "914"}) == 0);
  CHECK(run_cli({"cost", "--windows", "10", "--invocations", "20"}) == 1);  // impossible counts
}

TEST_CASE("usage and data errors map to distinct exit codes") {
  CHECK(run_cli({"no-such-command"}) == 1);
  CHECK(run_cli({"evaluate", "--threshold", "0.4", "--out", "x"}) == 1);  // --path missing
  CHECK(run_cli({"evaluate", "--dataset", "synth", "--path", "/nonexistent/spec.json",
                 "--threshold", "0.4", "--out", "x"}) == 2);
  TempDir dir("actgate_cli_err");
  write_file(dir / "empty_dir_marker", "");
  CHECK(run_cli({"evaluate", "--dataset", "uca-ehar", "--path", dir / "no_dir", "--threshold",
                 "0.4", "--out", dir / "r"}) == 2);
}

TEST_CASE("csv dataset kind round-trips through evaluate") {
  TempDir dir("actgate_cli_csv");
  write_file(dir / "spec.json", suite_json(2, 3));
  CHECK(run_cli({"synth", "--spec", dir / "spec.json", "--out", dir / "streams"}) == 0);
  CHECK(fs::exists(dir.path / "streams/s0.csv"));
  CHECK(run_cli({"evaluate", "--dataset", "csv", "--path", dir / "streams", "--threshold",
                 "0.4", "--out", dir / "report"}) == 0);
  const auto j = nlohmann::json::parse(slurp(dir.path / "report/report.json"));
  CHECK(j["subjects"].size() == 2);
}
