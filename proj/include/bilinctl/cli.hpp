#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace bilinctl {

enum class Command { kAnalyze, kReach, kFoliation, kCorpus };

namespace exit_code {
inline constexpr int kSuccess = 0;
inline constexpr int kInvalidInput = 1;
inline constexpr int kUndetermined = 2;
inline constexpr int kNumericalFailure = 3;
}  // namespace exit_code

struct RunConfig {
  Command command = Command::kAnalyze;
  std::string builtin;    // --builtin NAME
  std::string spec_path;  // --spec PATH
  std::uint64_t seed = 0;
  double tol = 1e-9;
  int samples = 10000;
  int budget = 100000;
  double coverage_threshold = 0.99;
  int grid = 32;  // angular cells
  int radial_bins = 16;
  bool projective = false;
  int restarts = 16;
  int max_segments = 8;
  double duration_scale = 1.0;
  int points_per_segment = 4;
  std::optional<std::vector<double>> x0;
  std::optional<std::vector<double>> target;  // reach: also run a targeted test
  double eps = 1e-2;
  std::string example;  // foliation example name
  int n = 3;            // foliation example dimension
  int theta_samples = 64;
  int points_per_arc = 64;
  std::string out;  // report path; empty writes the report to `out`
};

/// Executes one command. The report goes to `config.out` when set (data
/// files next to it as <out>.points.csv, <out>.phi.csv, <out>.arcs.csv),
/// otherwise to `out`. Errors are described on `err`. Returns an exit code.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace bilinctl
