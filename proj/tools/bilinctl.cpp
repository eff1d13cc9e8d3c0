// Command-line front end: analyze | reach | foliation | corpus.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bilinctl/cli.hpp"

namespace {

std::vector<double> parse_point(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    out.push_back(std::stod(item));
  }
  return out;
}

void add_system_flags(CLI::App* app, bilinctl::RunConfig& c) {
  app->add_option("--builtin", c.builtin, "Built-in system name");
  app->add_option("--spec", c.spec_path, "System spec document (JSON)");
}

void add_common_flags(CLI::App* app, bilinctl::RunConfig& c) {
  app->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  app->add_option("--tol", c.tol, "Relative rank tolerance")->capture_default_str();
  app->add_option("--out", c.out, "Report path (data files are written next to it)");
}

void add_reach_flags(CLI::App* app, bilinctl::RunConfig& c, std::string& x0) {
  app->add_option("--budget", c.budget, "Number of sampled schedules")->capture_default_str();
  app->add_option("--grid", c.grid, "Angular cells of the coverage grid")->capture_default_str();
  app->add_option("--radial-bins", c.radial_bins, "Radial bins of the coverage grid")
      ->capture_default_str();
  app->add_flag("--projective", c.projective, "Merge antipodal cells");
  app->add_option("--max-segments", c.max_segments, "Segments per random schedule")
      ->capture_default_str();
  app->add_option("--duration-scale", c.duration_scale, "Mean segment duration")
      ->capture_default_str();
  app->add_option("--points-per-segment", c.points_per_segment,
                  "States recorded per segment (0 keeps endpoints only)")
      ->capture_default_str();
  app->add_option("--x0", x0, "Initial state, comma separated (default e1)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Controllability analysis for bilinear control systems"};
  app.require_subcommand(1);

  bilinctl::RunConfig config;
  std::string x0;
  std::string target;

  auto* analyze = app.add_subcommand("analyze", "Decide controllability and write a verdict");
  add_system_flags(analyze, config);
  add_common_flags(analyze, config);
  add_reach_flags(analyze, config, x0);
  analyze->add_option("--samples", config.samples, "Sphere samples for rank checks")
      ->capture_default_str();
  analyze->add_option("--coverage-threshold", config.coverage_threshold,
                      "Coverage needed for an empirical Controllable verdict")
      ->capture_default_str();
  analyze->add_option("--restarts", config.restarts, "Rank-search restarts")
      ->capture_default_str();

  auto* reach = app.add_subcommand("reach", "Sample the attainable set and measure coverage");
  add_system_flags(reach, config);
  add_common_flags(reach, config);
  add_reach_flags(reach, config, x0);
  reach->add_option("--target", target, "Also search for a schedule reaching this point");
  reach->add_option("--eps", config.eps, "Target radius")->capture_default_str();

  auto* foliation = app.add_subcommand("foliation", "First-return map and arc family");
  add_system_flags(foliation, config);
  add_common_flags(foliation, config);
  foliation->add_option("--example", config.example,
                        "sphere | radial_graph_h03 | radial_graph_tilted | radial_graph_zero");
  foliation->add_option("--n", config.n, "Dimension of the example")->capture_default_str();
  foliation->add_option("--theta-samples", config.theta_samples, "Number of planar sections")
      ->capture_default_str();
  foliation->add_option("--points-per-arc", config.points_per_arc, "Samples per arc")
      ->capture_default_str();

  auto* corpus = app.add_subcommand("corpus", "List built-ins or print one as a spec document");
  corpus->add_option("--builtin", config.builtin, "Built-in system to print");
  corpus->add_option("--out", config.out, "Output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : bilinctl::exit_code::kInvalidInput;
  }

  if (analyze->parsed()) {
    config.command = bilinctl::Command::kAnalyze;
  } else if (reach->parsed()) {
    config.command = bilinctl::Command::kReach;
  } else if (foliation->parsed()) {
    config.command = bilinctl::Command::kFoliation;
  } else {
    config.command = bilinctl::Command::kCorpus;
  }
  try {
    if (!x0.empty()) {
      config.x0 = parse_point(x0);
    }
    if (!target.empty()) {
      config.target = parse_point(target);
    }
  } catch (const std::exception&) {
    std::cerr << "error: points must be comma-separated numbers\n";
    return bilinctl::exit_code::kInvalidInput;
  }
  return bilinctl::run(config, std::cout, std::cerr);
}
