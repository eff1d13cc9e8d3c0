#include "bilinctl/cli.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "bilinctl/analysis.hpp"
#include "bilinctl/errors.hpp"
#include "bilinctl/foliation.hpp"
#include "bilinctl/model.hpp"
#include "bilinctl/reach.hpp"
#include "bilinctl/report.hpp"

namespace bilinctl {

using nlohmann::json;

namespace {

const char* command_name(Command c) {
  switch (c) {
    case Command::kAnalyze:
      return "analyze";
    case Command::kReach:
      return "reach";
    case Command::kFoliation:
      return "foliation";
    case Command::kCorpus:
      return "corpus";
  }
  return "?";
}

void validate(const RunConfig& c) {
  if (!c.builtin.empty() && !c.spec_path.empty()) {
    throw InvalidInput("use either --builtin or --spec, not both");
  }
  if (!(c.tol > 0.0) || c.samples < 1 || c.budget < 1 || c.grid < 1 || c.radial_bins < 1 ||
      c.restarts < 1 || c.max_segments < 1 || c.points_per_segment < 0 ||
      !(c.duration_scale > 0.0) || !(c.eps > 0.0) || c.theta_samples < 1 ||
      c.points_per_arc < 2) {
    throw InvalidInput("numeric options must be positive");
  }
  if (!(c.coverage_threshold > 0.0) || c.coverage_threshold > 1.0) {
    throw InvalidInput("--coverage-threshold must be in (0, 1]");
  }
}

SystemSpec load_spec(const RunConfig& c) {
  if (!c.builtin.empty()) {
    return builtin_corpus(c.builtin);
  }
  if (c.spec_path.empty()) {
    throw InvalidInput("one of --builtin or --spec is required");
  }
  std::ifstream in(c.spec_path);
  if (!in) {
    throw InvalidInput("cannot read spec file '" + c.spec_path + "'");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_system(buffer.str());
}

Vector to_vector(const std::vector<double>& v, int n, const char* what) {
  if (static_cast<int>(v.size()) != n) {
    throw InvalidInput(std::string(what) + " must have " + std::to_string(n) + " coordinates");
  }
  return Eigen::Map<const Vector>(v.data(), n);
}

json environment(const RunConfig& c) {
  return {{"version", version()},
          {"command", command_name(c.command)},
          {"seed", c.seed},
          {"tol", c.tol},
          {"samples", c.samples},
          {"budget", c.budget},
          {"coverage_threshold", c.coverage_threshold},
          {"grid", c.grid},
          {"radial_bins", c.radial_bins},
          {"projective", c.projective},
          {"restarts", c.restarts},
          {"max_segments", c.max_segments},
          {"duration_scale", c.duration_scale},
          {"points_per_segment", c.points_per_segment}};
}

GridOptions grid_options(const RunConfig& c) {
  GridOptions g;
  g.angular_cells = c.grid;
  g.radial_bins = c.radial_bins;
  g.antipodal_quotient = c.projective;
  return g;
}

SamplerOptions sampler_options(const RunConfig& c) {
  SamplerOptions s;
  s.max_segments = c.max_segments;
  s.duration_scale = c.duration_scale;
  s.points_per_segment = c.points_per_segment;
  return s;
}

json system_json(const SystemSpec& spec) {
  if (spec.is_bilinear() || !spec.builtin_name().empty()) {
    return json::parse(serialize_system(spec));
  }
  return {{"name", spec.name()}, {"n", spec.n()}};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    throw InvalidInput("cannot write '" + path + "'");
  }
  file << text;
}

void emit(const RunConfig& c, const json& report, std::ostream& out) {
  const std::string text = report.dump(2) + "\n";
  if (c.out.empty()) {
    out << text;
  } else {
    write_text(c.out, text);
  }
}

int run_analyze(const RunConfig& c, std::ostream& out) {
  const SystemSpec spec = load_spec(c);
  DecisionBudgets b;
  b.samples = c.samples;
  b.reach_budget = c.budget;
  b.coverage_threshold = c.coverage_threshold;
  b.tol = c.tol;
  b.seed = c.seed;
  b.restarts = c.restarts;
  b.grid = grid_options(c);
  b.sampler = sampler_options(c);
  if (c.x0) {
    b.x0 = to_vector(*c.x0, spec.n(), "--x0");
  }
  const Verdict v = decide_controllability(spec, b);
  json report = {{"environment", environment(c)},
                 {"system", system_json(spec)},
                 {"verdict", to_json(v)}};
  emit(c, report, out);
  return v.conclusion == Conclusion::kUndetermined ? exit_code::kUndetermined
                                                   : exit_code::kSuccess;
}

int run_reach(const RunConfig& c, std::ostream& out) {
  const SystemSpec spec = load_spec(c);
  const Vector x0 = c.x0 ? to_vector(*c.x0, spec.n(), "--x0") : Vector(Vector::Unit(spec.n(), 0));
  const SamplerOptions sampler = sampler_options(c);
  const PointCloud cloud = sample_attainable(spec, x0, c.budget, c.seed, sampler);
  const CoverageReport cov = coverage(cloud, CoverageGrid(spec.n(), grid_options(c)));
  json report = {{"environment", environment(c)},
                 {"system", system_json(spec)},
                 {"x0", to_json(x0)},
                 {"discarded_samples", cloud.discarded},
                 {"coverage", to_json(cov)}};
  if (c.target) {
    const Vector target = to_vector(*c.target, spec.n(), "--target");
    const ReachResult r = approx_reach_test(spec, x0, target, c.eps, c.budget, c.seed, sampler);
    json reach = to_json(r);
    reach["target"] = to_json(target);
    reach["eps"] = c.eps;
    report["reach_test"] = std::move(reach);
  }
  if (!c.out.empty()) {
    std::ostringstream csv;
    write_cloud_csv(csv, cloud);
    write_text(c.out + ".points.csv", csv.str());
    report["points_file"] = c.out + ".points.csv";
  }
  emit(c, report, out);
  return exit_code::kSuccess;
}

int run_foliation(const RunConfig& c, std::ostream& out) {
  std::optional<RadialDistribution> distr;
  if (!c.example.empty()) {
    if (!c.builtin.empty() || !c.spec_path.empty()) {
      throw InvalidInput("use either --example or a system, not both");
    }
    distr = foliation_example(c.example, c.n);
  } else {
    distr = orbit_foliation(load_spec(c), c.tol, 64, c.seed);
  }
  json report = {{"environment", environment(c)},
                 {"foliation", {{"name", distr->name()}, {"n", distr->n()}}}};
  std::ostringstream phi_csv;
  phi_csv.precision(17);
  if (distr->n() >= 3) {
    const PhiConstancy phi = phi_constancy(*distr, c.theta_samples, c.seed, 1e-6);
    report["phi"] = to_json(phi);
    for (std::size_t k = 0; k < phi.values.size(); ++k) {
      phi_csv << k << ',' << phi.values[k] << '\n';
    }
  } else {
    report["phi"] = nullptr;
  }
  const ArcFamily arcs = arc_family(*distr, c.theta_samples, c.points_per_arc, c.seed);
  report["arc_family"] = to_json(arcs);
  if (!c.out.empty()) {
    std::ostringstream arcs_csv;
    write_arcs_csv(arcs_csv, arcs);
    write_text(c.out + ".arcs.csv", arcs_csv.str());
    report["arcs_file"] = c.out + ".arcs.csv";
    if (distr->n() >= 3) {
      write_text(c.out + ".phi.csv", phi_csv.str());
      report["phi_file"] = c.out + ".phi.csv";
    }
  }
  emit(c, report, out);
  return exit_code::kSuccess;
}

int run_corpus(const RunConfig& c, std::ostream& out) {
  json report;
  if (c.builtin.empty()) {
    report = {{"builtins", builtin_names()}, {"foliation_examples", foliation_example_names()}};
  } else {
    report = json::parse(serialize_system(builtin_corpus(c.builtin)));
  }
  emit(c, report, out);
  return exit_code::kSuccess;
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    validate(config);
    switch (config.command) {
      case Command::kAnalyze:
        return run_analyze(config, out);
      case Command::kReach:
        return run_reach(config, out);
      case Command::kFoliation:
        return run_foliation(config, out);
      case Command::kCorpus:
        return run_corpus(config, out);
    }
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kInvalidInput;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return exit_code::kNumericalFailure;
  }
  return exit_code::kNumericalFailure;
}

}  // namespace bilinctl
