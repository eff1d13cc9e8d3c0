#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bilinctl/analysis.hpp"
#include "bilinctl/errors.hpp"
#include "bilinctl/foliation.hpp"
#include "bilinctl/model.hpp"
#include "bilinctl/reach.hpp"
#include "bilinctl/report.hpp"

namespace py = pybind11;
using namespace bilinctl;

namespace {

// Reports cross the boundary as plain dicts.
py::object to_python(const nlohmann::json& doc) {
  return py::module_::import("json").attr("loads")(doc.dump());
}

ControlSchedule make_schedule(const std::vector<std::pair<int, double>>& segments, bool orbit) {
  ControlSchedule s;
  s.mode = orbit ? ScheduleMode::kOrbit : ScheduleMode::kAttainable;
  for (const auto& [index, duration] : segments) s.segments.push_back({index, duration});
  return s;
}

Matrix stack(const std::vector<Vector>& rows, int n) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), n);
  for (std::size_t k = 0; k < rows.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = rows[k];
  return out;
}

const char* status_name(TrajectoryStatus s) {
  switch (s) {
    case TrajectoryStatus::kOk:
      return "ok";
    case TrajectoryStatus::kDegenerate:
      return "degenerate";
    case TrajectoryStatus::kBlowUp:
      return "blow_up";
  }
  return "?";
}

SamplerOptions sampler(int max_segments, double duration_scale, int points_per_segment) {
  SamplerOptions s;
  s.max_segments = max_segments;
  s.duration_scale = duration_scale;
  s.points_per_segment = points_per_segment;
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Controllability analysis for bilinear control systems";
  m.attr("__version__") = version();

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<InvalidInput>(m, "InvalidInput", base);
  py::register_exception<NumericalFailure>(m, "NumericalFailure", base);

  py::class_<SystemSpec>(m, "SystemSpec")
      .def_property_readonly("name", &SystemSpec::name)
      .def_property_readonly("n", &SystemSpec::n)
      .def_property_readonly("is_bilinear", &SystemSpec::is_bilinear)
      .def_property_readonly("labels", &SystemSpec::labels)
      .def_property_readonly("matrices",
                             [](const SystemSpec& s) { return s.family().matrices; })
      .def("evaluate", &SystemSpec::evaluate, py::arg("index"), py::arg("x"))
      .def("to_json", &serialize_system)
      .def("__repr__", [](const SystemSpec& s) {
        return "<SystemSpec " + s.name() + " n=" + std::to_string(s.n()) + ">";
      });

  m.def("builtin_names", &builtin_names);
  m.def("builtin", [](const std::string& name) { return builtin_corpus(name); }, py::arg("name"));
  m.def("parse_system", [](const std::string& text) { return parse_system(text); },
        py::arg("text"));
  m.def("bilinear_system",
        [](const std::string& name, const std::vector<Matrix>& matrices,
           const std::vector<std::string>& labels) {
          return SystemSpec::bilinear(name, MatrixFamily{matrices, labels});
        },
        py::arg("name"), py::arg("matrices"), py::arg("labels") = std::vector<std::string>{});
  m.def("random_system", &random_system, py::arg("n"), py::arg("m"), py::arg("seed"));

  py::class_<LieBasis>(m, "LieBasis")
      .def_readonly("n", &LieBasis::n)
      .def_readonly("basis", &LieBasis::basis)
      .def_readonly("depth", &LieBasis::depth)
      .def_readonly("rounds", &LieBasis::rounds)
      .def_readonly("converged", &LieBasis::converged)
      .def_property_readonly("dim", &LieBasis::dim);

  m.def("bracket", &bracket, py::arg("a"), py::arg("b"));
  m.def("lie_closure",
        [](const std::vector<Matrix>& gens, double tol, std::optional<int> depth_cap) {
          return lie_closure(gens, tol, depth_cap);
        },
        py::arg("generators"), py::arg("tol") = kDefaultRankTol,
        py::arg("depth_cap") = py::none());
  m.def("numerical_rank",
        [](const Matrix& a, double tol) { return numerical_rank(a, tol); }, py::arg("a"),
        py::arg("tol") = kDefaultRankTol);
  m.def("matrix_exponential", &matrix_exponential, py::arg("a"), py::arg("t") = 1.0);
  m.def("project_sphere", &project_sphere, py::arg("m"), py::arg("x"));

  m.def("larc_at",
        [](const SystemSpec& s, const Vector& x, double tol) {
          const LarcResult r = larc_at(s, x, tol);
          return std::make_pair(r.holds, r.dim);
        },
        py::arg("spec"), py::arg("x"), py::arg("tol") = kDefaultRankTol,
        "(holds, evaluated dimension) of the rank condition at x.");
  m.def("transversality_at",
        [](const SystemSpec& s, const Vector& x, double tol) {
          return transversality_at(s, x, tol);
        },
        py::arg("spec"), py::arg("x"), py::arg("tol") = kDefaultRankTol);

  m.def("decide",
        [](const SystemSpec& s, int samples, int budget, double threshold, std::uint64_t seed,
           double tol, std::optional<Vector> x0, int max_segments, double duration_scale,
           int points_per_segment) {
          DecisionBudgets b;
          b.samples = samples;
          b.reach_budget = budget;
          b.coverage_threshold = threshold;
          b.seed = seed;
          b.tol = tol;
          b.x0 = std::move(x0);
          b.sampler = sampler(max_segments, duration_scale, points_per_segment);
          Verdict v;
          {
            py::gil_scoped_release release;
            v = decide_controllability(s, b);
          }
          return to_python(to_json(v));
        },
        py::arg("spec"), py::arg("samples") = 10000, py::arg("budget") = 100000,
        py::arg("coverage_threshold") = 0.99, py::arg("seed") = 0,
        py::arg("tol") = kDefaultRankTol, py::arg("x0") = py::none(),
        py::arg("max_segments") = 8, py::arg("duration_scale") = 1.0,
        py::arg("points_per_segment") = 4,
        "Run the full decision procedure and return the verdict as a dict.");

  m.def("simulate",
        [](const SystemSpec& s, const std::vector<std::pair<int, double>>& segments,
           const Vector& x0, bool orbit) {
          const Trajectory t = simulate(s, make_schedule(segments, orbit), x0);
          return py::make_tuple(t.times, stack(t.states, s.n()), status_name(t.status));
        },
        py::arg("spec"), py::arg("segments"), py::arg("x0"), py::arg("orbit") = false,
        "Apply [(field index, duration), ...] from x0; returns (times, states, status).");

  m.def("sample_attainable",
        [](const SystemSpec& s, const Vector& x0, int budget, std::uint64_t seed,
           int max_segments, double duration_scale, int points_per_segment) {
          PointCloud cloud;
          {
            py::gil_scoped_release release;
            cloud = sample_attainable(s, x0, budget, seed,
                                      sampler(max_segments, duration_scale, points_per_segment));
          }
          Matrix out(static_cast<Eigen::Index>(cloud.size()), s.n());
          for (std::size_t k = 0; k < cloud.size(); ++k) {
            out.row(static_cast<Eigen::Index>(k)) = cloud[k];
          }
          return out;
        },
        py::arg("spec"), py::arg("x0"), py::arg("budget"), py::arg("seed") = 0,
        py::arg("max_segments") = 8, py::arg("duration_scale") = 1.0,
        py::arg("points_per_segment") = 4);

  m.def("coverage",
        [](const Matrix& points, int angular_cells, int radial_bins, double r_min, double r_max,
           bool projective) {
          const int n = static_cast<int>(points.cols());
          PointCloud cloud(n);
          cloud.reserve(static_cast<std::size_t>(points.rows()));
          for (Eigen::Index k = 0; k < points.rows(); ++k) cloud.push_back(points.row(k).transpose());
          GridOptions g;
          g.angular_cells = angular_cells;
          g.radial_bins = radial_bins;
          g.r_min = r_min;
          g.r_max = r_max;
          g.antipodal_quotient = projective;
          return to_python(to_json(coverage(cloud, CoverageGrid(n, g))));
        },
        py::arg("points"), py::arg("angular_cells") = 32, py::arg("radial_bins") = 16,
        py::arg("r_min") = 0.1, py::arg("r_max") = 10.0, py::arg("projective") = false);

  m.def("approx_reach",
        [](const SystemSpec& s, const Vector& x0, const Vector& target, double eps, int budget,
           std::uint64_t seed) {
          ReachResult r;
          {
            py::gil_scoped_release release;
            r = approx_reach_test(s, x0, target, eps, budget, seed);
          }
          return to_python(to_json(r));
        },
        py::arg("spec"), py::arg("x0"), py::arg("target"), py::arg("eps") = 1e-2,
        py::arg("budget") = 100000, py::arg("seed") = 0);

  m.def("foliation_examples", &foliation_example_names);
  m.def("first_return",
        [](const std::string& example, const Vector& theta) {
          const RadialDistribution d = foliation_example(example, static_cast<int>(theta.size()));
          const FirstReturnResult r = first_return(d, PlanarSection::make(theta));
          py::dict out;
          out["p_theta"] = r.p_theta;
          out["arc"] = stack(r.arc, d.n());
          out["length"] = r.length;
          out["max_tangency_residual"] = r.max_tangency_residual;
          return out;
        },
        py::arg("example"), py::arg("theta"));
  m.def("phi_constancy",
        [](const std::string& example, int n, int theta_samples, std::uint64_t seed, double tol) {
          return to_python(to_json(phi_constancy(foliation_example(example, n), theta_samples,
                                                 seed, tol)));
        },
        py::arg("example"), py::arg("n") = 3, py::arg("theta_samples") = 64, py::arg("seed") = 0,
        py::arg("tol") = 1e-6);
}
