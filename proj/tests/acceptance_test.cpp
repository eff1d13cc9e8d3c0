// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "bilinctl/analysis.hpp"
#include "bilinctl/foliation.hpp"
#include "bilinctl/model.hpp"
#include "bilinctl/reach.hpp"
#include "oracles.hpp"

using namespace bilinctl;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + ("failed: " + what);
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

// --- 1: closure dimensions against exact rational bracketing -------------
Outcome closure_oracle() {
  Outcome o;
  Eigen::MatrixXi e12 = Eigen::MatrixXi::Zero(2, 2), e21 = Eigen::MatrixXi::Zero(2, 2);
  e12(0, 1) = 1;
  e21(1, 0) = 1;
  Eigen::MatrixXi j(2, 2);
  j << 0, -1, 1, 0;
  std::vector<Eigen::MatrixXi> so3;
  const SystemSpec so3_spec = builtin_corpus("so3");
  for (const Matrix& m : so3_spec.family().matrices) so3.push_back(m.cast<int>());

  struct Case {
    const char* name;
    std::vector<Eigen::MatrixXi> gens;
    int expected;
  };
  const std::vector<Case> cases{{"{E12,E21}", {e12, e21}, 3}, {"so(3)", so3, 3}, {"{J}", {j}, 1}};
  for (const Case& c : cases) {
    std::vector<Matrix> real;
    for (const auto& g : c.gens) real.push_back(g.cast<double>());
    const int got = lie_closure(real).dim();
    const int exact = oracle::exact_lie_dimension(c.gens);
    o.note(std::string(c.name) + " dim " + std::to_string(got) + " (exact " +
           std::to_string(exact) + ")");
    o.require(got == c.expected && exact == c.expected, c.name);
  }
  return o;
}

// --- 2: transversality vs projected-field rank -----------------------------
Outcome transversality_duality() {
  Outcome o;
  int disagreements = 0, transversal = 0;
  std::mt19937_64 rng(2024);
  for (int s = 0; s < 20; ++s) {
    const SystemSpec spec = random_system(3, 2, 500 + s);
    const LieBasis basis = lie_closure(spec.family().matrices, 1e-9);
    const auto algebra = oracle::lie_span(spec.family().matrices, 1e-9);
    for (int k = 0; k < 50; ++k) {
      const Vector x = oracle::random_unit(3, rng);
      const bool lib = transversality_at(basis, x);
      const bool ref = oracle::projected_rank(algebra, x, 1e-9) == 2;
      disagreements += lib != ref;
      transversal += lib;
    }
  }
  o.note("1000 points, " + std::to_string(disagreements) + " disagreements, " +
         std::to_string(transversal) + " transversal");
  o.require(disagreements == 0, "disagreements");
  return o;
}

// --- 3: certificates -------------------------------------------------------
Outcome certificate_soundness() {
  Outcome o;
  DecisionBudgets budgets;

  const Verdict so3 = decide_controllability(builtin_corpus("so3"), budgets);
  const auto* fail = so3.certificate ? std::get_if<LarcFailure>(&*so3.certificate) : nullptr;
  o.require(so3.conclusion == Conclusion::kNotControllable && fail != nullptr,
            "so3 LarcFailure");
  if (fail != nullptr) {
    const auto algebra = oracle::lie_span(builtin_corpus("so3").family().matrices);
    oracle::Matrix cols(3, static_cast<Eigen::Index>(algebra.size()));
    for (std::size_t k = 0; k < algebra.size(); ++k) cols.col(k) = algebra[k] * fail->x;
    const auto sv = Eigen::JacobiSVD<oracle::Matrix>(cols).singularValues();
    o.note("so3 re-verified sigma_3/sigma_1 " + fmt("%.2e", sv(2) / sv(0)));
    o.require(sv(2) <= 1e-9 * sv(0), "so3 re-verification");
  }

  const Verdict ex = decide_controllability(builtin_corpus("expanding_pair"), budgets);
  const bool monotone = ex.certificate &&
                        std::holds_alternative<MonotoneNormCertificate>(*ex.certificate);
  o.require(ex.conclusion == Conclusion::kNotControllable && monotone, "expanding_pair MonotoneNorm");
  SamplerOptions endpoints;
  endpoints.points_per_segment = 0;
  const Vector x0 = vec2(1, 0);
  const PointCloud cloud =
      sample_attainable(builtin_corpus("expanding_pair"), x0, 10000, 3, endpoints);
  double min_ratio = 1e300;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    min_ratio = std::min(min_ratio, cloud[i].norm() / x0.norm());
  }
  o.note(std::to_string(cloud.size()) + " endpoints, min |x|/|x0| " + fmt("%.12f", min_ratio));
  o.require(cloud.size() == 10000 && min_ratio >= 1.0 - 1e-9, "expanding_pair endpoints");

  const Verdict id = decide_controllability(builtin_corpus("identity_only"), budgets);
  o.require(id.conclusion == Conclusion::kNotControllable, "identity_only");
  o.note(std::string("identity_only ") + to_string(id.conclusion));
  return o;
}

// --- 4: empirical controllability of the planar pair ------------------------
Outcome planar_empirical() {
  Outcome o;
  const SystemSpec spec = builtin_corpus("planar_jd");
  DecisionBudgets budgets;
  budgets.x0 = vec2(1, 0);
  const Verdict v = decide_controllability(spec, budgets);
  const double fraction = v.coverage ? v.coverage->fraction : 0.0;
  o.note("coverage " + fmt("%.4f", fraction) + " (" + to_string(v.conclusion) + ")");
  o.require(fraction >= 0.99, "coverage >= 0.99");

  const ReachResult r = approx_reach_test(spec, vec2(1, 0), vec2(0, 2), 1e-2, 100000, 0);
  double replay = 1e300;
  if (r.witness) {
    replay = (simulate(spec, *r.witness, vec2(1, 0)).endpoint() - vec2(0, 2)).norm();
  }
  o.note("reach hit after " + std::to_string(r.schedules_tried) + " schedules, replay distance " +
         fmt("%.2e", replay));
  o.require(r.hit && replay <= 1e-2, "reach (0,2)");

  ControlSchedule hand;
  hand.segments = {{1, std::log(2.0)}, {0, std::numbers::pi / 2}};
  const double hand_err = (simulate(spec, hand, vec2(1, 0)).endpoint() - vec2(0, 2)).norm();
  o.note("hand schedule error " + fmt("%.2e", hand_err));
  o.require(hand_err <= 1e-10, "hand schedule");
  return o;
}

// --- 5: no system is both certified and covered ------------------------------
Outcome consistency_harness() {
  Outcome o;
  std::vector<SystemSpec> systems;
  for (const std::string& name : builtin_names()) systems.push_back(builtin_corpus(name));
  for (int k = 0; k < 50; ++k) systems.push_back(random_system(2 + k % 2, 2, 9000 + k));
  DecisionBudgets budgets;
  budgets.sample_when_certified = true;
  int conflicts = 0, certified = 0, covered = 0, undetermined = 0;
  for (const SystemSpec& s : systems) {
    const Verdict v = decide_controllability(s, budgets);
    const bool cert = v.conclusion == Conclusion::kNotControllable && v.certificate.has_value();
    const bool cov = v.coverage && v.coverage->fraction >= 0.99;
    certified += cert;
    covered += cov;
    undetermined += v.conclusion == Conclusion::kUndetermined;
    if (cert && cov) {
      ++conflicts;
      o.note("conflict: " + s.name());
    }
  }
  o.note(std::to_string(systems.size()) + " systems, " + std::to_string(certified) +
         " certified, " + std::to_string(covered) + " covered, " +
         std::to_string(undetermined) + " undetermined, " + std::to_string(conflicts) +
         " conflicts");
  o.require(conflicts == 0, "conflicts");
  return o;
}

// --- 6: first-return map on the reference foliations -------------------------
Outcome first_return_mechanism() {
  Outcome o;
  const Vector pole = Vector::Unit(3, 2);
  const PhiConstancy sphere = phi_constancy(sphere_foliation(3), 64, 0, 1e-6);
  double antipode = 0.0;
  for (const Vector& p : sphere.p_thetas) antipode = std::max(antipode, (p + pole).norm());
  o.note("sphere max deviation " + fmt("%.2e", sphere.max_deviation) + ", max |p_theta + p| " +
         fmt("%.2e", antipode));
  o.require(sphere.max_deviation <= 1e-6 && antipode <= 1e-6, "sphere");

  // Leaf value log r - 0.3 u_3 is conserved from u_3 = 1 to u_3 = -1.
  const double expected = std::exp(-2 * 0.3);
  const RadialDistribution graph = foliation_example("radial_graph_h03", 3);
  const PhiConstancy g = phi_constancy(graph, 64, 0, 1e-6);
  double worst = 0.0;
  for (double v : g.values) worst = std::max(worst, std::abs(v - expected));
  o.note("radial graph |p_theta| " + fmt("%.8f", g.mean) + " vs " + fmt("%.8f", expected) +
         " (max error " + fmt("%.1e", worst) + ")");
  o.require(g.constant && worst <= 1e-5, "radial graph");

  const ArcFamily sa = arc_family(sphere_foliation(3), 64, 64, 0);
  const ArcFamily ga = arc_family(graph, 64, 64, 0);
  const double tangency =
      std::max({sphere.max_tangency_residual, g.max_tangency_residual,
                sa.max_tangency_residual, ga.max_tangency_residual});
  o.note("max arc tangency residual " + fmt("%.1e", tangency));
  o.require(tangency <= 1e-8, "tangency");
  return o;
}

// --- 7: the planar example with a flat bump ---------------------------------
Outcome flat_bump_example() {
  Outcome o;
  const SystemSpec spec = builtin_corpus("example1");
  const PointCloud below = sample_attainable(spec, vec2(0, -1), 10000, 0);
  double closest = 1e300;
  for (std::size_t i = 0; i < below.size(); ++i) {
    closest = std::min(closest, (below[i] - vec2(0, -2)).norm());
  }
  o.note("closest approach to (0,-2) " + fmt("%.4f", closest) + " over " +
         std::to_string(below.size()) + " states");
  o.require(closest > 0.5, "never within 0.5 of (0,-2)");

  double drift = 0.0;
  for (double y : {0.0, -0.5, -1.0, -2.0, -5.0}) {
    for (int field : {2, 3}) {
      ControlSchedule s;
      s.segments = {{field, 10.0}};
      drift = std::max(drift, (simulate(spec, s, vec2(0, y)).endpoint() - vec2(0, y)).norm());
    }
  }
  o.note("horizontal flows on the lower axis drift " + fmt("%.1e", drift));
  o.require(drift <= 1e-8, "fixed points");

  GridOptions annulus;
  annulus.radial_bins = 1;
  annulus.r_min = 0.5;
  annulus.r_max = 2.0;
  const PointCloud above = sample_attainable(spec, vec2(0, 1), 10000, 0);
  const CoverageReport cov = coverage(above, CoverageGrid(2, annulus));
  o.note("angular coverage of the unit annulus from (0,1) " + fmt("%.3f", cov.fraction));
  o.require(cov.fraction >= 0.5, "angular coverage");
  return o;
}

// --- 8: exact simulation ----------------------------------------------------
Outcome simulation_exactness() {
  Outcome o;
  std::mt19937_64 rng(88);
  std::uniform_real_distribution<double> dur(0.0, 3.0);
  std::uniform_int_distribution<int> pick2(0, 1), pick3(0, 2);
  double worst = 0.0;
  const MatrixFamily planar = builtin_corpus("planar_jd").family();
  const MatrixFamily so3 = builtin_corpus("so3").family();
  for (int trial = 0; trial < 200; ++trial) {
    ControlSchedule s2, s3;
    oracle::Matrix p2 = oracle::Matrix::Identity(2, 2), p3 = oracle::Matrix::Identity(3, 3);
    for (int k = 0; k < 8; ++k) {
      const double t = dur(rng);
      const int i = pick2(rng);
      s2.segments.push_back({i, t});
      oracle::Matrix step = oracle::rotation(t);
      if (i == 1) step = Eigen::Vector2d(std::exp(t), std::exp(-t)).asDiagonal();
      p2 = step * p2;
      const int a = pick3(rng);
      s3.segments.push_back({a, t});
      p3 = oracle::axis_rotation(a, t) * p3;
    }
    const Vector x2 = oracle::random_unit(2, rng), x3 = oracle::random_unit(3, rng);
    const Vector e2 = p2 * x2, e3 = p3 * x3;
    worst = std::max(worst, (simulate_bilinear(planar, s2, x2).endpoint() - e2).norm() / e2.norm());
    worst = std::max(worst, (simulate_bilinear(so3, s3, x3).endpoint() - e3).norm() / e3.norm());
  }
  o.note("closed-form relative error " + fmt("%.1e", worst));
  o.require(worst <= 1e-12, "closed-form products");

  double drift = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 4;
    MatrixFamily f{{oracle::random_skew(n, rng), oracle::random_skew(n, rng)}, {}};
    if (n == 3 && trial % 2 == 0) f = so3;
    ControlSchedule s;
    double total = 0.0;
    while (total < 100.0) {
      const double t = std::min(dur(rng), 100.0 - total);
      s.segments.push_back({pick2(rng), t});
      total += t;
    }
    const Vector x0 = oracle::random_unit(n, rng);
    for (const Vector& x : simulate_bilinear(f, s, x0).states) {
      drift = std::max(drift, std::abs(x.norm() - 1.0));
    }
  }
  o.note("skew norm drift over time 100 " + fmt("%.1e", drift));
  o.require(drift <= 1e-9, "norm conservation");
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "lie closure oracle", 1.0, closure_oracle},
      {2, "larc/transversality duality", 10.0, transversality_duality},
      {3, "certificate soundness", 30.0, certificate_soundness},
      {4, "empirical controllability", 60.0, planar_empirical},
      {5, "certificate/coverage consistency", 600.0, consistency_harness},
      {6, "first-return mechanism", 60.0, first_return_mechanism},
      {7, "flat-bump planar example", 120.0, flat_bump_example},
      {8, "simulation exactness", 5.0, simulation_exactness},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail += std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(seconds < c.limit_seconds, "runtime");
    failures += !o.pass;
    std::printf("criterion %d %s: %s (%.2fs, limit %.0fs) %s\n", c.id, c.name,
                o.pass ? "PASS" : "FAIL", seconds, c.limit_seconds, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
