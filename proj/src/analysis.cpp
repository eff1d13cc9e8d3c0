#include "bilinctl/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bilinctl/errors.hpp"
#include "bilinctl/sampling.hpp"

namespace bilinctl {

namespace {

void require_point(const LieBasis& basis, const Vector& x) {
  if (x.size() != basis.n) {
    throw InvalidInput("point has wrong dimension");
  }
  if (!x.allFinite() || x.norm() == 0.0) {
    throw InvalidInput("point must be finite and nonzero");
  }
}

LieBasis closure_of(const SystemSpec& spec, double tol) {
  const auto& m = spec.family().matrices;
  return lie_closure(m, tol);
}

Matrix evaluation_matrix(const LieBasis& basis, const Vector& x, bool append_radial) {
  const int cols = basis.dim() + (append_radial ? 1 : 0);
  Matrix e(basis.n, cols);
  for (int k = 0; k < basis.dim(); ++k) {
    e.col(k) = basis.basis[k] * x;
  }
  if (append_radial) {
    e.col(cols - 1) = x;
  }
  return e;
}

struct SigmaEval {
  double sigma_n = 0.0;
  double sigma_max = 0.0;
  Vector gradient;  // Euclidean gradient of sigma_n with respect to x
};

SigmaEval sigma_n_at(const LieBasis& basis, const Vector& x, bool append_radial) {
  const int n = basis.n;
  const Matrix e = evaluation_matrix(basis, x, append_radial);
  SigmaEval out;
  out.gradient = Vector::Zero(n);
  if (e.cols() == 0) {
    return out;
  }
  Eigen::JacobiSVD<Matrix> svd(e, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  out.sigma_max = s(0);
  if (e.cols() < n) {
    return out;  // rank < n everywhere, sigma_n is identically zero
  }
  out.sigma_n = s(n - 1);
  const Vector u = svd.matrixU().col(n - 1);
  const Vector v = svd.matrixV().col(n - 1);
  for (int k = 0; k < basis.dim(); ++k) {
    out.gradient += v(k) * (basis.basis[k].transpose() * u);
  }
  if (append_radial) {
    out.gradient += v(e.cols() - 1) * u;
  }
  return out;
}

struct DescentResult {
  Vector x;
  SigmaEval eval;
  bool converged = false;
};

// Projected gradient descent with Armijo backtracking on the unit sphere.
DescentResult descend(const LieBasis& basis, Vector x, bool append_radial) {
  constexpr int kMaxIterations = 300;
  DescentResult r;
  SigmaEval f = sigma_n_at(basis, x, append_radial);
  double step = 0.5;
  for (int it = 0; it < kMaxIterations; ++it) {
    const double floor = 1e-15 * std::max(f.sigma_max, 1e-300);
    Vector g = f.gradient - f.gradient.dot(x) * x;
    const double g2 = g.squaredNorm();
    if (f.sigma_n <= floor || std::sqrt(g2) <= 1e-12 * std::max(f.sigma_max, 1e-300)) {
      r.converged = true;
      break;
    }
    bool accepted = false;
    step = std::min(step * 2.0, 1.0);
    while (step > 1e-14) {
      Vector trial = (x - step * g).normalized();
      SigmaEval ft = sigma_n_at(basis, trial, append_radial);
      if (ft.sigma_n <= f.sigma_n - 1e-4 * step * g2) {
        x = std::move(trial);
        f = std::move(ft);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      r.converged = true;  // no descent direction left at this resolution
      break;
    }
  }
  r.x = std::move(x);
  r.eval = std::move(f);
  return r;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  Rng rng = stream_rng(seed, tag);
  return rng();
}

}  // namespace

LarcResult larc_at(const LieBasis& basis, const Vector& x) {
  require_point(basis, x);
  const SubspaceReport r = evaluate_at(basis, x);
  return {r.dim == basis.n, r.dim};
}

LarcResult larc_at(const SystemSpec& spec, const Vector& x, double tol) {
  return larc_at(closure_of(spec, tol), x);
}

bool transversality_at(const LieBasis& basis, const Vector& x) {
  require_point(basis, x);
  return numerical_rank(evaluation_matrix(basis, x, true), basis.tol) == basis.n;
}

bool transversality_at(const SystemSpec& spec, const Vector& x, double tol) {
  return transversality_at(closure_of(spec, tol), x);
}

RankSearchResult min_rank_search(const LieBasis& basis, int restarts, std::uint64_t seed,
                                 bool append_radial) {
  if (restarts < 1) {
    throw InvalidInput("min_rank_search: restarts must be at least 1");
  }
  RankSearchResult out;
  out.augmented = append_radial;
  out.min_sigma = std::numeric_limits<double>::infinity();
  for (const Vector& start : random_unit_vectors(basis.n, restarts, seed)) {
    DescentResult d = descend(basis, start, append_radial);
    out.restart_minima.push_back(d.eval.sigma_n);
    if (!d.converged) {
      ++out.unconverged_restarts;
    }
    if (d.eval.sigma_n < out.min_sigma) {
      out.min_sigma = d.eval.sigma_n;
      out.sigma_max = d.eval.sigma_max;
      out.argmin = d.x;
    }
  }
  return out;
}

RankSearchResult min_rank_search(const SystemSpec& spec, int restarts, std::uint64_t seed,
                                 double tol) {
  return min_rank_search(closure_of(spec, tol), restarts, seed, false);
}

std::optional<MonotoneNormCertificate> monotone_norm_certificate(
    const MatrixFamily& family) {
  MonotoneNormCertificate cert;
  bool all_zero = true;
  bool all_psd = true;
  bool all_nsd = true;
  for (const Matrix& m : family.matrices) {
    const Matrix sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
    const Vector& ev = eig.eigenvalues();
    cert.symmetric_eigenvalues.push_back(ev);
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      all_zero = all_zero && std::abs(ev(i)) <= kSemidefiniteSlack;
      all_psd = all_psd && ev(i) >= -kSemidefiniteSlack;
      all_nsd = all_nsd && ev(i) <= kSemidefiniteSlack;
    }
  }
  if (all_zero) {
    cert.direction = NormDirection::kConstant;
  } else if (all_psd) {
    cert.direction = NormDirection::kNondecreasing;
  } else if (all_nsd) {
    cert.direction = NormDirection::kNonincreasing;
  } else {
    return std::nullopt;
  }
  return cert;
}

AngularReport angular_accessibility(const LieBasis& basis, int samples,
                                    std::uint64_t seed, int restarts) {
  if (samples < 1) {
    throw InvalidInput("angular_accessibility: samples must be at least 1");
  }
  AngularReport report;
  for (const Vector& x : random_unit_vectors(basis.n, samples, seed)) {
    Vector s;
    const int rank = numerical_rank(evaluation_matrix(basis, x, true), basis.tol, &s);
    if (rank < basis.n) {
      report.status = Angular::kInaccessible;
      report.witness = x;
      report.witness_rank = rank;
      report.min_sigma = s.size() >= basis.n ? s(basis.n - 1) : 0.0;
      report.sigma_max = s.size() > 0 ? s(0) : 0.0;
      return report;
    }
  }
  const RankSearchResult search =
      min_rank_search(basis, restarts, derive_seed(seed, 1), true);
  report.min_sigma = search.min_sigma;
  report.sigma_max = search.sigma_max;
  const int rank = numerical_rank(evaluation_matrix(basis, search.argmin, true), basis.tol);
  if (rank < basis.n) {
    report.status = Angular::kInaccessible;
    report.witness = search.argmin;
    report.witness_rank = rank;
  } else {
    report.status = Angular::kAccessible;
  }
  return report;
}

AngularReport angular_accessibility(const SystemSpec& spec, int samples,
                                    std::uint64_t seed, double tol) {
  return angular_accessibility(closure_of(spec, tol), samples, seed);
}

std::vector<int> orbit_dimension_profile(const LieBasis& basis, int samples,
                                         std::uint64_t seed) {
  if (samples < 1) {
    throw InvalidInput("orbit_dimension_profile: samples must be at least 1");
  }
  std::vector<int> dims;
  dims.reserve(samples);
  for (const Vector& x : random_unit_vectors(basis.n, samples, seed)) {
    dims.push_back(evaluate_at(basis, x).dim);
  }
  return dims;
}

std::vector<int> orbit_dimension_profile(const SystemSpec& spec, int samples,
                                         std::uint64_t seed, double tol) {
  return orbit_dimension_profile(closure_of(spec, tol), samples, seed);
}

namespace {

void attach_coverage(const SystemSpec& spec, const DecisionBudgets& budgets,
                     Verdict& verdict) {
  const Vector x0 = budgets.x0.value_or(Vector::Unit(spec.n(), 0));
  const PointCloud cloud = sample_attainable(spec, x0, budgets.reach_budget,
                                             derive_seed(budgets.seed, 4), budgets.sampler);
  verdict.discarded_samples = cloud.discarded;
  verdict.coverage = coverage(cloud, CoverageGrid(spec.n(), budgets.grid));
}

bool covered(const Verdict& v, double threshold) {
  return v.coverage && v.coverage->fraction >= threshold;
}

}  // namespace

Verdict decide_controllability(const SystemSpec& spec, const DecisionBudgets& budgets) {
  if (budgets.samples < 1 || budgets.reach_budget < 1 || budgets.restarts < 1) {
    throw InvalidInput("decide_controllability: budgets must be positive");
  }
  if (!(budgets.tol > 0.0) || !(budgets.coverage_threshold > 0.0) ||
      budgets.coverage_threshold > 1.0) {
    throw InvalidInput("decide_controllability: invalid tolerance or threshold");
  }
  if (budgets.x0 && budgets.x0->size() != spec.n()) {
    throw InvalidInput("decide_controllability: x0 has wrong dimension");
  }
  Verdict v;
  v.system = spec.name();
  v.n = spec.n();

  if (!spec.is_bilinear()) {
    v.diagnostics.push_back(
        "smooth family: closure and certificates skipped, coverage evidence only");
    attach_coverage(spec, budgets, v);
    if (covered(v, budgets.coverage_threshold)) {
      v.conclusion = Conclusion::kControllable;
      v.empirical = true;
    } else {
      v.conclusion = Conclusion::kUndetermined;
      v.diagnostics.push_back("coverage below threshold");
    }
    return v;
  }

  const LieBasis basis = lie_closure(spec.family().matrices, budgets.tol);
  v.lie_dim = basis.dim();
  v.closure_converged = basis.converged;
  v.closure_depth = basis.depth;
  v.orbit_dim_profile = orbit_dimension_profile(basis, budgets.samples,
                                                derive_seed(budgets.seed, 1));
  v.angular = angular_accessibility(basis, budgets.samples, derive_seed(budgets.seed, 2),
                                    budgets.restarts);

  const auto monotone = monotone_norm_certificate(spec.family());

  if (!basis.converged) {
    v.diagnostics.push_back("Lie closure hit the round cap before closing");
    if (monotone) {
      v.conclusion = Conclusion::kNotControllable;
      v.certificate = *monotone;
    } else {
      v.conclusion = Conclusion::kUndetermined;
    }
    if (budgets.sample_when_certified || !monotone) {
      attach_coverage(spec, budgets, v);
    }
    return v;
  }

  // Rank drop anywhere on the sphere: cheap check on the profile samples first,
  // then a multistart search for the thin algebraic rank-drop sets.
  std::optional<LarcFailure> failure;
  const std::vector<Vector> probes =
      random_unit_vectors(spec.n(), budgets.samples, derive_seed(budgets.seed, 1));
  for (std::size_t k = 0; k < probes.size(); ++k) {
    if (v.orbit_dim_profile[k] < spec.n()) {
      const SubspaceReport r = evaluate_at(basis, probes[k]);
      failure = LarcFailure{probes[k], r.dim,
                            r.singular_values.size() >= spec.n()
                                ? r.singular_values(spec.n() - 1)
                                : 0.0,
                            r.singular_values.size() > 0 ? r.singular_values(0) : 0.0};
      break;
    }
  }
  RankSearchResult search =
      min_rank_search(basis, budgets.restarts, derive_seed(budgets.seed, 3));
  if (search.unconverged_restarts > 0) {
    v.diagnostics.push_back("rank search: " + std::to_string(search.unconverged_restarts) +
                            " restarts hit the iteration cap");
  }
  if (!failure) {
    const SubspaceReport r = evaluate_at(basis, search.argmin);
    if (r.dim < spec.n()) {
      failure = LarcFailure{search.argmin, r.dim, search.min_sigma, search.sigma_max};
    }
  }
  v.rank_search = std::move(search);

  if (failure) {
    v.conclusion = Conclusion::kNotControllable;
    v.certificate = *failure;
  } else if (monotone) {
    v.conclusion = Conclusion::kNotControllable;
    v.certificate = *monotone;
  }

  if (v.conclusion == Conclusion::kNotControllable) {
    if (budgets.sample_when_certified) {
      attach_coverage(spec, budgets, v);
    }
    return v;
  }

  attach_coverage(spec, budgets, v);
  if (covered(v, budgets.coverage_threshold)) {
    v.conclusion = Conclusion::kControllable;
    v.empirical = true;
    const bool full = std::all_of(v.orbit_dim_profile.begin(), v.orbit_dim_profile.end(),
                                  [&](int d) { return d == spec.n(); });
    if (!full) {
      v.diagnostics.push_back("coverage evidence but orbit dimension not constantly n");
    }
  } else {
    v.conclusion = Conclusion::kUndetermined;
    v.diagnostics.push_back("no certificate found and coverage below threshold");
  }
  return v;
}

const char* to_string(Conclusion c) {
  switch (c) {
    case Conclusion::kControllable:
      return "Controllable";
    case Conclusion::kNotControllable:
      return "NotControllable";
    case Conclusion::kUndetermined:
      return "Undetermined";
  }
  return "?";
}

const char* to_string(NormDirection d) {
  switch (d) {
    case NormDirection::kNondecreasing:
      return "nondecreasing";
    case NormDirection::kNonincreasing:
      return "nonincreasing";
    case NormDirection::kConstant:
      return "constant";
  }
  return "?";
}

const char* to_string(Angular a) {
  switch (a) {
    case Angular::kAccessible:
      return "accessible";
    case Angular::kInaccessible:
      return "inaccessible";
    case Angular::kUnknown:
      return "unknown";
  }
  return "?";
}

}  // namespace bilinctl
