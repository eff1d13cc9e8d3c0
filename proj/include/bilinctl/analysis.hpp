#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bilinctl/matlie.hpp"
#include "bilinctl/model.hpp"
#include "bilinctl/reach.hpp"

namespace bilinctl {

struct LarcResult {
  bool holds = false;
  int dim = 0;
};

/// Lie algebra rank condition at x: dim of Lie(M) evaluated at x equals n.
LarcResult larc_at(const LieBasis& basis, const Vector& x);
LarcResult larc_at(const SystemSpec& spec, const Vector& x, double tol = kDefaultRankTol);

/// Whether span{L x} + R x = R^n.
bool transversality_at(const LieBasis& basis, const Vector& x);
bool transversality_at(const SystemSpec& spec, const Vector& x,
                       double tol = kDefaultRankTol);

/// Smallest n-th singular value of the evaluation matrix [L_1 x ... L_d x]
/// (optionally with x appended) over the unit sphere, found by multistart
/// projected descent.
struct RankSearchResult {
  double min_sigma = 0.0;
  double sigma_max = 0.0;  // largest singular value at the argmin
  Vector argmin;
  std::vector<double> restart_minima;
  int unconverged_restarts = 0;
  bool augmented = false;

  /// min_sigma <= tol * sigma_max, i.e. a rank-drop witness.
  bool rank_drop(double tol) const { return min_sigma <= tol * sigma_max; }
};

RankSearchResult min_rank_search(const LieBasis& basis, int restarts, std::uint64_t seed,
                                 bool append_radial = false);
RankSearchResult min_rank_search(const SystemSpec& spec, int restarts, std::uint64_t seed,
                                 double tol = kDefaultRankTol);

enum class NormDirection { kNondecreasing, kNonincreasing, kConstant };

/// All symmetric parts share a semidefinite sign, so |x(t)| is monotone on
/// every trajectory. Eigenvalues are kept so the claim can be re-checked.
struct MonotoneNormCertificate {
  NormDirection direction = NormDirection::kConstant;
  std::vector<Vector> symmetric_eigenvalues;
};

inline constexpr double kSemidefiniteSlack = 1e-12;

std::optional<MonotoneNormCertificate> monotone_norm_certificate(
    const MatrixFamily& family);

enum class Angular { kAccessible, kInaccessible, kUnknown };

struct AngularReport {
  Angular status = Angular::kUnknown;
  std::optional<Vector> witness;  // unit point where rank [Lx | x] < n
  int witness_rank = 0;
  double min_sigma = 0.0;
  double sigma_max = 0.0;
};

/// Transversality at seeded sphere samples plus a rank search on the
/// radially augmented evaluation matrix.
AngularReport angular_accessibility(const LieBasis& basis, int samples,
                                    std::uint64_t seed, int restarts = 16);
AngularReport angular_accessibility(const SystemSpec& spec, int samples,
                                    std::uint64_t seed, double tol = kDefaultRankTol);

/// Evaluated Lie algebra dimension at seeded random unit points.
std::vector<int> orbit_dimension_profile(const LieBasis& basis, int samples,
                                         std::uint64_t seed);
std::vector<int> orbit_dimension_profile(const SystemSpec& spec, int samples,
                                         std::uint64_t seed, double tol = kDefaultRankTol);

struct DecisionBudgets {
  int samples = 10000;
  int reach_budget = 100000;
  double coverage_threshold = 0.99;
  double tol = kDefaultRankTol;
  std::uint64_t seed = 0;
  int restarts = 16;
  GridOptions grid;
  SamplerOptions sampler;
  std::optional<Vector> x0;  // defaults to e1
  // Also sample the attainable set when a certificate was already found, so
  // the verdict carries both (consistency harness).
  bool sample_when_certified = false;
};

struct LarcFailure {
  Vector x;
  int dim = 0;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
};

using Certificate = std::variant<LarcFailure, MonotoneNormCertificate>;

enum class Conclusion { kControllable, kNotControllable, kUndetermined };

struct Verdict {
  std::string system;
  int n = 0;
  Conclusion conclusion = Conclusion::kUndetermined;
  std::optional<Certificate> certificate;
  std::optional<CoverageReport> coverage;
  bool empirical = false;  // Controllable verdicts rest on coverage evidence
  int lie_dim = -1;        // -1 for smooth systems
  bool closure_converged = false;
  int closure_depth = 0;
  std::vector<int> orbit_dim_profile;
  AngularReport angular;
  std::optional<RankSearchResult> rank_search;
  int discarded_samples = 0;
  std::vector<std::string> diagnostics;
};

/// Closure, rank-drop search, monotone-norm check, then attainable-set
/// coverage. Certificates refute controllability; coverage above threshold
/// yields an empirical Controllable verdict; anything else is Undetermined.
Verdict decide_controllability(const SystemSpec& spec, const DecisionBudgets& budgets);

const char* to_string(Conclusion c);
const char* to_string(NormDirection d);
const char* to_string(Angular a);

}  // namespace bilinctl
