#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "bilinctl/matlie.hpp"
#include "bilinctl/model.hpp"

namespace bilinctl {

enum class TrajectoryStatus {
  kOk,
  kDegenerate,  // state norm fell below 1e-300
  kBlowUp,      // state norm exceeded the blow-up threshold or went non-finite
};

/// States at segment boundaries (plus optional dense samples). Aborted runs
/// keep the partial path and carry a non-ok status.
struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  ControlSchedule schedule;
  TrajectoryStatus status = TrajectoryStatus::kOk;

  const Vector& endpoint() const { return states.back(); }
};

inline constexpr double kDegenerateNorm = 1e-300;
inline constexpr double kBlowUpNorm = 1e12;

/// Exact piecewise-constant flow exp(t_k M_k) ... exp(t_1 M_1) x0.
/// `sample_interval` > 0 adds states every that much time inside segments.
Trajectory simulate_bilinear(const MatrixFamily& family,
                             const ControlSchedule& schedule, const Vector& x0,
                             double sample_interval = 0.0);

/// Adaptive Dormand-Prince integration of the switched ODE.
Trajectory simulate_smooth(const SystemSpec& spec, const ControlSchedule& schedule,
                           const Vector& x0, double step_tol = 1e-10,
                           double sample_interval = 0.0);

/// Dispatches on the kind of `spec`.
Trajectory simulate(const SystemSpec& spec, const ControlSchedule& schedule,
                    const Vector& x0, double step_tol = 1e-10);

/// Random schedule distribution: segment count uniform in
/// [1, max_segments], field indices uniform, durations exponential with
/// mean duration_scale (random sign in orbit mode).
///
/// Each schedule contributes `points_per_segment` states per segment, at
/// evenly spaced times ending with the segment end; every one of them is
/// the endpoint of a truncated schedule. Zero keeps only the final
/// endpoint of each schedule.
struct SamplerOptions {
  int max_segments = 8;
  double duration_scale = 1.0;
  int points_per_segment = 4;
  ScheduleMode mode = ScheduleMode::kAttainable;
  double step_tol = 1e-10;  // smooth systems only
};

/// Schedule number `index` of the seeded stream.
ControlSchedule random_schedule(int field_count, const SamplerOptions& options,
                                std::uint64_t seed, std::uint64_t index);

/// Points of R^n stored contiguously.
class PointCloud {
 public:
  explicit PointCloud(int n = 0) : n_(n) {}

  int n() const { return n_; }
  std::size_t size() const { return data_.size() / static_cast<std::size_t>(n_); }
  bool empty() const { return data_.empty(); }
  Eigen::Map<const Vector> operator[](std::size_t i) const {
    return Eigen::Map<const Vector>(data_.data() + i * n_, n_);
  }
  void push_back(const Vector& p);
  void reserve(std::size_t points) { data_.reserve(points * n_); }

  int schedules = 0;  // schedules sampled
  int discarded = 0;  // schedules aborted (degenerate or blown up)

 private:
  int n_;
  std::vector<double> data_;
};

/// Attained states of `budget` random schedules started at x0.
PointCloud sample_attainable(const SystemSpec& spec, const Vector& x0, int budget,
                             std::uint64_t seed, const SamplerOptions& options = {});

struct GridOptions {
  int angular_cells = 32;
  int radial_bins = 16;
  double r_min = 0.1;
  double r_max = 10.0;
  bool antipodal_quotient = false;
  std::uint64_t seed = 0;  // cell centres for n > 3
};

/// Partition of the annulus r_min <= |x| <= r_max: angular cells (on the
/// sphere, or the projective space when antipodal_quotient is set) times
/// radial bins uniform in log|x|.
///
/// Angular cells are equal-area for n <= 3 (arcs for n = 2, latitude bands
/// split into longitude sectors for n = 3). For n > 3 they are the
/// nearest-centre regions of a scrambled Halton point set.
class CoverageGrid {
 public:
  CoverageGrid(int n, GridOptions options);

  int n() const { return n_; }
  const GridOptions& options() const { return options_; }
  int angular_total() const { return angular_total_; }
  int total_cells() const { return angular_total_ * options_.radial_bins; }
  int bands() const { return bands_; }

  /// Angular cell of a nonzero vector.
  int angular_cell(const Vector& x) const;
  /// Radial bin, or nullopt outside the annulus.
  std::optional<int> radial_bin(double radius) const;
  /// Full cell index (radial * angular_total + angular), or nullopt outside.
  std::optional<int> cell_of(const Vector& x) const;

 private:
  int n_;
  GridOptions options_;
  int angular_total_ = 0;
  int bands_ = 1;
  int sectors_ = 1;
  std::vector<Vector> centres_;
};

struct CoverageReport {
  int n = 0;
  GridOptions grid;
  int total_cells = 0;
  int hit_cells = 0;
  int points = 0;
  int points_in_annulus = 0;
  double fraction = 0.0;
  std::vector<bool> hits;
};

CoverageReport coverage(const PointCloud& cloud, const CoverageGrid& grid);

struct ReachResult {
  bool hit = false;
  std::optional<ControlSchedule> witness;
  double best_distance = 0.0;
  int schedules_tried = 0;
};

/// Searches random schedules for one whose endpoint lies within eps of the
/// target. Bilinear trajectories are checked densely along each segment and
/// a hit truncates the schedule there; the witness is re-verified by replay.
ReachResult approx_reach_test(const SystemSpec& spec, const Vector& x0,
                              const Vector& target, double eps, int budget,
                              std::uint64_t seed, const SamplerOptions& options = {});

/// One point per row, comma separated.
void write_cloud_csv(std::ostream& out, const PointCloud& cloud);

}  // namespace bilinctl
