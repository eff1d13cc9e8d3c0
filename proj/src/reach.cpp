#include "bilinctl/reach.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include <boost/numeric/odeint.hpp>

#include "bilinctl/errors.hpp"
#include "bilinctl/sampling.hpp"

namespace bilinctl {

namespace odeint = boost::numeric::odeint;

namespace {

void check_start(const Vector& x0, int n) {
  if (x0.size() != n) {
    throw InvalidInput("initial state has wrong dimension");
  }
  if (!x0.allFinite() || x0.norm() == 0.0) {
    throw InvalidInput("initial state must be finite and nonzero");
  }
}

TrajectoryStatus classify(const Vector& x, bool check_degenerate) {
  if (!x.allFinite()) {
    return TrajectoryStatus::kBlowUp;
  }
  const double r = x.norm();
  if (r > 1e300) {
    return TrajectoryStatus::kBlowUp;
  }
  if (check_degenerate && r < kDegenerateNorm) {
    return TrajectoryStatus::kDegenerate;
  }
  return TrajectoryStatus::kOk;
}

// Endpoint only, no bookkeeping; used by the samplers.
std::optional<Vector> bilinear_endpoint(const MatrixFamily& family,
                                        const ControlSchedule& schedule, Vector x) {
  for (const Segment& s : schedule.segments) {
    x = matrix_exponential(family.matrices[s.index], s.duration) * x;
    if (classify(x, true) != TrajectoryStatus::kOk) {
      return std::nullopt;
    }
  }
  return x;
}

using OdeState = std::vector<double>;

struct AbortIntegration {};

}  // namespace

Trajectory simulate_bilinear(const MatrixFamily& family, const ControlSchedule& schedule,
                             const Vector& x0, double sample_interval) {
  const int n = family.dimension();
  check_start(x0, n);
  schedule.validate(static_cast<int>(family.matrices.size()));

  Trajectory traj;
  traj.schedule = schedule;
  traj.times.push_back(0.0);
  traj.states.push_back(x0);

  double t = 0.0;
  Vector x = x0;
  for (const Segment& s : schedule.segments) {
    const Matrix& m = family.matrices[s.index];
    const double span = std::abs(s.duration);
    if (sample_interval > 0.0 && span > sample_interval) {
      const double direction = s.duration < 0.0 ? -1.0 : 1.0;
      const Matrix step = matrix_exponential(m, direction * sample_interval);
      Vector y = x;
      for (double tau = sample_interval; tau < span; tau += sample_interval) {
        y = step * y;
        traj.times.push_back(t + tau);
        traj.states.push_back(y);
      }
    }
    x = matrix_exponential(m, s.duration) * x;
    t += span;
    traj.times.push_back(t);
    traj.states.push_back(x);
    traj.status = classify(x, true);
    if (traj.status != TrajectoryStatus::kOk) {
      break;
    }
  }
  return traj;
}

Trajectory simulate_smooth(const SystemSpec& spec, const ControlSchedule& schedule,
                           const Vector& x0, double step_tol, double sample_interval) {
  const int n = spec.n();
  if (x0.size() != n || !x0.allFinite()) {
    throw InvalidInput("initial state must be finite with dimension n");
  }
  const SmoothFamily& family = spec.smooth_family();
  if (family.homogeneous && x0.norm() == 0.0) {
    throw InvalidInput("initial state must be nonzero");
  }
  if (!(step_tol > 0.0)) {
    throw InvalidInput("step_tol must be positive");
  }
  schedule.validate(static_cast<int>(family.fields.size()));

  Trajectory traj;
  traj.schedule = schedule;
  traj.times.push_back(0.0);
  traj.states.push_back(x0);

  OdeState state(x0.data(), x0.data() + n);
  double t_offset = 0.0;
  for (const Segment& s : schedule.segments) {
    const VectorField& field = family.fields[s.index];
    auto rhs = [&](const OdeState& y, OdeState& dy, double /*t*/) {
      const Vector v = field(Eigen::Map<const Vector>(y.data(), n));
      if (v.size() != n || !v.allFinite()) {
        throw AbortIntegration{};
      }
      std::copy(v.data(), v.data() + n, dy.begin());
    };
    const double sign = s.duration < 0.0 ? -1.0 : 1.0;
    const double segment_start = t_offset;
    auto observer = [&](const OdeState& y, double t) {
      const Eigen::Map<const Vector> x(y.data(), n);
      if (!x.allFinite() || x.norm() > kBlowUpNorm) {
        throw AbortIntegration{};
      }
      if (sample_interval > 0.0 && t != 0.0 && std::abs(t) < std::abs(s.duration)) {
        traj.times.push_back(segment_start + std::abs(t));
        traj.states.push_back(x);
      }
    };
    try {
      if (s.duration != 0.0) {
        auto stepper = odeint::make_controlled(step_tol, step_tol,
                                               odeint::runge_kutta_dopri5<OdeState>());
        const double dt0 = sign * std::min(0.01, std::abs(s.duration));
        if (sample_interval > 0.0) {
          std::vector<double> grid;
          for (double tau = 0.0; tau < std::abs(s.duration); tau += sample_interval) {
            grid.push_back(sign * tau);
          }
          grid.push_back(s.duration);
          odeint::integrate_times(stepper, rhs, state, grid.begin(), grid.end(), dt0,
                                  observer);
        } else {
          odeint::integrate_adaptive(stepper, rhs, state, 0.0, s.duration, dt0, observer);
        }
      }
    } catch (const AbortIntegration&) {
      traj.status = TrajectoryStatus::kBlowUp;
    } catch (const odeint::odeint_error&) {
      traj.status = TrajectoryStatus::kBlowUp;
    }
    t_offset += std::abs(s.duration);
    const Eigen::Map<const Vector> x(state.data(), n);
    traj.times.push_back(t_offset);
    traj.states.push_back(x);
    if (traj.status == TrajectoryStatus::kOk) {
      traj.status = classify(x, family.homogeneous);
      if (traj.status == TrajectoryStatus::kOk && x.norm() > kBlowUpNorm) {
        traj.status = TrajectoryStatus::kBlowUp;
      }
    }
    if (traj.status != TrajectoryStatus::kOk) {
      break;
    }
  }
  return traj;
}

Trajectory simulate(const SystemSpec& spec, const ControlSchedule& schedule,
                    const Vector& x0, double step_tol) {
  if (spec.is_bilinear()) {
    return simulate_bilinear(spec.family(), schedule, x0);
  }
  return simulate_smooth(spec, schedule, x0, step_tol);
}

ControlSchedule random_schedule(int field_count, const SamplerOptions& options,
                                std::uint64_t seed, std::uint64_t index) {
  if (field_count < 1 || options.max_segments < 1 || !(options.duration_scale > 0.0)) {
    throw InvalidInput("random_schedule: invalid sampler options");
  }
  Rng rng = stream_rng(seed, index);
  std::uniform_int_distribution<int> count(1, options.max_segments);
  std::uniform_int_distribution<int> pick(0, field_count - 1);
  std::exponential_distribution<double> duration(1.0 / options.duration_scale);
  std::bernoulli_distribution flip(0.5);

  ControlSchedule schedule;
  schedule.mode = options.mode;
  const int segments = count(rng);
  schedule.segments.reserve(segments);
  for (int k = 0; k < segments; ++k) {
    Segment s;
    s.index = pick(rng);
    s.duration = duration(rng);
    if (options.mode == ScheduleMode::kOrbit && flip(rng)) {
      s.duration = -s.duration;
    }
    schedule.segments.push_back(s);
  }
  return schedule;
}

void PointCloud::push_back(const Vector& p) {
  if (p.size() != n_) {
    throw InvalidInput("point cloud: point has wrong dimension");
  }
  data_.insert(data_.end(), p.data(), p.data() + n_);
}

namespace {

// Records the states of one bilinear schedule into `cloud`. Returns false
// when the run degenerated.
bool record_bilinear(const MatrixFamily& family, const ControlSchedule& schedule,
                     const Vector& x0, int points_per_segment, PointCloud& cloud) {
  Vector x = x0;
  if (points_per_segment == 0) {
    std::optional<Vector> end = bilinear_endpoint(family, schedule, x0);
    if (end) {
      cloud.push_back(*end);
    }
    return end.has_value();
  }
  for (const Segment& s : schedule.segments) {
    const Matrix step =
        matrix_exponential(family.matrices[s.index], s.duration / points_per_segment);
    for (int k = 0; k < points_per_segment; ++k) {
      x = step * x;
      if (classify(x, true) != TrajectoryStatus::kOk) {
        return false;
      }
      cloud.push_back(x);
    }
  }
  return true;
}

bool record_smooth(const SystemSpec& spec, const ControlSchedule& schedule, const Vector& x0,
                   const SamplerOptions& options, PointCloud& cloud) {
  ControlSchedule refined;
  refined.mode = schedule.mode;
  const int split = std::max(options.points_per_segment, 1);
  for (const Segment& s : schedule.segments) {
    for (int k = 0; k < split; ++k) {
      refined.segments.push_back({s.index, s.duration / split});
    }
  }
  const Trajectory traj = simulate_smooth(spec, refined, x0, options.step_tol);
  const bool ok = traj.status == TrajectoryStatus::kOk;
  if (options.points_per_segment == 0) {
    if (ok) {
      cloud.push_back(traj.endpoint());
    }
    return ok;
  }
  // Boundary states before an abort are still attained.
  const std::size_t usable = ok ? traj.states.size() : traj.states.size() - 1;
  for (std::size_t k = 1; k < usable; ++k) {
    cloud.push_back(traj.states[k]);
  }
  return ok;
}

}  // namespace

PointCloud sample_attainable(const SystemSpec& spec, const Vector& x0, int budget,
                             std::uint64_t seed, const SamplerOptions& options) {
  if (budget < 1) {
    throw InvalidInput("sample_attainable: budget must be at least 1");
  }
  if (options.points_per_segment < 0) {
    throw InvalidInput("sample_attainable: points_per_segment must be non-negative");
  }
  if (spec.is_bilinear() || spec.smooth_family().homogeneous) {
    check_start(x0, spec.n());
  } else if (x0.size() != spec.n() || !x0.allFinite()) {
    throw InvalidInput("initial state must be finite with dimension n");
  }
  PointCloud cloud(spec.n());
  const std::size_t per_schedule =
      options.points_per_segment == 0
          ? 1
          : static_cast<std::size_t>(options.points_per_segment) * (options.max_segments + 1) / 2;
  cloud.reserve(static_cast<std::size_t>(budget) * per_schedule);
  for (int k = 0; k < budget; ++k) {
    const ControlSchedule schedule =
        random_schedule(spec.field_count(), options, seed, static_cast<std::uint64_t>(k));
    const bool ok =
        spec.is_bilinear()
            ? record_bilinear(spec.family(), schedule, x0, options.points_per_segment, cloud)
            : record_smooth(spec, schedule, x0, options, cloud);
    ++cloud.schedules;
    if (!ok) {
      ++cloud.discarded;
    }
  }
  return cloud;
}

namespace {

// Divisor of `cells` closest to sqrt(cells / 2), preferring the smaller.
int choose_bands(int cells) {
  const double ideal = std::sqrt(cells / 2.0);
  int best = 1;
  for (int d = 1; d <= cells; ++d) {
    if (cells % d == 0 && std::abs(d - ideal) < std::abs(best - ideal)) {
      best = d;
    }
  }
  return best;
}

int clamp_index(double fraction, int count) {
  const int k = static_cast<int>(std::floor(fraction * count));
  return std::clamp(k, 0, count - 1);
}

}  // namespace

CoverageGrid::CoverageGrid(int n, GridOptions options) : n_(n), options_(options) {
  if (n < 1) {
    throw InvalidInput("coverage grid: n must be positive");
  }
  if (options_.angular_cells < 1 || options_.radial_bins < 1) {
    throw InvalidInput("coverage grid: resolution must be at least 1");
  }
  if (!(options_.r_min > 0.0) || !(options_.r_max > options_.r_min)) {
    throw InvalidInput("coverage grid: need 0 < r_min < r_max");
  }
  if (n == 1) {
    angular_total_ = options_.antipodal_quotient ? 1 : 2;
  } else {
    angular_total_ = options_.angular_cells;
  }
  if (n == 3) {
    bands_ = choose_bands(angular_total_);
    sectors_ = angular_total_ / bands_;
  }
  if (n > 3) {
    centres_ = low_discrepancy_sphere(n, angular_total_, options_.seed);
  }
}

int CoverageGrid::angular_cell(const Vector& x) const {
  if (x.size() != n_) {
    throw InvalidInput("coverage grid: point has wrong dimension");
  }
  const bool projective = options_.antipodal_quotient;
  if (n_ == 1) {
    return projective || x(0) > 0.0 ? 0 : 1;
  }
  if (n_ == 2) {
    double angle = std::atan2(x(1), x(0));  // (-pi, pi]
    if (projective) {
      if (angle < 0.0) {
        angle += std::numbers::pi;
      }
      return clamp_index(angle / std::numbers::pi, angular_total_);
    }
    return clamp_index((angle + std::numbers::pi) / (2.0 * std::numbers::pi),
                       angular_total_);
  }
  if (n_ == 3) {
    Vector u = x.normalized();
    if (projective && u(2) < 0.0) {
      u = -u;
    }
    const double z_lo = projective ? 0.0 : -1.0;
    const int band = clamp_index((u(2) - z_lo) / (1.0 - z_lo), bands_);
    const double lon = std::atan2(u(1), u(0));
    const int sector =
        clamp_index((lon + std::numbers::pi) / (2.0 * std::numbers::pi), sectors_);
    return band * sectors_ + sector;
  }
  int best = 0;
  double best_dot = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < angular_total_; ++k) {
    double d = centres_[k].dot(x);
    if (projective) {
      d = std::abs(d);
    }
    if (d > best_dot) {
      best_dot = d;
      best = k;
    }
  }
  return best;
}

std::optional<int> CoverageGrid::radial_bin(double radius) const {
  if (!(radius >= options_.r_min) || !(radius <= options_.r_max)) {
    return std::nullopt;
  }
  const double lo = std::log(options_.r_min);
  const double hi = std::log(options_.r_max);
  return clamp_index((std::log(radius) - lo) / (hi - lo), options_.radial_bins);
}

std::optional<int> CoverageGrid::cell_of(const Vector& x) const {
  const std::optional<int> bin = radial_bin(x.norm());
  if (!bin) {
    return std::nullopt;
  }
  return *bin * angular_total_ + angular_cell(x);
}

CoverageReport coverage(const PointCloud& cloud, const CoverageGrid& grid) {
  if (cloud.n() != grid.n()) {
    throw InvalidInput("coverage: cloud and grid dimensions differ");
  }
  CoverageReport report;
  report.n = grid.n();
  report.grid = grid.options();
  report.total_cells = grid.total_cells();
  report.hits.assign(report.total_cells, false);
  report.points = static_cast<int>(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (const std::optional<int> cell = grid.cell_of(cloud[i])) {
      ++report.points_in_annulus;
      if (!report.hits[*cell]) {
        report.hits[*cell] = true;
        ++report.hit_cells;
      }
    }
  }
  report.fraction = static_cast<double>(report.hit_cells) / report.total_cells;
  return report;
}

namespace {

// Dense scan of one bilinear schedule. Returns the truncated schedule whose
// endpoint is within eps of the target, if any.
std::optional<ControlSchedule> scan_bilinear(const MatrixFamily& family,
                                             const ControlSchedule& schedule,
                                             const Vector& x0, const Vector& target,
                                             double eps, double& best) {
  constexpr long kMaxSubsteps = 20000;
  Vector x = x0;
  best = std::min(best, (x - target).norm());
  if ((x - target).norm() <= eps) {
    return ControlSchedule{{}, schedule.mode};
  }
  for (std::size_t s = 0; s < schedule.segments.size(); ++s) {
    const Segment& seg = schedule.segments[s];
    const Matrix& m = family.matrices[seg.index];
    const double span = std::abs(seg.duration);
    const double speed = m.norm();
    // |x(tau) - x(tau')| <= speed * max|x| * |tau - tau'| along the segment.
    const double max_norm = x.norm() * std::exp(speed * span);
    long substeps = static_cast<long>(std::ceil(4.0 * speed * max_norm * span / eps));
    substeps = std::clamp(substeps, 1L, kMaxSubsteps);
    const double h = seg.duration / static_cast<double>(substeps);
    const Matrix step = matrix_exponential(m, h);
    Vector y = x;
    for (long k = 1; k <= substeps; ++k) {
      y = step * y;
      const double d = (y - target).norm();
      best = std::min(best, d);
      if (d <= eps) {
        ControlSchedule witness;
        witness.mode = schedule.mode;
        witness.segments.assign(schedule.segments.begin(),
                                schedule.segments.begin() + static_cast<long>(s));
        witness.segments.push_back({seg.index, static_cast<double>(k) * h});
        return witness;
      }
    }
    x = matrix_exponential(m, seg.duration) * x;
    if (classify(x, true) != TrajectoryStatus::kOk) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

}  // namespace

ReachResult approx_reach_test(const SystemSpec& spec, const Vector& x0,
                              const Vector& target, double eps, int budget,
                              std::uint64_t seed, const SamplerOptions& options) {
  if (!(eps > 0.0)) {
    throw InvalidInput("approx_reach_test: eps must be positive");
  }
  if (target.size() != spec.n() || !target.allFinite() || target.norm() == 0.0) {
    throw InvalidInput("approx_reach_test: target must be finite and nonzero");
  }
  if (budget < 1) {
    throw InvalidInput("approx_reach_test: budget must be at least 1");
  }
  if (spec.is_bilinear()) {
    check_start(x0, spec.n());
  }
  ReachResult result;
  result.best_distance = std::numeric_limits<double>::infinity();
  for (int k = 0; k < budget; ++k) {
    const ControlSchedule schedule =
        random_schedule(spec.field_count(), options, seed, static_cast<std::uint64_t>(k));
    ++result.schedules_tried;
    std::optional<ControlSchedule> candidate;
    if (spec.is_bilinear()) {
      candidate = scan_bilinear(spec.family(), schedule, x0, target, eps,
                                result.best_distance);
    } else {
      const Trajectory traj = simulate_smooth(spec, schedule, x0, options.step_tol);
      for (std::size_t s = 0; s < traj.states.size(); ++s) {
        const double d = (traj.states[s] - target).norm();
        result.best_distance = std::min(result.best_distance, d);
        if (d <= eps) {
          ControlSchedule prefix;
          prefix.mode = schedule.mode;
          prefix.segments.assign(schedule.segments.begin(),
                                 schedule.segments.begin() + static_cast<long>(s));
          candidate = prefix;
          break;
        }
      }
    }
    if (!candidate) {
      continue;
    }
    const Trajectory replay = simulate(spec, *candidate, x0, options.step_tol);
    if (replay.status == TrajectoryStatus::kOk &&
        (replay.endpoint() - target).norm() <= eps) {
      result.hit = true;
      result.witness = std::move(candidate);
      result.best_distance = (replay.endpoint() - target).norm();
      return result;
    }
  }
  return result;
}

void write_cloud_csv(std::ostream& out, const PointCloud& cloud) {
  const auto old_precision = out.precision(17);
  for (std::size_t k = 0; k < cloud.size(); ++k) {
    const auto p = cloud[k];
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      if (i > 0) {
        out << ',';
      }
      out << p(i);
    }
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace bilinctl
