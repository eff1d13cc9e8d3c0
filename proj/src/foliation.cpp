#include "bilinctl/foliation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <utility>

#include <boost/numeric/odeint.hpp>

#include "bilinctl/sampling.hpp"

namespace bilinctl {

namespace odeint = boost::numeric::odeint;

RadialDistribution::RadialDistribution(std::string name, int n, NormalField field)
    : name_(std::move(name)), n_(n), source_(std::move(field)) {
  if (n < 2) {
    throw InvalidInput("radial distribution needs n >= 2");
  }
  if (!std::get<NormalField>(source_).normal) {
    throw InvalidInput("radial distribution needs a normal field");
  }
}

RadialDistribution::RadialDistribution(std::string name, OrbitTangent tangent)
    : name_(std::move(name)), n_(tangent.basis.n), source_(std::move(tangent)) {
  if (n_ < 2) {
    throw InvalidInput("radial distribution needs n >= 2");
  }
}

bool RadialDistribution::has_leaf_value() const {
  const auto* f = std::get_if<NormalField>(&source_);
  return f != nullptr && static_cast<bool>(f->leaf_value);
}

Vector RadialDistribution::normal_at(const Vector& x) const {
  if (x.size() != n_ || x.norm() == 0.0) {
    throw InvalidInput("normal_at: point must be nonzero with dimension n");
  }
  if (const auto* f = std::get_if<NormalField>(&source_)) {
    Vector nrm = f->normal(x);
    const double len = nrm.norm();
    if (nrm.size() != n_ || !std::isfinite(len) || len == 0.0) {
      throw FoliationError(FoliationError::Kind::kDegenerateSection,
                           "normal field vanished or is not finite");
    }
    return nrm / len;
  }
  const LieBasis& basis = std::get<OrbitTangent>(source_).basis;
  Matrix e(n_, basis.dim());
  for (int k = 0; k < basis.dim(); ++k) {
    e.col(k) = basis.basis[k] * x;
  }
  Eigen::JacobiSVD<Matrix> svd(e, Eigen::ComputeFullU);
  const Vector& s = svd.singularValues();
  const double cutoff = basis.tol * (s.size() > 0 ? s(0) : 0.0);
  int rank = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    rank += s(k) > cutoff ? 1 : 0;
  }
  if (rank != n_ - 1) {
    throw FoliationError(FoliationError::Kind::kDegenerateSection,
                         "orbit tangent has rank " + std::to_string(rank) + ", expected " +
                             std::to_string(n_ - 1));
  }
  return svd.matrixU().col(n_ - 1);
}

std::optional<double> RadialDistribution::leaf_value(const Vector& x) const {
  if (!has_leaf_value()) {
    return std::nullopt;
  }
  return std::get<NormalField>(source_).leaf_value(x);
}

double RadialDistribution::transversality(const Vector& x) const {
  return std::abs(normal_at(x).dot(x)) / x.norm();
}

RadialDistribution sphere_foliation(int n) {
  NormalField f;
  f.normal = [](const Vector& x) { return Vector(x); };
  f.leaf_value = [](const Vector& x) { return std::log(x.norm()); };
  return RadialDistribution("sphere", n, std::move(f));
}

RadialDistribution radial_graph_foliation(const Vector& coefficients, std::string name) {
  const int n = static_cast<int>(coefficients.size());
  // F(x) = log|x| - <c, x/|x|>, leaves are level sets of F.
  NormalField f;
  f.normal = [c = coefficients](const Vector& x) {
    const double r2 = x.squaredNorm();
    const double r = std::sqrt(r2);
    return Vector(x / r2 - (c / r - c.dot(x) * x / (r2 * r)));
  };
  f.leaf_value = [c = coefficients](const Vector& x) {
    const double r = x.norm();
    return std::log(r) - c.dot(x) / r;
  };
  if (name.empty()) {
    name = "radial_graph";
  }
  return RadialDistribution(std::move(name), n, std::move(f));
}

RadialDistribution orbit_foliation(const SystemSpec& spec, double tol, int probes,
                                   std::uint64_t seed) {
  LieBasis basis = lie_closure(spec.family().matrices, tol);
  if (!basis.converged) {
    throw InvalidInput("orbit_foliation: Lie closure did not converge");
  }
  const int n = spec.n();
  for (const Vector& x : random_unit_vectors(n, std::max(probes, 1), seed)) {
    const SubspaceReport r = evaluate_at(basis, x);
    if (r.dim != n - 1) {
      throw InvalidInput("orbit_foliation: orbits are not of codimension one");
    }
    Matrix aug(n, r.vectors.cols() + 1);
    aug << r.vectors, x;
    if (numerical_rank(aug, tol) != n) {
      throw InvalidInput("orbit_foliation: orbits are not transversal to rays");
    }
  }
  return RadialDistribution(spec.name(), OrbitTangent{std::move(basis)});
}

const std::vector<std::string>& foliation_example_names() {
  static const std::vector<std::string> names = {"sphere", "radial_graph_h03",
                                                 "radial_graph_tilted", "radial_graph_zero"};
  return names;
}

RadialDistribution foliation_example(std::string_view name, int n) {
  if (n < 2) {
    throw InvalidInput("foliation examples need n >= 2");
  }
  if (name == "sphere") {
    return sphere_foliation(n);
  }
  Vector c = Vector::Zero(n);
  if (name == "radial_graph_h03") {
    c(n - 1) = 0.3;
  } else if (name == "radial_graph_tilted") {
    c(n - 1) = 0.3;
    c(0) = 0.2;
  } else if (name != "radial_graph_zero") {
    throw InvalidInput("unknown foliation example '" + std::string(name) + "'");
  }
  return radial_graph_foliation(c, std::string(name));
}

PlanarSection PlanarSection::make(const Vector& theta) {
  const Eigen::Index n = theta.size();
  if (n < 2) {
    throw InvalidInput("planar section needs n >= 2");
  }
  if (std::abs(theta(n - 1)) > 1e-12 || std::abs(theta.norm() - 1.0) > 1e-9) {
    throw InvalidInput("theta must be a unit vector orthogonal to the pole e_n");
  }
  PlanarSection s;
  s.pole = Vector::Unit(n, n - 1);
  s.theta = theta;
  s.theta(n - 1) = 0.0;
  return s;
}

namespace {

// Plane coordinates (along p, along theta) of the oriented line field.
std::array<double, 2> line_field_coords(const RadialDistribution& distr,
                                        const PlanarSection& section, const Vector& x,
                                        double transversality_tol) {
  const Vector nrm = distr.normal_at(x);
  const double radial = nrm.dot(x) / x.norm();
  if (!(std::abs(radial) > transversality_tol)) {
    throw FoliationError(FoliationError::Kind::kDegenerateSection,
                         "leaf tangent contains the radial direction");
  }
  const double np = nrm.dot(section.pole);
  const double nt = nrm.dot(section.theta);
  const double len = std::hypot(np, nt);
  // w = (-nt, np) spans the kernel of N in the plane; det[x, w] = <N, x>.
  const double sign = radial > 0.0 ? 1.0 : -1.0;
  return {-sign * nt / len, sign * np / len};
}

double planarity_residual(const PlanarSection& section, const Vector& x) {
  const Vector in_plane = section.embed(x.dot(section.pole), x.dot(section.theta));
  return (x - in_plane).norm();
}

using PlaneState = std::array<double, 2>;

}  // namespace

Vector leaf_line_field(const RadialDistribution& distr, const PlanarSection& section,
                       const Vector& x, double transversality_tol) {
  if (x.size() != distr.n() || section.pole.size() != distr.n()) {
    throw InvalidInput("leaf_line_field: dimension mismatch");
  }
  const double r = x.norm();
  if (r == 0.0 || !x.allFinite()) {
    throw InvalidInput("leaf_line_field: x must be finite and nonzero");
  }
  if (planarity_residual(section, x) > 1e-9 * r) {
    throw InvalidInput("leaf_line_field: x is not in the section plane");
  }
  const auto w = line_field_coords(distr, section, x, transversality_tol);
  return section.embed(w[0], w[1]);
}

FirstReturnResult first_return(const RadialDistribution& distr, const PlanarSection& section,
                               const FirstReturnOptions& options) {
  if (section.pole.size() != distr.n()) {
    throw InvalidInput("first_return: section dimension mismatch");
  }
  if (!(options.start_scale > 0.0) || !(options.event_tol > 0.0) ||
      !(options.integration_tol > 0.0) || !(options.arc_length_budget > 0.0)) {
    throw InvalidInput("first_return: options must be positive");
  }
  const double scale = options.start_scale;
  const double budget = options.arc_length_budget * scale;
  constexpr double kTransversalityTol = 1e-10;
  constexpr double kTangentialCrossing = 1e-8;

  auto rhs = [&](const PlaneState& y, PlaneState& dy, double /*t*/) {
    const auto w = line_field_coords(distr, section, section.embed(y[0], y[1]),
                                     kTransversalityTol);
    dy = w;
  };
  auto make_stepper = [&]() {
    return odeint::make_dense_output(options.integration_tol, options.integration_tol,
                                     0.05 * scale,
                                     odeint::runge_kutta_dopri5<PlaneState>());
  };

  // First pass: locate the crossing time.
  auto stepper = make_stepper();
  stepper.initialize(PlaneState{scale, 0.0}, 0.0, 1e-3 * scale);

  FirstReturnResult result;
  std::vector<double> times{0.0};
  std::vector<PlaneState> states{PlaneState{scale, 0.0}};
  PlaneState prev_w{0.0, 1.0};
  double winding = 0.0;
  double event_time = -1.0;
  PlaneState event_state{};

  while (true) {
    const auto [t0, t1] = stepper.do_step(rhs);
    const PlaneState y0 = states.back();
    const PlaneState y1 = stepper.current_state();
    PlaneState w1;
    rhs(y1, w1, t1);
    if (prev_w[0] * w1[0] + prev_w[1] * w1[1] <= 0.0) {
      throw FoliationError(FoliationError::Kind::kDegenerateSection,
                           "line field orientation flipped between steps");
    }
    prev_w = w1;
    if (y0[1] > 0.0 && y1[1] <= 0.0 && y1[0] < 0.0) {
      double lo = t0;
      double hi = t1;
      PlaneState mid{};
      while (hi - lo > options.event_tol) {
        const double t = 0.5 * (lo + hi);
        stepper.calc_state(t, mid);
        if (mid[1] > 0.0) {
          lo = t;
        } else {
          hi = t;
        }
      }
      event_time = hi;
      stepper.calc_state(hi, event_state);
      PlaneState w;
      rhs(event_state, w, hi);
      if (std::abs(w[1]) <= kTangentialCrossing) {
        throw FoliationError(FoliationError::Kind::kTangentialCrossing,
                             "leaf curve meets the opposite ray tangentially");
      }
      winding += std::remainder(std::atan2(event_state[1], event_state[0]) -
                                    std::atan2(y0[1], y0[0]),
                                2.0 * std::numbers::pi);
      break;
    }
    winding += std::remainder(std::atan2(y1[1], y1[0]) - std::atan2(y0[1], y0[0]),
                              2.0 * std::numbers::pi);
    times.push_back(t1);
    states.push_back(y1);
    if (t1 > budget) {
      throw FoliationError(FoliationError::Kind::kNoReturn,
                           "no return to the opposite ray within the arc-length budget");
    }
  }
  times.push_back(event_time);
  states.push_back(event_state);

  if (options.uniform_samples > 0) {
    // Second pass with identical steps, sampling at uniform arc length.
    const int k_max = options.uniform_samples;
    std::vector<double> grid(k_max + 1);
    for (int k = 0; k <= k_max; ++k) {
      grid[k] = event_time * static_cast<double>(k) / k_max;
    }
    std::vector<PlaneState> sampled(k_max + 1);
    auto again = make_stepper();
    again.initialize(PlaneState{scale, 0.0}, 0.0, 1e-3 * scale);
    sampled[0] = PlaneState{scale, 0.0};
    int next = 1;
    while (next < k_max) {
      const auto [t0, t1] = again.do_step(rhs);
      (void)t0;
      while (next < k_max && grid[next] <= t1) {
        again.calc_state(grid[next], sampled[next]);
        ++next;
      }
    }
    sampled[k_max] = event_state;
    times = std::move(grid);
    states = std::move(sampled);
  }

  const Vector start = section.embed(scale, 0.0);
  const std::optional<double> start_leaf = distr.leaf_value(start);
  for (std::size_t k = 0; k < states.size(); ++k) {
    const Vector x = section.embed(states[k][0], states[k][1]);
    const auto w = line_field_coords(distr, section, x, kTransversalityTol);
    const Vector v = section.embed(w[0], w[1]);
    const Vector nrm = distr.normal_at(x);
    result.max_tangency_residual = std::max(result.max_tangency_residual, std::abs(nrm.dot(v)));
    result.max_planarity_residual =
        std::max(result.max_planarity_residual, planarity_residual(section, x));
    if (start_leaf) {
      result.max_leaf_drift =
          std::max(result.max_leaf_drift, std::abs(*distr.leaf_value(x) - *start_leaf));
    }
    result.arc.push_back(x);
    result.arc_lengths.push_back(times[k]);
  }
  result.p_theta = result.arc.back();
  result.length = event_time;
  result.winding = winding;
  return result;
}

std::vector<Vector> theta_samples(int n, int count, std::uint64_t seed) {
  if (n < 3) {
    throw InvalidInput("theta samples need n >= 3 (S^{n-2} must be connected)");
  }
  if (count < 1) {
    throw InvalidInput("theta samples: count must be positive");
  }
  std::vector<Vector> thetas;
  thetas.reserve(count);
  if (n == 3) {
    Rng rng = stream_rng(seed, 0);
    const double offset = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    for (int k = 0; k < count; ++k) {
      const double a = 2.0 * std::numbers::pi * (k + offset) / count;
      thetas.push_back(Vector{{std::cos(a), std::sin(a), 0.0}});
    }
    return thetas;
  }
  for (const Vector& u : low_discrepancy_sphere(n - 1, count, seed)) {
    Vector t = Vector::Zero(n);
    t.head(n - 1) = u;
    thetas.push_back(std::move(t));
  }
  return thetas;
}

PhiConstancy phi_constancy(const RadialDistribution& distr, int theta_count,
                           std::uint64_t seed, double tol,
                           const FirstReturnOptions& options) {
  if (distr.n() < 3) {
    throw InvalidInput("phi_constancy: needs n >= 3");
  }
  if (theta_count < 2) {
    throw InvalidInput("phi_constancy: needs at least two theta samples");
  }
  PhiConstancy out;
  out.thetas = theta_samples(distr.n(), theta_count, seed);
  for (std::size_t k = 0; k < out.thetas.size(); ++k) {
    FirstReturnResult r;
    try {
      r = first_return(distr, PlanarSection::make(out.thetas[k]), options);
    } catch (const FoliationError& e) {
      throw FoliationError(e.kind(),
                           "theta sample " + std::to_string(k) + ": " + e.what());
    }
    out.values.push_back(r.p_theta.norm());
    out.p_thetas.push_back(r.p_theta);
    out.max_tangency_residual = std::max(out.max_tangency_residual, r.max_tangency_residual);
    out.max_leaf_drift = std::max(out.max_leaf_drift, r.max_leaf_drift);
  }
  double sum = 0.0;
  for (double v : out.values) {
    sum += v;
  }
  out.mean = sum / static_cast<double>(out.values.size());
  for (double v : out.values) {
    out.max_deviation = std::max(out.max_deviation, std::abs(v - out.mean));
  }
  out.constant = out.max_deviation <= tol * out.mean;
  return out;
}

ArcFamily arc_family(const RadialDistribution& distr, int theta_count, int points_per_arc,
                     std::uint64_t seed, double endpoint_tol) {
  if (points_per_arc < 2) {
    throw InvalidInput("arc_family: need at least two points per arc");
  }
  ArcFamily out;
  if (distr.n() == 2) {
    out.thetas = {Vector{{1.0, 0.0}}, Vector{{-1.0, 0.0}}};
  } else {
    out.thetas = theta_samples(distr.n(), theta_count, seed);
  }
  FirstReturnOptions options;
  options.uniform_samples = points_per_arc - 1;
  out.min_norm = std::numeric_limits<double>::infinity();
  for (const Vector& theta : out.thetas) {
    const PlanarSection section = PlanarSection::make(theta);
    FirstReturnResult r = first_return(distr, section, options);
    out.max_tangency_residual = std::max(out.max_tangency_residual, r.max_tangency_residual);
    out.max_planarity_residual =
        std::max(out.max_planarity_residual, r.max_planarity_residual);
    out.max_leaf_drift = std::max(out.max_leaf_drift, r.max_leaf_drift);
    for (const Vector& x : r.arc) {
      out.min_norm = std::min(out.min_norm, x.norm());
      out.max_norm = std::max(out.max_norm, x.norm());
    }
    if (out.arcs.empty()) {
      out.phi_point = r.p_theta;
    }
    out.endpoint_mismatch = std::max(out.endpoint_mismatch, (r.p_theta - out.phi_point).norm());
    out.arcs.push_back(std::move(r.arc));
  }
  if (out.endpoint_mismatch > endpoint_tol * out.phi_point.norm()) {
    throw FoliationError(FoliationError::Kind::kEndpointMismatch,
                         "arcs do not share their end point (mismatch " +
                             std::to_string(out.endpoint_mismatch) + ")");
  }
  out.closed = std::isfinite(out.max_norm) && out.min_norm > 0.0;
  return out;
}

void write_arcs_csv(std::ostream& out, const ArcFamily& family) {
  const auto old_precision = out.precision(17);
  for (std::size_t a = 0; a < family.arcs.size(); ++a) {
    const auto& arc = family.arcs[a];
    for (std::size_t k = 0; k < arc.size(); ++k) {
      out << a << ',' << static_cast<double>(k) / static_cast<double>(arc.size() - 1);
      for (Eigen::Index i = 0; i < arc[k].size(); ++i) {
        out << ',' << arc[k](i);
      }
      out << '\n';
    }
  }
  out.precision(old_precision);
}

}  // namespace bilinctl
