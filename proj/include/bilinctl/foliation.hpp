#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bilinctl/errors.hpp"
#include "bilinctl/matlie.hpp"
#include "bilinctl/model.hpp"

namespace bilinctl {

class FoliationError : public NumericalFailure {
 public:
  enum class Kind { kDegenerateSection, kNoReturn, kTangentialCrossing, kEndpointMismatch };

  FoliationError(Kind kind, const std::string& what) : NumericalFailure(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Leaves given as the orthogonal complement of a homogeneous normal field.
struct NormalField {
  std::function<Vector(const Vector&)> normal;
  // Optional function constant on each leaf, used for membership checks.
  std::function<double(const Vector&)> leaf_value;
};

/// Leaves given as orbits of a bilinear family with evaluated rank n - 1.
struct OrbitTangent {
  LieBasis basis;
};

/// Homogeneous codimension-one distribution on R^n \ {0} assumed transversal
/// to the radial direction.
class RadialDistribution {
 public:
  RadialDistribution(std::string name, int n, NormalField field);
  RadialDistribution(std::string name, OrbitTangent tangent);

  const std::string& name() const { return name_; }
  int n() const { return n_; }
  bool has_leaf_value() const;

  /// Unit normal to the leaf through x. Throws FoliationError when the orbit
  /// tangent does not have rank exactly n - 1 at x.
  Vector normal_at(const Vector& x) const;
  /// Leaf-constant value at x, if the source provides one.
  std::optional<double> leaf_value(const Vector& x) const;
  /// |<N(x), x>| / |x| with N the unit normal; zero means radial tangency.
  double transversality(const Vector& x) const;

 private:
  std::string name_;
  int n_;
  std::variant<NormalField, OrbitTangent> source_;
};

/// Leaves are the spheres |x| = const.
RadialDistribution sphere_foliation(int n);

/// Leaves {log|x| = <c, x/|x|> + const}: graphs over the sphere, always
/// transversal to rays.
RadialDistribution radial_graph_foliation(const Vector& coefficients, std::string name = "");

/// Orbit foliation of a bilinear spec whose evaluated Lie algebra has rank
/// n - 1 and is transversal to rays at every probed point.
RadialDistribution orbit_foliation(const SystemSpec& spec, double tol = kDefaultRankTol,
                                   int probes = 64, std::uint64_t seed = 0);

/// sphere, radial_graph_h03 (h = 0.3 sigma_n), radial_graph_tilted
/// (h = 0.3 sigma_n + 0.2 sigma_1), radial_graph_zero.
RadialDistribution foliation_example(std::string_view name, int n);
const std::vector<std::string>& foliation_example_names();

/// The plane span{p, theta}, p = e_n, theta a unit vector in S^{n-2} x {0}.
struct PlanarSection {
  Vector pole;
  Vector theta;

  static PlanarSection make(const Vector& theta);
  Vector embed(double along_pole, double along_theta) const {
    return along_pole * pole + along_theta * theta;
  }
};

/// Unit vector spanning (leaf tangent at x) ∩ span{p, theta}, oriented so
/// that (x, v) is positively oriented in the (p, theta) frame; at x = p it
/// points towards +theta.
Vector leaf_line_field(const RadialDistribution& distr, const PlanarSection& section,
                       const Vector& x, double transversality_tol = 1e-10);

struct FirstReturnOptions {
  double event_tol = 1e-10;
  double integration_tol = 1e-12;
  double arc_length_budget = 100.0;  // in units of the starting radius
  double start_scale = 1.0;          // start at start_scale * p
  int uniform_samples = 0;           // > 0: resample the arc at that many + 1 points
};

struct FirstReturnResult {
  Vector p_theta;
  std::vector<Vector> arc;          // from start to p_theta
  std::vector<double> arc_lengths;  // arc length at each arc point
  double length = 0.0;
  double winding = 0.0;  // accumulated polar angle in the section
  double max_tangency_residual = 0.0;
  double max_planarity_residual = 0.0;
  double max_leaf_drift = 0.0;  // |leaf_value - leaf_value(start)|, if available
};

/// Integrates the unit-speed leaf line field from p until it first meets the
/// ray -R_{>0} p. The crossing is located by bisection on the dense output.
FirstReturnResult first_return(const RadialDistribution& distr, const PlanarSection& section,
                               const FirstReturnOptions& options = {});

struct PhiConstancy {
  std::vector<Vector> thetas;
  std::vector<Vector> p_thetas;
  std::vector<double> values;  // |p_theta|
  double mean = 0.0;
  double max_deviation = 0.0;
  bool constant = false;
  double max_tangency_residual = 0.0;
  double max_leaf_drift = 0.0;
};

/// Quasi-uniform theta samples on S^{n-2}; n >= 3.
std::vector<Vector> theta_samples(int n, int count, std::uint64_t seed);

/// Evaluates theta -> |p_theta| and tests max deviation <= tol * mean.
PhiConstancy phi_constancy(const RadialDistribution& distr, int theta_count,
                           std::uint64_t seed, double tol,
                           const FirstReturnOptions& options = {});

struct ArcFamily {
  std::vector<Vector> thetas;
  std::vector<std::vector<Vector>> arcs;  // each sampled at uniform params in [0, 1]
  Vector phi_point;
  double endpoint_mismatch = 0.0;
  double min_norm = 0.0;
  double max_norm = 0.0;
  double max_tangency_residual = 0.0;
  double max_planarity_residual = 0.0;
  double max_leaf_drift = 0.0;
  bool closed = false;
};

/// The surface S swept by the arcs C_theta. Throws FoliationError when the
/// arcs do not share their end point to within `endpoint_tol` (relative).
ArcFamily arc_family(const RadialDistribution& distr, int theta_count,
                     int points_per_arc = 64, std::uint64_t seed = 0,
                     double endpoint_tol = 1e-6);

/// theta index, arc parameter, coordinates; one row per sample.
void write_arcs_csv(std::ostream& out, const ArcFamily& family);

}  // namespace bilinctl
