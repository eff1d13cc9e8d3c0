#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "bilinctl/errors.hpp"
#include "bilinctl/foliation.hpp"

namespace bilinctl {
namespace {

Vector unit(int n, int i) { return Vector::Unit(n, i); }

// Leaf of the radial graph through p = e_n has log r - <c, u> = -c_n; on the
// opposite ray u = -e_n, so r = exp(-2 c_n).
double radial_graph_return_radius(double c_n) { return std::exp(-2.0 * c_n); }

TEST(Distribution, SphereNormalIsRadial) {
  const RadialDistribution s = sphere_foliation(3);
  Vector x(3);
  x << 1.0, -2.0, 0.5;
  EXPECT_TRUE(s.normal_at(x).isApprox(x.normalized()));
  EXPECT_NEAR(s.transversality(x), 1.0, 1e-15);
  EXPECT_THROW(s.normal_at(Vector::Zero(3)), InvalidInput);
}

TEST(Distribution, RadialGraphIsTransversal) {
  const RadialDistribution g = foliation_example("radial_graph_tilted", 4);
  Vector x(4);
  x << 0.3, -1.0, 2.0, 0.7;
  EXPECT_GT(g.transversality(x), 0.1);
  EXPECT_NEAR(g.normal_at(x).norm(), 1.0, 1e-12);
  ASSERT_TRUE(g.has_leaf_value());
  // Leaf value is constant along rays shifted by the homogeneity of log r.
  EXPECT_NEAR(*g.leaf_value(2.0 * x) - *g.leaf_value(x), std::log(2.0), 1e-12);
}

TEST(Distribution, UnknownExampleThrows) {
  EXPECT_THROW(foliation_example("torus", 3), InvalidInput);
  EXPECT_THROW(sphere_foliation(1), InvalidInput);
}

TEST(LineField, PointsTowardThetaAtPole) {
  const PlanarSection sec = PlanarSection::make(unit(3, 0));
  const Vector v = leaf_line_field(sphere_foliation(3), sec, unit(3, 2));
  EXPECT_TRUE(v.isApprox(unit(3, 0)));
  // At x = theta it points towards -p.
  const Vector w = leaf_line_field(sphere_foliation(3), sec, unit(3, 0));
  EXPECT_TRUE(w.isApprox(-unit(3, 2)));
  EXPECT_THROW(leaf_line_field(sphere_foliation(3), sec, unit(3, 1)), InvalidInput);
}

TEST(LineField, TangentAndInPlane) {
  const RadialDistribution g = foliation_example("radial_graph_h03", 3);
  Vector theta(3);
  theta << std::sqrt(0.5), std::sqrt(0.5), 0.0;
  const PlanarSection sec = PlanarSection::make(theta);
  for (double a : {0.1, 1.0, 2.0, 3.0}) {
    const Vector x = sec.embed(std::cos(a), std::sin(a));
    const Vector v = leaf_line_field(g, sec, x);
    EXPECT_NEAR(v.norm(), 1.0, 1e-12);
    EXPECT_NEAR(v.dot(g.normal_at(x)), 0.0, 1e-12);
    const Vector in_plane = sec.pole * sec.pole.dot(v) + sec.theta * sec.theta.dot(v);
    EXPECT_LE((v - in_plane).norm(), 1e-12);
  }
}

TEST(LineField, RadialTangencyIsDegenerate) {
  // Normal orthogonal to x everywhere: rays lie in the leaves.
  NormalField f;
  f.normal = [](const Vector& x) {
    Vector n(3);
    n << -x(2), 0.0, x(0);
    return n;
  };
  const RadialDistribution bad("rays", 3, f);
  const PlanarSection sec = PlanarSection::make(unit(3, 0));
  try {
    leaf_line_field(bad, sec, unit(3, 2));
    FAIL();
  } catch (const FoliationError& e) {
    EXPECT_EQ(e.kind(), FoliationError::Kind::kDegenerateSection);
  }
}

TEST(FirstReturn, SphereHalfCircle) {
  const PlanarSection sec = PlanarSection::make(unit(3, 1));
  const FirstReturnResult r = first_return(sphere_foliation(3), sec);
  EXPECT_LE((r.p_theta + unit(3, 2)).norm(), 1e-9);
  EXPECT_NEAR(r.length, std::numbers::pi, 1e-8);
  EXPECT_NEAR(r.winding, std::numbers::pi, 1e-8);
  EXPECT_LE(r.max_tangency_residual, 1e-8);
  EXPECT_LE(r.max_planarity_residual, 1e-12);
  EXPECT_LE(r.max_leaf_drift, 1e-8);
  // The arc stays on the unit circle and leaves p towards +theta.
  for (const Vector& x : r.arc) EXPECT_NEAR(x.norm(), 1.0, 1e-8);
  ASSERT_GE(r.arc.size(), 2u);
  EXPECT_GT(r.arc[1].dot(unit(3, 1)), 0.0);
}

TEST(FirstReturn, RadialGraphClosedForm) {
  const RadialDistribution g = foliation_example("radial_graph_h03", 3);
  const FirstReturnResult r = first_return(g, PlanarSection::make(unit(3, 0)));
  EXPECT_NEAR(r.p_theta.norm(), radial_graph_return_radius(0.3), 1e-8);
  EXPECT_LE((r.p_theta.normalized() + unit(3, 2)).norm(), 1e-9);
  EXPECT_LE(r.max_leaf_drift, 1e-8);
}

TEST(FirstReturn, HomogeneousInStartScale) {
  const RadialDistribution g = foliation_example("radial_graph_tilted", 3);
  const PlanarSection sec = PlanarSection::make(unit(3, 0));
  FirstReturnOptions opts;
  const Vector base = first_return(g, sec, opts).p_theta;
  opts.start_scale = 3.0;
  const Vector scaled = first_return(g, sec, opts).p_theta;
  EXPECT_LE((scaled - 3.0 * base).norm(), 1e-8 * scaled.norm());
}

TEST(FirstReturn, UniformResampling) {
  FirstReturnOptions opts;
  opts.uniform_samples = 10;
  const FirstReturnResult r =
      first_return(sphere_foliation(3), PlanarSection::make(unit(3, 0)), opts);
  ASSERT_EQ(r.arc.size(), 11u);
  for (std::size_t k = 1; k < r.arc_lengths.size(); ++k) {
    EXPECT_NEAR(r.arc_lengths[k] - r.arc_lengths[k - 1], std::numbers::pi / 10, 1e-8);
  }
}

TEST(Theta, SamplesLieOnEquatorialSphere) {
  for (int n : {3, 4, 6}) {
    const auto thetas = theta_samples(n, 17, 3);
    ASSERT_EQ(thetas.size(), 17u);
    for (const Vector& t : thetas) {
      EXPECT_NEAR(t.norm(), 1.0, 1e-12);
      EXPECT_EQ(t(n - 1), 0.0);
    }
  }
  EXPECT_THROW(theta_samples(2, 4, 0), InvalidInput);
}

TEST(Phi, SphereIsAntipodalMap) {
  const PhiConstancy phi = phi_constancy(sphere_foliation(4), 12, 1, 1e-6);
  EXPECT_TRUE(phi.constant);
  EXPECT_LE(phi.max_deviation, 1e-6);
  for (const Vector& p : phi.p_thetas) {
    EXPECT_LE((p + unit(4, 3)).norm(), 1e-8);
  }
}

TEST(Phi, TiltedGraphIsConstant) {
  const PhiConstancy phi = phi_constancy(foliation_example("radial_graph_tilted", 3), 16, 2, 1e-6);
  EXPECT_TRUE(phi.constant);
  EXPECT_NEAR(phi.mean, radial_graph_return_radius(0.3), 1e-7);
}

TEST(Phi, Preconditions) {
  EXPECT_THROW(phi_constancy(sphere_foliation(2), 8, 0, 1e-6), InvalidInput);
  EXPECT_THROW(phi_constancy(sphere_foliation(3), 1, 0, 1e-6), InvalidInput);
}

TEST(OrbitFoliation, So3OrbitsAreSpheres) {
  const RadialDistribution o = orbit_foliation(builtin_corpus("so3"));
  const FirstReturnResult r = first_return(o, PlanarSection::make(unit(3, 0)));
  EXPECT_LE((r.p_theta + unit(3, 2)).norm(), 1e-8);
  EXPECT_THROW(orbit_foliation(builtin_corpus("planar_jd")), InvalidInput);
  EXPECT_THROW(orbit_foliation(builtin_corpus("identity_only")), InvalidInput);
}

TEST(Arcs, SphereFamilyCloses) {
  const ArcFamily fam = arc_family(sphere_foliation(3), 8, 32, 0);
  EXPECT_TRUE(fam.closed);
  EXPECT_EQ(fam.arcs.size(), 8u);
  EXPECT_EQ(fam.arcs.front().size(), 32u);
  EXPECT_LE(fam.endpoint_mismatch, 1e-8);
  EXPECT_NEAR(fam.min_norm, 1.0, 1e-8);
  EXPECT_NEAR(fam.max_norm, 1.0, 1e-8);
  EXPECT_LE((fam.phi_point + unit(3, 2)).norm(), 1e-8);
}

TEST(Arcs, PlanarCaseUsesBothDirections) {
  const ArcFamily fam = arc_family(foliation_example("radial_graph_h03", 2), 2, 16);
  ASSERT_EQ(fam.arcs.size(), 2u);
  EXPECT_TRUE(fam.closed);
  EXPECT_NEAR(fam.phi_point.norm(), radial_graph_return_radius(0.3), 1e-7);
}

TEST(Arcs, CsvRows) {
  const ArcFamily fam = arc_family(sphere_foliation(3), 2, 3, 0);
  std::ostringstream out;
  write_arcs_csv(out, fam);
  const std::string text = out.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 6);
  EXPECT_EQ(text.rfind("0,0,", 0), 0u);
}

}  // namespace
}  // namespace bilinctl
