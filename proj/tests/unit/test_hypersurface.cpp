#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "wulfflab/anisotropy.hpp"
#include "wulfflab/catalog.hpp"
#include "wulfflab/errors.hpp"
#include "wulfflab/hypersurface.hpp"
#include "wulfflab/wulff_geometry.hpp"

using namespace wulfflab;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Vec v3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

ImmersionPatch graph_plane() {
  ChartBox box{v2(-1, -1), v2(1, 1)};
  return ImmersionPatch::from_position(3, 2, box, [](const Vec& p) { return v3(p[0], p[1], 0.0); });
}

// Unit sphere in spherical coordinates, position only.
ImmersionPatch unit_sphere(int orientation) {
  ChartBox box{v2(0.2, 0.0), v2(std::numbers::pi - 0.2, 2 * std::numbers::pi)};
  auto pos = [](const Vec& p) {
    return v3(std::sin(p[0]) * std::cos(p[1]), std::sin(p[0]) * std::sin(p[1]), std::cos(p[0]));
  };
  // x_theta x x_phi points outward, so orientation +1 is outward.
  return ImmersionPatch::from_position(3, 2, box, pos, orientation);
}

}  // namespace

TEST(FrameAt, GraphPlane) {
  const Frame f = frame_at(graph_plane(), v2(0.3, -0.2));
  EXPECT_LT((f.nu - v3(0, 0, 1)).norm(), 1e-12);
  EXPECT_LT((f.metric - Mat::Identity(2, 2)).norm(), 1e-9);
}

TEST(FrameAt, SphereOutwardNormalIsPosition) {
  const ImmersionPatch s = unit_sphere(1);
  for (const Vec& p : s.grid(5)) {
    const Frame f = frame_at(s, p);
    EXPECT_LT((f.nu - f.x).norm(), 1e-9);
  }
}

TEST(FrameAt, HelicoidMetric) {
  const ImmersionPatch h = helicoid_patch(2.0);
  for (double t : {-1.5, 0.0, 0.7}) {
    const Frame f = frame_at(h, v2(0.4, t));
    Mat expect = Mat::Zero(2, 2);
    expect(0, 0) = 1 + t * t;
    expect(1, 1) = 1;
    EXPECT_LT((f.metric - expect).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(FrameAt, RankDeficientChart) {
  ChartBox box{v2(-1, -1), v2(1, 1)};
  const ImmersionPatch bad =
      ImmersionPatch::from_position(3, 2, box, [](const Vec& p) { return v3(p[0], p[0], 0.0); });
  try {
    frame_at(bad, v2(0.1, 0.1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::RankDeficient);
  }
}

TEST(ShapeOperator, PlaneIsZero) { EXPECT_LT(shape_operator(graph_plane(), v2(0.1, 0.2)).norm(), 1e-8); }

TEST(ShapeOperator, OutwardUnitSphereIsMinusIdentity) {
  const Mat w = shape_operator(unit_sphere(1), v2(1.0, 2.0));
  EXPECT_LT((w + Mat::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(FWeingarten, IsotropicEqualsShapeOperator) {
  const auto f = AnisotropyFunction::isotropic(3);
  const ImmersionPatch h = helicoid_patch(2.0);
  const Vec p = v2(0.3, 1.1);
  EXPECT_LT((f_weingarten(f, h, p) - shape_operator(h, p)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(FWeingarten, PhiRouteAgrees) {
  const auto f = AnisotropyFunction::quadratic_norm(v3(1, 2, 4));
  const ImmersionPatch h = helicoid_patch(2.0);
  for (const Vec& p : h.grid(4)) {
    const WeingartenCrossCheck c = f_weingarten_cross_check(f, h, p);
    EXPECT_LT(c.max_abs_diff, 1e-6);
  }
}

TEST(Curvatures, IsotropicSphereUmbilic) {
  const auto f = AnisotropyFunction::isotropic(3);
  const CurvatureSpectrum s = anisotropic_curvatures(f, unit_sphere(1), v2(1.2, 0.4));
  EXPECT_EQ(s.g(), 1);
  EXPECT_NEAR(s.lambdas[0], -1.0, 1e-6);
  EXPECT_NEAR(s.lambdas[1], -1.0, 1e-6);
}

TEST(Curvatures, WulffPatchUmbilicForAnyF) {
  const auto f = AnisotropyFunction::quadratic_norm(v3(1, 1, 4));
  const ImmersionPatch w = wulff_patch(f);
  for (const Vec& p : w.grid(6)) {
    const CurvatureSpectrum s = anisotropic_curvatures(f, w, p);
    EXPECT_EQ(s.g(), 1);
    EXPECT_LT((s.lambdas.array() + 1.0).abs().maxCoeff(), 1e-12);
    EXPECT_NEAR(s.mean, -1.0, 1e-12);
  }
}

TEST(Curvatures, HelicoidClassicalValues) {
  const auto f = AnisotropyFunction::isotropic(3);
  const ImmersionPatch h = helicoid_patch(2.0);
  for (double t : {-2.0, -0.5, 0.0, 1.0, 1.7}) {
    const Vec k = classical_curvatures(h, v2(0.2, t));
    const double expect = 1.0 / (1.0 + t * t);
    EXPECT_NEAR(k[0], expect, 1e-12);
    EXPECT_NEAR(k[1], -expect, 1e-12);
    const CurvatureSpectrum s = anisotropic_curvatures(f, h, v2(0.2, t));
    EXPECT_NEAR(s.lambdas[0], expect, 1e-12);
  }
}

TEST(Curvatures, SymmetrisedSpectrumMatchesDirectEigenvalues) {
  const auto f = AnisotropyFunction::axisymmetric(3, {1.0, 0.05});
  const ImmersionPatch h = helicoid_patch(2.0);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> s(-3.0, 3.0), t(-2.0, 2.0);
  for (int i = 0; i < 50; ++i) {
    const PointGeometry geo = geometry_at(h, v2(s(rng), t(rng)));
    Eigen::EigenSolver<Mat> es(f_weingarten(f, geo));
    std::vector<double> ev{es.eigenvalues()[0].real(), es.eigenvalues()[1].real()};
    std::sort(ev.rbegin(), ev.rend());
    const Vec sym = symmetrized_shape(f, geo).lambdas;
    EXPECT_NEAR(sym[0], ev[0], 1e-12);
    EXPECT_NEAR(sym[1], ev[1], 1e-12);
  }
}

TEST(Curvatures, EigenframeIsEigenbasisOfS) {
  const auto f = AnisotropyFunction::quadratic_norm(v3(1, 2, 4));
  const ImmersionPatch h = helicoid_patch(2.0);
  const PointGeometry geo = geometry_at(h, v2(0.5, 0.8));
  const CurvatureSpectrum s = anisotropic_curvatures(f, geo);
  const Mat sf = f_weingarten(f, geo);
  for (int i = 0; i < 2; ++i) {
    const Vec e = s.eigenframe.col(i);
    EXPECT_LT((sf * e - s.lambdas[i] * e).norm(), 1e-12);
    EXPECT_NEAR((geo.dx * e).norm(), 1.0, 1e-12);
  }
}

TEST(Curvatures, ProductMeanIsKOverNT) {
  const auto f = AnisotropyFunction::axisymmetric(4, {1.0, 0.05});
  for (int k : {1, 2}) {
    const ImmersionPatch p = product_immersion(f, coordinate_subsphere(4, k), 0.5);
    const Vec q = 0.5 * (p.domain().lo + p.domain().hi);
    EXPECT_NEAR(anisotropic_mean(f, p, q), k / (3 * 0.5), 1e-12);
  }
}

TEST(Curvatures, MeanPhiRouteAgrees) {
  const auto f = AnisotropyFunction::quadratic_norm(v3(1, 2, 4));
  const ImmersionPatch h = helicoid_patch(2.0);
  const Vec p = v2(-0.4, 0.9);
  EXPECT_NEAR(anisotropic_mean(f, h, p), anisotropic_mean_phi_route(f, h, p), 1e-7);
}

TEST(Curvatures, PlaneMeanIsZero) {
  const auto f = AnisotropyFunction::quadratic_norm(v3(1, 2, 4));
  EXPECT_NEAR(anisotropic_mean(f, hyperplane_patch(3), v2(0.1, 0.1)), 0.0, 1e-14);
}

TEST(Curvatures, OrientationFlipNegatesSpectrum) {
  const auto f = AnisotropyFunction::axisymmetric(3, {1.0, 0.05});
  const ImmersionPatch w = wulff_patch(f);
  const Vec p = 0.5 * (w.domain().lo + w.domain().hi);
  // F is even, so flipping nu flips the sign of every curvature.
  EXPECT_NEAR(anisotropic_curvatures(f, w.flipped(), p).lambdas[0], 1.0, 1e-12);
}

TEST(Curvatures, HomothetyScalesInversely) {
  const auto f = AnisotropyFunction::axisymmetric(3, {1.0, 0.05});
  const ImmersionPatch w = wulff_patch(f).scaled(2.0);
  const Vec p = 0.5 * (w.domain().lo + w.domain().hi);
  EXPECT_NEAR(anisotropic_curvatures(f, w, p).lambdas[0], -0.5, 1e-12);
}

TEST(ClusterValues, GroupsWithinTolerance) {
  Vec v(4);
  v << 2.0, 2.0 + 1e-9, 0.0, -1.0;
  std::sort(v.data(), v.data() + 4, std::greater<>());
  const auto g = cluster_values(v, 1e-6);
  ASSERT_EQ(g.size(), 3u);
  EXPECT_EQ(g[0].multiplicity, 2);
}

TEST(CurvatureReport, CsvHeader) {
  const auto f = AnisotropyFunction::isotropic(3);
  const ImmersionPatch h = helicoid_patch(2.0);
  std::ostringstream out;
  write_curvature_csv(out, curvature_batch(f, h, h.grid(3)));
  const std::string s = out.str();
  EXPECT_EQ(s.rfind("# wulfflab curvature-report v1\n", 0), 0u);
  EXPECT_NE(s.find("lambda1,lambda2,H_F,g"), std::string::npos);
}
