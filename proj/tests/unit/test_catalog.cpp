#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "wulfflab/anisotropy.hpp"
#include "wulfflab/catalog.hpp"
#include "wulfflab/errors.hpp"
#include "wulfflab/hypersurface.hpp"
#include "wulfflab/sphere_grid.hpp"

using namespace wulfflab;

namespace {

Vec v3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

}  // namespace

TEST(BuiltinAnisotropies, AllAudited) {
  for (int d : {3, 4}) {
    const auto list = builtin_anisotropies(d);
    ASSERT_EQ(list.size(), 3u);
    for (const auto& a : list) EXPECT_TRUE(convexity_audit(a.anisotropy, 16).pass) << a.name;
  }
}

TEST(BuiltinAnisotropies, IsotropicAIsIdentity) {
  const auto f = anisotropy_by_name("isotropic", 3);
  for (const Vec& u : sphere_grid(3, 4))
    EXPECT_LT((evaluate(f, u).a_matrix - Mat::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(AnisotropyByName, Parameters) {
  const auto q = anisotropy_by_name("quadratic:q=1;2;3", 3);
  EXPECT_EQ(q.family(), Family::QuadraticNorm);
  EXPECT_NEAR(q.value(v3(0, 0, 1)), std::sqrt(3.0), 1e-15);
  const auto a = anisotropy_by_name("axisymmetric:c=1;0.02", 3);
  EXPECT_EQ(a.params().size(), 2u);
  EXPECT_THROW(anisotropy_by_name("axisymmetric:c=1;-0.9", 3), Error);
  EXPECT_THROW(anisotropy_by_name("spherical", 3), Error);
}

TEST(BuiltinPatches, PlaneSpectrumZero) {
  const auto f = anisotropy_by_name("quadratic", 3);
  const CatalogEntry e = make_entry(f, "plane");
  for (const Vec& p : e.patch.grid(3)) EXPECT_LT(anisotropic_curvatures(f, e.patch, p).lambdas.norm(), 1e-14);
}

TEST(BuiltinPatches, WulffSpectrumMinusOne) {
  const auto f = anisotropy_by_name("quadratic", 3);
  const CatalogEntry e = make_entry(f, "wulff");
  for (const Vec& p : e.patch.grid(5)) {
    const CurvatureSpectrum s = anisotropic_curvatures(f, e.patch, p);
    EXPECT_EQ(s.g(), 1);
    EXPECT_NEAR(s.lambdas[0], -1.0, 1e-12);
  }
}

TEST(BuiltinPatches, ExpectedSpectraHold) {
  for (int d : {3, 4}) {
    for (const auto& a : builtin_anisotropies(d)) {
      for (const auto& e : builtin_patches(a.anisotropy)) {
        if (!e.expected_spectrum) continue;
        for (const Vec& p : e.patch.grid(3)) {
          const CurvatureSpectrum s = anisotropic_curvatures(e.anisotropy, e.patch, p);
          ASSERT_EQ(s.groups.size(), e.expected_spectrum->size()) << e.name;
          for (std::size_t i = 0; i < s.groups.size(); ++i) {
            EXPECT_NEAR(s.groups[i].value, (*e.expected_spectrum)[i].value, 1e-10) << e.name;
            EXPECT_EQ(s.groups[i].multiplicity, (*e.expected_spectrum)[i].multiplicity) << e.name;
          }
        }
      }
    }
  }
}

TEST(BuiltinPatches, IsotropicHelicoidCurvatures) {
  const auto f = anisotropy_by_name("isotropic", 3);
  const CatalogEntry e = make_entry(f, "helicoid");
  EXPECT_EQ(e.expected_case, "not_isoparametric");
  for (const Vec& p : e.patch.grid(5)) {
    const double t = p[1];
    const CurvatureSpectrum s = anisotropic_curvatures(f, e.patch, p);
    EXPECT_NEAR(s.lambdas[0], 1.0 / (1.0 + t * t), 1e-12);
    EXPECT_NEAR(s.lambdas[1], -1.0 / (1.0 + t * t), 1e-12);
  }
}

TEST(BuiltinPatches, EntryNamesRoundTrip) {
  const auto f = anisotropy_by_name("axisymmetric", 4);
  const auto names = entry_names(f);
  const auto entries = builtin_patches(f);
  ASSERT_EQ(names.size(), entries.size());
  for (std::size_t i = 0; i < names.size(); ++i) EXPECT_EQ(make_entry(f, names[i]).name, entries[i].name);
  EXPECT_THROW(make_entry(f, "torus"), Error);
  EXPECT_THROW(make_entry(f, "cylinder:k=1,t=0"), Error);
}

TEST(ExtendAxis, IsotropicStaysIsotropic) {
  const auto g = extend_axis(AnisotropyFunction::isotropic(3), 0.1);
  EXPECT_EQ(g.family(), Family::Isotropic);
  EXPECT_EQ(g.ambient_dim(), 4);
}

TEST(ExtendAxis, EquatorReproducesBase) {
  const auto f = AnisotropyFunction::axisymmetric(3, {1.0, 0.05});
  const auto g = extend_axis(f, 0.1);
  EXPECT_TRUE(convexity_audit(g, 16).pass);
  for (const Vec& u : sphere_grid(3, 8)) {
    Vec y = Vec::Zero(4);
    y.head(3) = u;
    EXPECT_NEAR(g.value(y), f.value(u), 1e-12);
  }
}

TEST(ExtendAxis, MeridianConstantInsideBand) {
  const auto f = AnisotropyFunction::quadratic_norm(v3(1, 1.2, 1.5));
  const double hw = 0.05;
  const auto g = extend_axis(f, hw);
  for (const Vec& u : sphere_grid(3, 4)) {
    for (double th : {-hw, -0.5 * hw, 0.5 * hw, hw}) {
      Vec y = Vec::Zero(4);
      y.head(3) = std::cos(th) * u;
      y[3] = std::sin(th);
      EXPECT_NEAR(g.value(y), f.value(u), 1e-12);
    }
  }
}

TEST(ExtendAxis, ProductSpectrumGainsZero) {
  // On the helicoid x line the extension adds a zero curvature to the helicoid's.
  const auto f = AnisotropyFunction::axisymmetric(3, {1.0, 0.05});
  const auto g = extend_axis(f, 0.05);
  const ImmersionPatch h = helicoid_patch(2.0);
  const ImmersionPatch hl = helicoid_line_patch(2.0);
  for (const Vec& p : h.grid(4)) {
    Vec q(3);
    q << p[0], p[1], 0.3;
    const Vec a = anisotropic_curvatures(f, h, p).lambdas;
    const Vec b = anisotropic_curvatures(g, hl, q).lambdas;
    EXPECT_NEAR(b[0], a[0], 1e-10);
    EXPECT_NEAR(b[1], 0.0, 1e-10);
    EXPECT_NEAR(b[2], a[1], 1e-10);
  }
}

TEST(ExtendAxis, TooWideBandRejected) {
  const auto f = AnisotropyFunction::axisymmetric(3, {1.0, -0.45});
  try {
    extend_axis(f, 1.2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConvexityViolation);
  }
  EXPECT_THROW(extend_axis(f, 0.0), Error);
}

TEST(ExtendAxis, JsonRoundTrip) {
  const auto g = extend_axis(AnisotropyFunction::axisymmetric(3, {1.0, 0.05}), 0.1);
  const auto h = anisotropy_from_json(to_json(g));
  Vec y(4);
  y << 0.3, -0.2, 0.5, 0.7;
  y.normalize();
  EXPECT_DOUBLE_EQ(h.value(y), g.value(y));
}
