#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "wulfflab/anisotropy.hpp"
#include "wulfflab/catalog.hpp"
#include "wulfflab/errors.hpp"
#include "wulfflab/hypersurface.hpp"
#include "wulfflab/linalg.hpp"
#include "wulfflab/parallel_focal.hpp"
#include "wulfflab/wulff_geometry.hpp"

using namespace wulfflab;

namespace {

Vec v3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

Vec center(const ImmersionPatch& p) { return 0.5 * (p.domain().lo + p.domain().hi); }

}  // namespace

TEST(Translate, ZeroIsIdentity) {
  const auto f = AnisotropyFunction::quadratic_norm(v3(1, 2, 4));
  const ImmersionPatch h = helicoid_patch(2.0);
  const ImmersionPatch h0 = translated_patch(f, h, 0.0);
  for (const Vec& p : h.grid(4)) EXPECT_LT((h0.evaluate(p).x - h.evaluate(p).x).norm(), 1e-15);
}

TEST(Translate, IsotropicSphereGrows) {
  const auto f = AnisotropyFunction::isotropic(3);
  const ImmersionPatch w = wulff_patch(f);
  const TranslationResult r = translate(f, w, 0.5);
  EXPECT_FALSE(r.degenerate);
  for (const Vec& p : w.grid(5)) EXPECT_NEAR(r.patch_t.evaluate(p).x.norm(), 1.5, 1e-13);
}

TEST(Translate, ProductDegeneratesOnlyAtItsT) {
  const auto f = AnisotropyFunction::quadratic_norm(v3(1, 1, 4));
  const ImmersionPatch p = product_immersion(f, coordinate_subsphere(3, 1), 0.5);
  EXPECT_TRUE(translate(f, p, 0.5).degenerate);
  EXPECT_FALSE(translate(f, p, 0.4).degenerate);
  EXPECT_FALSE(translate(f, p, -0.5).degenerate);
}

TEST(TransformedSpectrum, PredictionFormula) {
  const auto f = AnisotropyFunction::isotropic(3);
  // lambda = 2 at t = 0.25 predicts 4.
  const ImmersionPatch p = product_immersion(f, coordinate_subsphere(3, 1), 0.5);
  const TransformedSpectrum s = transformed_spectrum(f, p, center(p), 0.25);
  EXPECT_NEAR(s.predicted[0], 4.0, 1e-14);
  EXPECT_NEAR(s.actual.lambdas[0], 4.0, 1e-12);
}

TEST(TransformedSpectrum, IsotropicSphere) {
  const auto f = AnisotropyFunction::isotropic(3);
  const ImmersionPatch w = wulff_patch(f);
  const TransformedSpectrum s = transformed_spectrum(f, w, center(w), 0.5);
  EXPECT_NEAR(s.actual.lambdas[0], -2.0 / 3.0, 1e-12);
  EXPECT_NEAR(s.predicted[0], -2.0 / 3.0, 1e-14);
  EXPECT_LT(s.max_deviation, 1e-12);
}

TEST(TransformedSpectrum, AnisotropicHelicoid) {
  // The translation law holds pointwise, isoparametric or not.
  const auto f = AnisotropyFunction::quadratic_norm(v3(1, 2, 4));
  const ImmersionPatch h = helicoid_patch(2.0);
  for (const Vec& p : h.grid(4)) EXPECT_LT(transformed_spectrum(f, h, p, 0.1).max_deviation, 1e-9);
}

TEST(TransformedSpectrum, DegenerateRejected) {
  const auto f = AnisotropyFunction::isotropic(3);
  const ImmersionPatch p = product_immersion(f, coordinate_subsphere(3, 1), 0.5);
  try {
    transformed_spectrum(f, p, center(p), 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateTranslation);
  }
}

TEST(MeanProfile, ProductClosedForm) {
  const auto f = AnisotropyFunction::axisymmetric(3, {1.0, 0.05});
  const ImmersionPatch p = product_immersion(f, coordinate_subsphere(3, 1), 0.5);
  for (const auto& row : mean_profile(f, p, center(p), {-0.25, 0.25})) {
    const double expect = 0.5 * 2.0 / (1.0 - 2.0 * row.t);
    EXPECT_NEAR(row.mean, expect, 1e-9);
    EXPECT_NEAR(row.prediction, expect, 1e-9);
  }
}

TEST(MeanProfile, SingleTermGeneratingMean) {
  Vec m(2);
  m << 1.0, 2.0;  // n = 1, lambda = 2
  EXPECT_NEAR(generating_mean(m, 0.25), 4.0, 1e-14);
}

TEST(MeanProfile, TwoTermGeneratingMean) {
  const double c = 0.7, t = 0.1;
  Vec lam(2);
  lam << c, -c;
  const double expect = 0.5 * (c / (1 - t * c) - c / (1 + t * c));
  EXPECT_NEAR(generating_mean(elementary_symmetric(lam), t), expect, 1e-14);
}

TEST(Sweep, CsvAndDegenerateRow) {
  const auto f = AnisotropyFunction::isotropic(3);
  const ImmersionPatch p = product_immersion(f, coordinate_subsphere(3, 1), 0.5);
  const auto rows = translation_sweep(f, p, {0.25, 0.5}, p.grid(4));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_FALSE(rows[0].degenerate);
  EXPECT_TRUE(rows[1].degenerate);
  EXPECT_TRUE(std::isnan(rows[1].max_deviation));
  std::ostringstream out;
  write_sweep_csv(out, rows);
  EXPECT_EQ(out.str().rfind("# wulfflab translation-sweep v1\n", 0), 0u);
}

TEST(FocalMap, ProductFocalPointIsLineComponent) {
  const auto f = AnisotropyFunction::quadratic_norm(v3(1, 1, 4));
  const ImmersionPatch p = product_immersion(f, coordinate_subsphere(3, 1), 0.5);
  Vec seed = center(p);
  seed[1] = 0.3;
  const FocalData d = focal_map(f, p, 2.0, seed);
  // q = v lies on the axis orthogonal to the circle's plane, at |w| = 0.3.
  EXPECT_LT(d.q.head(2).norm(), 1e-12);
  EXPECT_NEAR(std::abs(d.q[2]), 0.3, 1e-12);
  EXPECT_LT(d.leaf_equation_residual, 1e-8);
  EXPECT_EQ(d.focal_rank_deficiency, 1);
  EXPECT_GT(d.min_gauss_singular_value, 1e-6);
  EXPECT_GT(d.leaf_samples.size(), 10u);
}

TEST(FocalMap, InwardSphereFocusesAtCenter) {
  const auto f = AnisotropyFunction::isotropic(3);
  const ImmersionPatch w = wulff_patch(f).flipped();
  const FocalData d = focal_map(f, w, 1.0, center(w));
  EXPECT_LT(d.q.norm(), 1e-12);
  EXPECT_EQ(d.focal_rank_deficiency, 2);
  EXPECT_LT(d.leaf_equation_residual, 1e-12);
}

TEST(FocalMap, ZeroCurvatureRejected) {
  const auto f = AnisotropyFunction::isotropic(3);
  const ImmersionPatch p = product_immersion(f, coordinate_subsphere(3, 1), 0.5);
  try {
    focal_map(f, p, 0.0, center(p));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ZeroCurvature);
  }
}

TEST(FocalSecondForm, ProductIsTotallyGeodesic) {
  const auto f = AnisotropyFunction::axisymmetric(4, {1.0, 0.05});
  const ImmersionPatch p = product_immersion(f, coordinate_subsphere(4, 1), 0.5);
  const FocalData d = focal_second_form(f, p, 2.0, center(p));
  EXPECT_LT(d.ii_matrix.cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT(d.ii_direct.cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT(d.ii_route_deviation, 1e-6);
}

TEST(FocalSecondForm, IsotropicRoundCylinderHasZeroSecondForm) {
  const auto f = AnisotropyFunction::isotropic(3);
  const ImmersionPatch c = round_cylinder_patch(1.0);
  const FocalData d = focal_second_form(f, c, -1.0, center(c));
  ASSERT_EQ(d.ii_matrix.rows(), 1);
  EXPECT_NEAR(d.ii_matrix(0, 0), 0.0, 1e-12);
}

TEST(FocalSecondForm, HelicoidIsNotIsoparametric) {
  const auto f = AnisotropyFunction::isotropic(3);
  const ImmersionPatch h = helicoid_patch(2.0);
  Vec seed(2);
  seed << 0.0, 0.5;
  const double lam = 1.0 / 1.25;
  try {
    focal_second_form(f, h, lam, seed);
    FAIL();
  } catch (const Error& e) {
    // Either the leaf drifts or the curvature drifts along it.
    EXPECT_TRUE(e.kind() == ErrorKind::NotIsoparametric || e.kind() == ErrorKind::LeafDrift);
  }
}

TEST(CartanResidual, ProductTermsVanish) {
  const auto f = AnisotropyFunction::quadratic_norm(v3(1, 1, 4));
  const ImmersionPatch p = product_immersion(f, coordinate_subsphere(3, 1), 2.0);
  const FocalData d = cartan_residual(f, p, 0.5, center(p));
  EXPECT_LT(std::abs(d.cartan_residual), 1e-10);
  EXPECT_LT(d.trace_antisymmetry, 1e-6);
  EXPECT_LT(d.pair.gauss_residual, 1e-8);
}

TEST(CartanResidual, IsotropicCylinderGammaIsMultiplicity) {
  const auto f = AnisotropyFunction::isotropic(3);
  const ImmersionPatch c = round_cylinder_patch(1.0);
  const FocalData d = cartan_residual(f, c, -1.0, center(c));
  EXPECT_LT(std::abs(d.cartan_residual), 1e-10);
  ASSERT_EQ(d.gamma.size(), 1u);
  // A~ = I: each of the two pair points contributes 1.
  EXPECT_NEAR(d.gamma[0], 2.0, 1e-10);
}

TEST(FocalJson, HasResidual) {
  const auto f = AnisotropyFunction::isotropic(3);
  const ImmersionPatch p = product_immersion(f, coordinate_subsphere(3, 1), 0.5);
  const std::string j = to_json(cartan_residual(f, p, 2.0, center(p)));
  EXPECT_NE(j.find("\"cartan_residual\""), std::string::npos);
}
