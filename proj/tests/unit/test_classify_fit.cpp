#include <gtest/gtest.h>

#include <cmath>

#include "wulfflab/anisotropy.hpp"
#include "wulfflab/catalog.hpp"
#include "wulfflab/classify_fit.hpp"
#include "wulfflab/errors.hpp"
#include "wulfflab/wulff_geometry.hpp"

using namespace wulfflab;

TEST(DetectIsoparametric, ProductFlagged) {
  const auto f = anisotropy_by_name("quadratic", 3);
  const ImmersionPatch p = product_immersion(f, coordinate_subsphere(3, 1), 0.5);
  const IsoparametricReport r = detect_isoparametric(f, p, p.grid(6));
  EXPECT_TRUE(r.isoparametric);
  EXPECT_LT(r.spread, 1e-8);
  ASSERT_EQ(r.groups.size(), 2u);
}

TEST(DetectIsoparametric, IsotropicHelicoidSpread) {
  const auto f = AnisotropyFunction::isotropic(3);
  const ImmersionPatch h = helicoid_patch(2.0);
  const IsoparametricReport r = detect_isoparametric(f, h, h.grid(9));
  EXPECT_FALSE(r.isoparametric);
  // Grid includes t = 0 and t = +-2: spread 1 - 1/(1 + 4).
  EXPECT_NEAR(r.spread, 1.0 - 1.0 / 5.0, 1e-12);
}

TEST(DetectIsoparametric, PlaneZeroSpread) {
  const auto f = anisotropy_by_name("axisymmetric", 3);
  const ImmersionPatch p = hyperplane_patch(3);
  const IsoparametricReport r = detect_isoparametric(f, p, p.grid(4));
  EXPECT_TRUE(r.isoparametric);
  EXPECT_EQ(r.spread, 0.0);
}

TEST(DetectIsoparametric, GridOutsideChartRejected) {
  const auto f = AnisotropyFunction::isotropic(3);
  Vec far(2);
  far << 100.0, 0.0;
  EXPECT_THROW(detect_isoparametric(f, helicoid_patch(2.0), {far}), Error);
}

TEST(Classify, WulffShapeWithCenterAtOrigin) {
  const auto f = anisotropy_by_name("quadratic", 3);
  const ImmersionPatch w = wulff_patch(f);
  const ClassificationVerdict v = classify(f, w, w.grid(6), true);
  EXPECT_EQ(v.label, CaseLabel::WulffShape);
  EXPECT_TRUE(v.cross_check_passed);
  EXPECT_LT(v.diagnostics.at("center_norm"), 1e-6);
  EXPECT_LT(v.diagnostics.at("center_dual_residual"), 1e-6);
}

TEST(Classify, ShiftedWulffShapeCenterRecovered) {
  // The center fit solves F*(-lambda (x - q)) = 1; a scaled copy keeps q = 0.
  const auto f = anisotropy_by_name("axisymmetric", 3);
  const ImmersionPatch w = wulff_patch(f).scaled(2.0);
  const ClassificationVerdict v = classify(f, w, w.grid(6), true);
  EXPECT_EQ(v.label, CaseLabel::WulffShape);
  EXPECT_LT(v.diagnostics.at("center_norm"), 1e-6);
}

TEST(Classify, ProductK) {
  const auto f = anisotropy_by_name("quadratic", 3);
  const CatalogEntry e = make_entry(f, "cylinder:k=1,t=0.5");
  const ClassificationVerdict v = classify(f, e.patch, e.patch.grid(6), true);
  EXPECT_EQ(v.label, CaseLabel::ProductK);
  EXPECT_EQ(v.k, 1);
  EXPECT_EQ(v.g, 2);
  EXPECT_LT(v.diagnostics.at("cartan_residual"), 1e-10);
}

TEST(Classify, ProductKInFourDimensions) {
  const auto f = anisotropy_by_name("axisymmetric", 4);
  const CatalogEntry e = make_entry(f, "cylinder:k=2,t=2");
  const ClassificationVerdict v = classify(f, e.patch, e.patch.grid(4), true);
  EXPECT_EQ(v.label, CaseLabel::ProductK);
  EXPECT_EQ(v.k, 2);
}

TEST(Classify, WithoutCompletenessIsLocal) {
  const auto f = anisotropy_by_name("quadratic", 3);
  const CatalogEntry e = make_entry(f, "cylinder:k=1,t=0.5");
  EXPECT_EQ(classify(f, e.patch, e.patch.grid(5), false).label, CaseLabel::LocalOnly);
}

TEST(Classify, PlaneAndHelicoid) {
  const auto f = AnisotropyFunction::isotropic(3);
  const ImmersionPatch p = hyperplane_patch(3);
  EXPECT_EQ(classify(f, p, p.grid(4), true).label, CaseLabel::Plane);
  const ImmersionPatch h = helicoid_patch(2.0);
  EXPECT_EQ(classify(f, h, h.grid(7), true).label, CaseLabel::NotIsoparametric);
}

TEST(Classify, LabelStrings) {
  EXPECT_EQ(to_string(CaseLabel::ProductK), "product_k");
  EXPECT_EQ(to_string(CaseLabel::WulffShape), "wulff_shape");
  EXPECT_EQ(to_string(CaseLabel::LocalOnly), "local_only");
}

TEST(AxisymmetricEigenvalues, MatchesEvaluate) {
  const std::vector<double> c{1.0, -0.3, 0.1, -0.05};
  const auto f = AnisotropyFunction::axisymmetric(3, c);
  for (double z : {-0.7, 0.0, 0.2, 0.9}) {
    double alpha = 0, beta = 0;
    axisymmetric_eigenvalues(c, z, alpha, beta);
    Vec u(3);
    u << std::sqrt(1 - z * z), 0.0, z;
    const AnisotropyEval e = evaluate(f, u);
    // basis column 0 or 1 may carry the meridian; compare the spectrum.
    const double lo = std::min(alpha, beta), hi = std::max(alpha, beta);
    EXPECT_NEAR(e.min_eigenvalue, lo, 1e-12);
    EXPECT_NEAR(e.a_matrix.trace(), lo + hi, 1e-12);
  }
}

TEST(Fit, RecoversWulffGenerator) {
  const auto f = AnisotropyFunction::axisymmetric(3, {1.0, 0.05});
  const ImmersionPatch w = wulff_patch(f);
  FitOptions opt;
  opt.restarts = 3;
  const FitResult r = fit_anisotropy(w, 2, w.grid(8), opt);
  ASSERT_EQ(r.coefficients.size(), 2u);
  EXPECT_NEAR(r.coefficients[1], 0.05, 1e-3);
  EXPECT_LT(r.final_spread, 1e-6);
  EXPECT_FALSE(r.non_convergence);
}

TEST(Fit, RoundCylinderStaysIsotropic) {
  const ImmersionPatch c = round_cylinder_patch(1.0);
  const FitResult r = fit_anisotropy(c, 4, c.grid(8));
  EXPECT_NEAR(r.coefficients[1], 0.0, 1e-6);
  EXPECT_NEAR(r.coefficients[2], 0.0, 1e-6);
  EXPECT_LT(r.final_spread, 1e-8);
}

TEST(Fit, HelicoidSpectrumIsPlusMinus) {
  const ImmersionPatch h = helicoid_patch(2.0);
  const FitResult r = fit_anisotropy(h, 8, h.grid(11));
  ASSERT_EQ(r.normalized_spectrum.size(), 2);
  EXPECT_NEAR(r.normalized_spectrum[0], 1.0, 1e-2);
  EXPECT_NEAR(r.normalized_spectrum[1], -1.0, 1e-2);
  EXPECT_GT(r.min_eigenvalue, 0.0);
  EXPECT_LT(r.final_spread, 1e-2);
  // Objective history is monotone for the kept restart.
  for (std::size_t i = 1; i < r.objective_history.size(); ++i)
    EXPECT_LE(r.objective_history[i], r.objective_history[i - 1] + 1e-15);
}

TEST(Fit, SeedMakesRunsReproducible) {
  const ImmersionPatch h = helicoid_patch(2.0);
  FitOptions opt;
  opt.seed = 42;
  const FitResult a = fit_anisotropy(h, 4, h.grid(7), opt);
  const FitResult b = fit_anisotropy(h, 4, h.grid(7), opt);
  EXPECT_EQ(a.coefficients, b.coefficients);
}

TEST(Fit, RejectsOddDegree) {
  const ImmersionPatch h = helicoid_patch(2.0);
  try {
    fit_anisotropy(h, 3, h.grid(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
  }
}
