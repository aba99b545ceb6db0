#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "wulfflab/anisotropy.hpp"
#include "wulfflab/hypersurface.hpp"

namespace wulfflab {

struct GroupStats {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  int multiplicity = 0;
};

struct IsoparametricReport {
  bool isoparametric = false;
  /// max over i of (max - min) of lambda_i across the grid
  double spread = 0.0;
  /// max over i of the standard deviation of lambda_i across the grid
  double max_std = 0.0;
  bool group_mismatch = false;  ///< g differs between grid points
  std::vector<GroupStats> groups;
  Vec mean_lambdas;
};

IsoparametricReport detect_isoparametric(const AnisotropyFunction& f, const ImmersionPatch& patch,
                                         const std::vector<Vec>& grid, double iso_tol = 1e-5,
                                         double cluster_tol = 1e-6);

enum class CaseLabel { Plane, WulffShape, ProductK, LocalOnly, NotIsoparametric, InconsistentCompleteness };

std::string_view to_string(CaseLabel label);

struct ClassifyOptions {
  double iso_tol = 1e-5;
  double cluster_tol = 1e-6;
  int center_fit_points = 48;
};

struct ClassificationVerdict {
  bool isoparametric = false;
  double spread = 0.0;
  int g = 0;
  std::vector<CurvatureGroup> groups;
  CaseLabel label = CaseLabel::NotIsoparametric;
  int k = 0;
  bool cross_check_passed = true;
  std::map<std::string, double> diagnostics;
};

/// Case split for isoparametric samples. Completeness is the caller's
/// assertion; without it the verdict is local_only.
ClassificationVerdict classify(const AnisotropyFunction& f, const ImmersionPatch& patch,
                               const std::vector<Vec>& grid, bool completeness_asserted,
                               const ClassifyOptions& options = {});

struct WulffCenterFit {
  Vec center;
  double max_residual = 0.0;  ///< max |F*(-lambda (x - q)) - 1|
  int iterations = 0;
};

/// Least-squares q with F*(-lambda (x_j - q)) = 1, seeded at the centroid.
WulffCenterFit fit_wulff_center(const AnisotropyFunction& f, const std::vector<Vec>& points, double lambda);

struct FitOptions {
  int restarts = 5;
  int max_iterations = 500;
  double target_spread = 1e-3;
  double penalty = 1e3;
  double margin = 0.05;
  double box = 0.5;  ///< random restarts draw c_j from [-box, box]
  std::uint64_t seed = 0;
  double fd_step = 1e-6;
};

struct FitResult {
  std::vector<double> coefficients;  ///< c_0 = 1, c_1..c_m
  std::vector<double> objective_history;
  double objective = 0.0;
  double final_spread = 0.0;
  Vec normalized_spectrum;
  double min_eigenvalue = 0.0;  ///< convexity margin of the fitted F
  int best_restart = 0;
  int iterations = 0;
  bool non_convergence = false;  ///< final_spread above options.target_spread
};

/// Fits an axisymmetric series F (even degree <= 8, c_0 = 1) that makes the
/// target's anisotropic principal curvatures constant over the grid.
FitResult fit_anisotropy(const ImmersionPatch& target, int basis_degree, const std::vector<Vec>& grid,
                         const FitOptions& options = {});

/// alpha = f - z f' and beta = alpha + (1 - z^2) f'' for F = sum c_j z^(2j):
/// the eigenvalues of A_F across and along the meridian.
void axisymmetric_eigenvalues(const std::vector<double>& c, double z, double& alpha, double& beta);

std::string to_json(const ClassificationVerdict& v);
std::string to_json(const FitResult& r);

}  // namespace wulfflab
