#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "wulfflab/anisotropy.hpp"
#include "wulfflab/hypersurface.hpp"

namespace wulfflab {

/// x_t = x + t phi(nu). The translate keeps the normal of the source patch.
struct TranslationResult {
  double t = 0.0;
  ImmersionPatch patch_t;
  double min_singular_value = 0.0;
  bool degenerate = false;
};

/// patch_t is built by composition: dx_t = dx + t D^2Fh(nu) dnu, nu_t = nu.
/// The sampled singular values come from a per_axis^n chart grid.
TranslationResult translate(const AnisotropyFunction& f, const ImmersionPatch& patch, double t, int per_axis = 15,
                            double degeneracy_tol = 1e-6);

/// Same map without the grid scan.
ImmersionPatch translated_patch(const AnisotropyFunction& f, const ImmersionPatch& patch, double t);

struct TransformedSpectrum {
  CurvatureSpectrum source;
  CurvatureSpectrum actual;
  Vec predicted;  ///< lambda_i / (1 - t lambda_i), descending
  double max_deviation = 0.0;
};

/// Spectrum of x_t at params, computed directly, next to the prediction from
/// the source spectrum. Throws DegenerateTranslation if |1 - t lambda_i| < 1e-8.
TransformedSpectrum transformed_spectrum(const AnisotropyFunction& f, const ImmersionPatch& patch,
                                         const Vec& params, double t);

struct MeanProfileRow {
  double t = 0.0;
  double mean = 0.0;        ///< H_F(t) from the spectrum of x_t
  double prediction = 0.0;  ///< -P'(t) / (n P(t)), P(t) = sum (-1)^k M_k t^k
};

std::vector<MeanProfileRow> mean_profile(const AnisotropyFunction& f, const ImmersionPatch& patch,
                                         const Vec& params, const std::vector<double>& t_grid);

/// -P'(t) / (n P(t)) for the symmetric functions M_0..M_n.
double generating_mean(const Vec& sym_functions, double t);

struct SweepRow {
  double t = 0.0;
  double min_singular_value = 0.0;
  bool degenerate = false;
  double max_deviation = 0.0;  ///< max over points and i of |lambda_i(t) - predicted|; NaN if degenerate
};

std::vector<SweepRow> translation_sweep(const AnisotropyFunction& f, const ImmersionPatch& patch,
                                        const std::vector<double>& t_values, const std::vector<Vec>& grid);

/// CSV, header comment `# wulfflab translation-sweep v1`, columns
/// t, min_singular_value, degenerate, max_deviation.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

struct FocalOptions {
  int leaf_resolution = 24;       ///< samples per integrated curve
  double leaf_step = 1e-2;        ///< initial step, in Gauss-map arc length
  double leaf_length = 3.14159265358979323846;
  double drift_tol = 1e-5;
  double min_step = 1e-6;
  double iso_tol = 1e-5;
  double cluster_tol = 1e-6;
  int ii_check_points = 10;
};

struct LeafSample {
  Vec params;
  Vec x;
  Vec nu;
};

struct AntipodalPair {
  Vec p1;
  Vec p2;
  double gauss_residual = 0.0;  ///< |nu(p2) + nu(p1)| + |x_t(p2) - q|
  double trace_u = 0.0;         ///< tr II at p1 (normal u)
  double trace_minus_u = 0.0;   ///< tr II at p2 (normal -u)
};

struct FocalData {
  double lambda_star = 0.0;
  double t = 0.0;
  int group_index = 0;
  int multiplicity = 0;
  Vec seed_params;
  Vec q;
  std::vector<LeafSample> leaf_samples;
  double leaf_equation_residual = 0.0;  ///< max |lambda (x - q) + phi(nu)|
  double max_drift = 0.0;               ///< max |x_t - q| along the leaf
  double min_gauss_singular_value = 0.0;
  double curvature_drift = 0.0;         ///< max group drift along the leaf
  double step_used = 0.0;
  Vec focal_singular_values;            ///< of dx_t at the seed, descending
  int focal_rank_deficiency = 0;        ///< count below 1e-6
  double d1_normal_angle = 0.0;         ///< largest principal angle between D_i and the focal normal space

  Vec complementary_lambdas;            ///< the Lambda~ diagonal
  Mat reduced_a;                        ///< A~ = <eps_a, eps_b> on the complementary directions
  Vec reduced_a_inv_diag;
  Mat ii_matrix;                        ///< closed form at the seed
  Mat ii_direct;                        ///< <dx_t(e_a), -dnu(e_b)> at the seed
  double ii_route_deviation = 0.0;      ///< max over checked leaf points

  std::vector<double> gamma;            ///< one per complementary group
  std::vector<double> gamma_lambdas;
  double cartan_residual = 0.0;
  AntipodalPair pair;
  double trace_antisymmetry = 0.0;      ///< |tr II_u + tr II_{-u}|
};

/// q = x_t(seed) with t = 1/lambda_star, plus leaf samples from curves
/// tangent to the curvature distribution of lambda_star.
FocalData focal_map(const AnisotropyFunction& f, const ImmersionPatch& patch, double lambda_star,
                    const Vec& seed_params, const FocalOptions& options = {});

/// focal_map plus the focal second fundamental form in direction nu, by the
/// closed form and by direct assembly.
FocalData focal_second_form(const AnisotropyFunction& f, const ImmersionPatch& patch, double lambda_star,
                            const Vec& seed_params, const FocalOptions& options = {});

/// focal_second_form plus the antipodal leaf point, Gamma coefficients and
/// the Cartan-type residual.
FocalData cartan_residual(const AnisotropyFunction& f, const ImmersionPatch& patch, double lambda_star,
                          const Vec& seed_params, const FocalOptions& options = {});

std::string to_json(const FocalData& data);

}  // namespace wulfflab
