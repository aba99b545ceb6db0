#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "wulfflab/linalg.hpp"

namespace wulfflab {

enum class Family { Isotropic, QuadraticNorm, AxisymmetricSeries, BandExtension, Tabulated };
enum class DerivativeMode { Analytic, FiniteDifference };

std::string_view to_string(Family family);
std::string_view to_string(DerivativeMode mode);
Family family_from_string(std::string_view name);
DerivativeMode derivative_mode_from_string(std::string_view name);

/// A smooth positive anisotropy F on the unit sphere S^n of R^{n+1}.
///
/// Everything is computed through the 1-homogeneous extension
/// Fh(y) = |y| F(y/|y|): its gradient at a unit u is the Wulff map phi(u) and
/// its ambient Hessian restricted to u^perp is A_F = D^2F + F I.
///
/// Families and their params:
///   isotropic            F = 1                       params = {}
///   quadratic-norm       F = sqrt(u^T Q u)           params = diag(Q), size n+1
///   axisymmetric-series  F = sum_j c_j z^(2j)        params = c_0..c_m, z = u_last
///   tabulated            natural cubic spline f(z)   params = samples of f at
///                                                    equispaced z in [-1, 1]
///   band-extension       extension to S^{n+1} of a base F (see catalog::extend_axis)
///                        params = {band_halfwidth, a, b, delta}
class AnisotropyFunction {
 public:
  static AnisotropyFunction isotropic(int ambient_dim);
  static AnisotropyFunction quadratic_norm(const Vec& diagonal);
  static AnisotropyFunction axisymmetric(int ambient_dim, std::vector<double> coefficients);
  static AnisotropyFunction tabulated(int ambient_dim, std::vector<double> samples);
  static AnisotropyFunction band_extension(const AnisotropyFunction& base, double band_halfwidth,
                                           double a, double b, double delta);

  int ambient_dim() const { return ambient_dim_; }
  Family family() const { return family_; }
  const std::vector<double>& params() const { return params_; }
  DerivativeMode derivative_mode() const { return mode_; }
  double fd_step() const { return fd_step_; }
  /// Base function of a band-extension; null for every other family.
  const AnisotropyFunction* base() const { return base_.get(); }

  AnisotropyFunction with_mode(DerivativeMode mode, double fd_step = 1e-5) const;

  /// F(u); u is normalised first.
  double value(const Vec& u) const;
  /// Fh(y) for any nonzero y; Fh(0) = 0.
  double homogeneous(const Vec& y) const;

  struct Derivatives {
    double value = 0.0;
    Vec gradient;
    Mat hessian;
  };
  /// Value, gradient and Hessian of Fh at y, in the configured derivative mode.
  Derivatives homogeneous_derivatives(const Vec& y) const;

  // Natural cubic spline moments of a tabulated profile, precomputed.
  const std::vector<double>& spline_moments() const { return spline_m_; }

 private:
  AnisotropyFunction() = default;

  int ambient_dim_ = 0;
  Family family_ = Family::Isotropic;
  std::vector<double> params_;
  DerivativeMode mode_ = DerivativeMode::Analytic;
  double fd_step_ = 1e-5;
  std::shared_ptr<const AnisotropyFunction> base_;
  std::vector<double> spline_m_;
};

/// Sphere calculus of F at a unit vector u.
struct AnisotropyEval {
  Vec u;
  double value = 0.0;
  /// DF_u, tangent at u.
  Vec gradient;
  /// A_F on u^perp in the columns of `basis`.
  Mat a_matrix;
  /// Symmetric square root of a_matrix; empty when a_matrix is not
  /// positive semi-definite (beyond -1e-8).
  Mat c_matrix;
  /// (n+1) x n, orthonormal columns spanning u^perp.
  Mat basis;
  double min_eigenvalue = 0.0;

  bool convex() const { return c_matrix.size() > 0; }
};

AnisotropyEval evaluate(const AnisotropyFunction& f, const Vec& u);

/// Wulff map phi(u) = DF_u + F(u) u.
Vec phi(const AnisotropyFunction& f, const Vec& u);

struct DualNormResult {
  double value = 0.0;
  Vec maximizer;
  /// False when local ascent could not improve on the grid seed; value is
  /// then the seed value.
  bool refined = true;
  int iterations = 0;
};

/// F*(y) = sup_{|z|=1} <y,z>/F(z).
DualNormResult dual_norm_solve(const AnisotropyFunction& f, const Vec& y);
double dual_norm(const AnisotropyFunction& f, const Vec& y);

struct ConvexityReport {
  double min_eigenvalue = 0.0;
  Vec argmin;
  bool pass = false;
  std::size_t points = 0;
};

ConvexityReport convexity_audit(const AnisotropyFunction& f, int grid_resolution,
                                double tolerance = 1e-8);

std::string to_json(const AnisotropyFunction& f);
AnisotropyFunction anisotropy_from_json(std::string_view text);

}  // namespace wulfflab
