#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wulfflab/anisotropy.hpp"
#include "wulfflab/linalg.hpp"

namespace wulfflab {

/// Position and chart derivatives of a patch at one parameter value.
///
/// A patch either provides second derivatives (`ddx`) or its unit normal and
/// the normal's chart derivative (`nu`, `dnu`); composite patches (Wulff
/// shapes, product immersions, translates) know the latter exactly and need no
/// third derivatives of F.
struct PatchPoint {
  Vec x;
  Mat dx;                 ///< N x n, column i = dx/du_i
  std::vector<Mat> ddx;   ///< n entries, ddx[i].col(j) = d2x/du_i du_j; empty if absent
  std::optional<Vec> nu;
  std::optional<Mat> dnu;  ///< N x n
};

using PatchMap = std::function<PatchPoint(const Vec& params)>;

struct ChartBox {
  Vec lo;
  Vec hi;

  bool contains(const Vec& p, double slack = 1e-12) const;
};

/// An immersed hypersurface chart x: box in R^n -> R^{n+1}.
///
/// The unit normal is the patch's own `nu` when it provides one, otherwise
/// the generalised cross product of the tangent columns (det[dx | nu] > 0);
/// either way it is multiplied by `orientation`.
class ImmersionPatch {
 public:
  ImmersionPatch(int ambient_dim, int chart_dim, ChartBox domain, PatchMap map, int orientation = 1,
                 std::string name = {});

  /// Wraps a position-only map; derivatives by central differences
  /// (step `fd_step` for first, 1e-4 for second derivatives).
  static ImmersionPatch from_position(int ambient_dim, int chart_dim, ChartBox domain,
                                      std::function<Vec(const Vec&)> position, int orientation = 1,
                                      std::string name = {}, double fd_step = 1e-6);

  int ambient_dim() const { return ambient_dim_; }
  int chart_dim() const { return chart_dim_; }
  const ChartBox& domain() const { return domain_; }
  int orientation() const { return orientation_; }
  const std::string& name() const { return name_; }

  /// Raw map output with orientation applied to any supplied normal.
  PatchPoint evaluate(const Vec& params) const;

  ImmersionPatch flipped() const;
  /// x -> c x (homothety, c > 0).
  ImmersionPatch scaled(double c) const;
  /// per_axis^n points spanning the closed domain box.
  std::vector<Vec> grid(int per_axis) const;

 private:
  int ambient_dim_;
  int chart_dim_;
  ChartBox domain_;
  PatchMap map_;
  int orientation_;
  std::string name_;
};

struct Frame {
  Vec x;
  Mat dx;
  Vec nu;
  Mat metric;
};

/// Everything first-order about the patch at one point, plus the shape
/// operator W in the chart basis (-dnu = dx W).
struct PointGeometry {
  Vec params;
  Vec x;
  Mat dx;
  Vec nu;
  Mat metric;
  Mat w;
  Mat dnu;
};

Frame frame_at(const ImmersionPatch& patch, const Vec& params);
PointGeometry geometry_at(const ImmersionPatch& patch, const Vec& params);

/// Chart matrix W of T = -dnu, i.e. -dnu = dx W.
Mat shape_operator(const ImmersionPatch& patch, const Vec& params);

/// Chart matrix S of S_F = A_F o T.
Mat f_weingarten(const AnisotropyFunction& f, const PointGeometry& geo);
Mat f_weingarten(const AnisotropyFunction& f, const ImmersionPatch& patch, const Vec& params);

/// S through A_F (primary) and through central differences of phi o nu in
/// the chart (independent route).
struct WeingartenCrossCheck {
  Mat via_a_matrix;
  Mat via_phi_derivative;
  double max_abs_diff = 0.0;
};
WeingartenCrossCheck f_weingarten_cross_check(const AnisotropyFunction& f, const ImmersionPatch& patch,
                                              const Vec& params, double fd_step = 1e-5);

struct CurvatureGroup {
  double value = 0.0;
  int multiplicity = 0;
};

struct CurvatureSpectrum {
  Vec lambdas;  ///< descending, with repetition
  std::vector<CurvatureGroup> groups;
  std::vector<int> group_offsets;  ///< n_k = m_1 + ... + m_k
  Mat eigenframe;                  ///< chart basis, columns ordered like lambdas, unit ambient length
  Vec sym_functions;               ///< M_0..M_n
  double mean = 0.0;               ///< H_F

  int g() const { return static_cast<int>(groups.size()); }
};

/// The symmetrised eigenproblem C T C at a point, all in the orthonormal
/// tangent basis E (columns of aniso.basis).
struct SymmetrizedShape {
  AnisotropyEval aniso;
  Mat b;          ///< E^T dx, chart -> E coordinates
  Mat t_tilde;    ///< shape operator in E coordinates (symmetric)
  Vec lambdas;    ///< descending
  Mat e_vectors;  ///< orthonormal eigenvectors of C T C (E coordinates), same order
};

SymmetrizedShape symmetrized_shape(const AnisotropyFunction& f, const PointGeometry& geo);

CurvatureSpectrum anisotropic_curvatures(const AnisotropyFunction& f, const PointGeometry& geo,
                                         double cluster_tol = 1e-6);
CurvatureSpectrum anisotropic_curvatures(const AnisotropyFunction& f, const ImmersionPatch& patch,
                                         const Vec& params, double cluster_tol = 1e-6);

/// Groups a descending list of values; consecutive values closer than tol join.
std::vector<CurvatureGroup> cluster_values(const Vec& descending, double tol);

/// H_F = tr(S)/n.
double anisotropic_mean(const AnisotropyFunction& f, const ImmersionPatch& patch, const Vec& params);

/// H_F via -tr(d(phi o nu) dx^+)/n with the derivative from central differences.
double anisotropic_mean_phi_route(const AnisotropyFunction& f, const ImmersionPatch& patch, const Vec& params,
                                  double fd_step = 1e-5);

/// Eigenvalues of W, descending (classical principal curvatures).
Vec classical_curvatures(const ImmersionPatch& patch, const Vec& params);

struct CurvatureRow {
  Vec params;
  Vec x;
  Vec nu;
  CurvatureSpectrum spectrum;
};

/// Spectra over a list of chart points, evaluated in parallel.
std::vector<CurvatureRow> curvature_batch(const AnisotropyFunction& f, const ImmersionPatch& patch,
                                          const std::vector<Vec>& grid, double cluster_tol = 1e-6);

/// CSV, header comment `# wulfflab curvature-report v1`, columns
/// p0.., x0.., nu0.., lambda1..lambda_n, H_F, g.
void write_curvature_csv(std::ostream& out, const std::vector<CurvatureRow>& rows);

}  // namespace wulfflab
