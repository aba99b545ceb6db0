#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "wulfflab/anisotropy.hpp"
#include "wulfflab/hypersurface.hpp"
#include "wulfflab/linalg.hpp"

namespace wulfflab {

/// Totally geodesic S^k inside S^n: the unit sphere of the span of the rows
/// of `frame` ((k+1) x (n+1), orthonormal rows).
struct SubsphereSpec {
  int k = 1;
  Mat frame;

  /// Throws InvalidArgument unless 1 <= k <= n and frame has orthonormal rows.
  void validate(int ambient_dim) const;
};

/// Spans the first k+1 coordinate axes.
SubsphereSpec coordinate_subsphere(int ambient_dim, int k);

struct WulffPoint {
  Vec u;
  Vec y;  ///< phi(u)
};

struct WulffSample {
  std::vector<WulffPoint> points;
  /// Triangles over `points` (only for the full Wulff shape in R^3).
  std::vector<std::array<int, 3>> triangles;
};

/// phi over a quasi-uniform grid on S^n. Audits convexity first.
WulffSample sample_wulff(const AnisotropyFunction& f, int resolution);

/// phi over a grid on the embedded S^k of `spec`.
WulffSample sample_sub_wulff(const AnisotropyFunction& f, const SubsphereSpec& spec, int resolution);

/// Largest distance from the points to their best-fit affine subspace of
/// dimension `plane_dim`.
double best_fit_plane_deviation(const std::vector<Vec>& points, int plane_dim);

/// Hyperspherical chart of S^k with first and second derivatives.
///
/// variant 0: s_0 = cos a_0, s_1 = sin a_0 cos a_1, ..., s_k = sin a_0 ... sin a_{k-1}.
/// variant 1: the same with coordinates cyclically shifted by one, so the two
/// charts have different polar sets and together cover S^k.
struct SphereChartPoint {
  Vec s;                 ///< k+1
  Mat ds;                ///< (k+1) x k
  std::vector<Mat> dds;  ///< k entries of (k+1) x k
};

SphereChartPoint sphere_chart(int k, int variant, const Vec& angles);

/// Angle box: polar angles in [margin, pi - margin], last angle in [0, 2 pi].
ChartBox sphere_chart_box(int k, double pole_margin = 0.15);

/// The Wulff shape as a patch: x = phi(s(a)), nu = s(a) (outward).
ImmersionPatch wulff_patch(const AnisotropyFunction& f, int variant = 0);

/// (u, v) -> v - t phi(u) over (S^k chart angles) x [-1, 1]^{n-k}, with
/// v in the orthogonal complement of the span of spec.frame and nu = u.
ImmersionPatch product_immersion(const AnisotropyFunction& f, const SubsphereSpec& spec, double t,
                                 int variant = 0);

/// Wavefront OBJ: one `v` line per phi(u), one `f` line per triangle.
/// Throws InvalidArgument when the sample has no mesh.
void write_obj(std::ostream& out, const WulffSample& sample);

/// CSV with header comment `# wulfflab wulff-sample v1` and columns
/// u0..u{d-1}, phi0..phi{d-1}.
void write_csv(std::ostream& out, const WulffSample& sample);

}  // namespace wulfflab
