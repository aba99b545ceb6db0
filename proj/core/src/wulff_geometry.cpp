#include "wulfflab/wulff_geometry.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "wulfflab/errors.hpp"
#include "wulfflab/parallel.hpp"
#include "wulfflab/report.hpp"
#include "wulfflab/sphere_grid.hpp"

namespace wulfflab {

void SubsphereSpec::validate(int ambient_dim) const {
  const int n = ambient_dim - 1;
  if (k < 1 || k > n) throw Error(ErrorKind::InvalidArgument, "subsphere dimension k must be in [1, n]");
  if (frame.rows() != k + 1 || frame.cols() != ambient_dim) {
    throw Error(ErrorKind::InvalidArgument, "subsphere frame must be (k+1) x (n+1)");
  }
  const Mat gram = frame * frame.transpose();
  if ((gram - Mat::Identity(k + 1, k + 1)).cwiseAbs().maxCoeff() > 1e-10) {
    throw Error(ErrorKind::InvalidArgument, "subsphere frame rows are not orthonormal");
  }
}

SubsphereSpec coordinate_subsphere(int ambient_dim, int k) {
  SubsphereSpec spec;
  spec.k = k;
  spec.frame = Mat::Identity(k + 1, ambient_dim);
  spec.validate(ambient_dim);
  return spec;
}

namespace {

void require_audit(const AnisotropyFunction& f, int resolution) {
  const ConvexityReport audit = convexity_audit(f, std::max(8, resolution));
  if (!audit.pass) {
    throw Error(ErrorKind::ConvexityViolation,
                "convexity audit failed (min eigenvalue " + std::to_string(audit.min_eigenvalue) + ")");
  }
}

WulffSample sample_on(const AnisotropyFunction& f, const std::vector<Vec>& grid) {
  WulffSample out;
  out.points.resize(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { out.points[i] = {grid[i], phi(f, grid[i])}; });
  return out;
}

}  // namespace

WulffSample sample_wulff(const AnisotropyFunction& f, int resolution) {
  if (resolution < 1) throw Error(ErrorKind::InvalidArgument, "resolution must be positive");
  require_audit(f, resolution);
  if (f.ambient_dim() == 3) {
    Icosphere ico = icosphere(std::max(1, resolution / 2));
    WulffSample out = sample_on(f, ico.vertices);
    out.triangles = std::move(ico.triangles);
    return out;
  }
  return sample_on(f, sphere_grid(f.ambient_dim(), resolution));
}

WulffSample sample_sub_wulff(const AnisotropyFunction& f, const SubsphereSpec& spec, int resolution) {
  if (resolution < 1) throw Error(ErrorKind::InvalidArgument, "resolution must be positive");
  spec.validate(f.ambient_dim());
  require_audit(f, resolution);
  return sample_on(f, subsphere_grid(spec.frame, resolution));
}

double best_fit_plane_deviation(const std::vector<Vec>& points, int plane_dim) {
  if (points.empty()) return 0.0;
  const int d = static_cast<int>(points.front().size());
  if (plane_dim >= d) return 0.0;
  Vec centroid = Vec::Zero(d);
  for (const auto& p : points) centroid += p;
  centroid /= static_cast<double>(points.size());
  Mat centered(points.size(), d);
  for (std::size_t i = 0; i < points.size(); ++i) centered.row(i) = (points[i] - centroid).transpose();
  Eigen::JacobiSVD<Mat> svd(centered, Eigen::ComputeFullV);
  const Mat normals = svd.matrixV().rightCols(d - plane_dim);
  return (centered * normals).rowwise().norm().maxCoeff();
}

namespace {

enum class Factor { Sin, Cos, One };

double factor_value(Factor f, double a, int order) {
  switch (f) {
    case Factor::One:
      return order == 0 ? 1.0 : 0.0;
    case Factor::Sin:
      return order == 0 ? std::sin(a) : order == 1 ? std::cos(a) : -std::sin(a);
    case Factor::Cos:
      return order == 0 ? std::cos(a) : order == 1 ? -std::sin(a) : -std::cos(a);
  }
  return 0.0;
}

Factor factor_of(int component, int angle, int k) {
  if (component == k || angle < component) return Factor::Sin;
  if (angle == component) return Factor::Cos;
  return Factor::One;
}

}  // namespace

SphereChartPoint sphere_chart(int k, int variant, const Vec& angles) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "sphere chart needs k >= 1");
  if (angles.size() != k) throw Error(ErrorKind::InvalidArgument, "sphere chart angle count must equal k");
  SphereChartPoint p;
  p.s = Vec::Zero(k + 1);
  p.ds = Mat::Zero(k + 1, k);
  p.dds.assign(k, Mat::Zero(k + 1, k));

  // Derivative orders per angle, multiplied over all angles.
  auto product = [&](int m, int a, int oa, int b, int ob) {
    double v = 1.0;
    for (int c = 0; c < k; ++c) {
      int order = 0;
      if (c == a) order += oa;
      if (c == b) order += ob;
      v *= factor_value(factor_of(m, c, k), angles[c], order);
    }
    return v;
  };

  for (int m = 0; m <= k; ++m) {
    const int row = variant == 0 ? m : (m + 1) % (k + 1);
    p.s[row] = product(m, -1, 0, -1, 0);
    for (int a = 0; a < k; ++a) {
      p.ds(row, a) = product(m, a, 1, -1, 0);
      for (int b = 0; b < k; ++b) p.dds[a](row, b) = a == b ? product(m, a, 2, -1, 0) : product(m, a, 1, b, 1);
    }
  }
  return p;
}

ChartBox sphere_chart_box(int k, double pole_margin) {
  ChartBox box{Vec(k), Vec(k)};
  for (int a = 0; a + 1 < k; ++a) {
    box.lo[a] = pole_margin;
    box.hi[a] = std::numbers::pi - pole_margin;
  }
  box.lo[k - 1] = 0.0;
  box.hi[k - 1] = 2.0 * std::numbers::pi;
  return box;
}

ImmersionPatch wulff_patch(const AnisotropyFunction& f, int variant) {
  const int d = f.ambient_dim();
  const int n = d - 1;
  auto map = [f, n, variant](const Vec& angles) {
    const SphereChartPoint c = sphere_chart(n, variant, angles);
    const auto der = f.homogeneous_derivatives(c.s);
    PatchPoint pt;
    pt.x = der.gradient;
    pt.dx = der.hessian * c.ds;
    pt.nu = c.s;
    pt.dnu = c.ds;
    return pt;
  };
  return ImmersionPatch(d, n, sphere_chart_box(n), map, 1, "wulff");
}

ImmersionPatch product_immersion(const AnisotropyFunction& f, const SubsphereSpec& spec, double t, int variant) {
  if (t == 0.0) throw Error(ErrorKind::ZeroT, "product immersion needs t != 0");
  if (!std::isfinite(t)) throw Error(ErrorKind::InvalidArgument, "t must be finite");
  const int d = f.ambient_dim();
  const int n = d - 1;
  spec.validate(d);
  const int k = spec.k;
  const Mat frame_t = spec.frame.transpose();            // d x (k+1)
  const Mat comp = complement_of_rows(spec.frame);       // d x (n-k)
  auto map = [f, frame_t, comp, t, k, n, variant](const Vec& params) {
    const SphereChartPoint c = sphere_chart(k, variant, params.head(k));
    const Vec u = frame_t * c.s;
    const Mat du = frame_t * c.ds;
    const auto der = f.homogeneous_derivatives(u);
    PatchPoint pt;
    pt.x = comp * params.tail(n - k) - t * der.gradient;
    pt.dx = Mat(u.size(), n);
    pt.dx.leftCols(k) = -t * der.hessian * du;
    pt.dx.rightCols(n - k) = comp;
    pt.nu = u;
    Mat dnu = Mat::Zero(u.size(), n);
    dnu.leftCols(k) = du;
    pt.dnu = dnu;
    return pt;
  };
  const ChartBox sphere_box = sphere_chart_box(k);
  ChartBox box{Vec(n), Vec(n)};
  box.lo.head(k) = sphere_box.lo;
  box.hi.head(k) = sphere_box.hi;
  box.lo.tail(n - k).setConstant(-1.0);
  box.hi.tail(n - k).setConstant(1.0);
  return ImmersionPatch(d, n, box, map, 1, "product");
}

void write_obj(std::ostream& out, const WulffSample& sample) {
  if (sample.triangles.empty()) throw Error(ErrorKind::InvalidArgument, "OBJ export needs a triangulated sample");
  out << "# wulfflab wulff-shape\n";
  for (const auto& p : sample.points) {
    if (p.y.size() != 3) throw Error(ErrorKind::InvalidArgument, "OBJ export needs points in R^3");
    out << "v " << format_double(p.y[0]) << ' ' << format_double(p.y[1]) << ' ' << format_double(p.y[2]) << '\n';
  }
  for (const auto& t : sample.triangles) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

void write_csv(std::ostream& out, const WulffSample& sample) {
  out << "# wulfflab wulff-sample v1\n";
  if (sample.points.empty()) return;
  const int d = static_cast<int>(sample.points.front().u.size());
  std::vector<std::string> header;
  for (int i = 0; i < d; ++i) header.push_back("u" + std::to_string(i));
  for (int i = 0; i < d; ++i) header.push_back("phi" + std::to_string(i));
  write_csv_header(out, header);
  for (const auto& p : sample.points) {
    std::vector<double> row(p.u.data(), p.u.data() + d);
    row.insert(row.end(), p.y.data(), p.y.data() + d);
    write_csv_row(out, row);
  }
}

}  // namespace wulfflab
