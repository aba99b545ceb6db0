#include "wulfflab/hypersurface.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "wulfflab/errors.hpp"
#include "wulfflab/parallel.hpp"
#include "wulfflab/report.hpp"

namespace wulfflab {

bool ChartBox::contains(const Vec& p, double slack) const {
  if (p.size() != lo.size()) return false;
  for (int i = 0; i < p.size(); ++i)
    if (p[i] < lo[i] - slack || p[i] > hi[i] + slack) return false;
  return true;
}

ImmersionPatch::ImmersionPatch(int ambient_dim, int chart_dim, ChartBox domain, PatchMap map, int orientation,
                               std::string name)
    : ambient_dim_(ambient_dim),
      chart_dim_(chart_dim),
      domain_(std::move(domain)),
      map_(std::move(map)),
      orientation_(orientation >= 0 ? 1 : -1),
      name_(std::move(name)) {
  if (chart_dim_ + 1 != ambient_dim_) throw Error(ErrorKind::InvalidArgument, "patch must be a hypersurface");
  if (domain_.lo.size() != chart_dim_ || domain_.hi.size() != chart_dim_) {
    throw Error(ErrorKind::InvalidArgument, "domain box has wrong dimension");
  }
}

ImmersionPatch ImmersionPatch::from_position(int ambient_dim, int chart_dim, ChartBox domain,
                                             std::function<Vec(const Vec&)> position, int orientation,
                                             std::string name, double fd_step) {
  auto map = [position = std::move(position), chart_dim, ambient_dim, fd_step](const Vec& p) {
    const double h2 = 1e-4;
    PatchPoint pt;
    pt.x = position(p);
    pt.dx = Mat(ambient_dim, chart_dim);
    for (int i = 0; i < chart_dim; ++i) {
      Vec a = p, b = p;
      a[i] += fd_step;
      b[i] -= fd_step;
      pt.dx.col(i) = (position(a) - position(b)) / (2.0 * fd_step);
    }
    pt.ddx.assign(chart_dim, Mat(ambient_dim, chart_dim));
    for (int i = 0; i < chart_dim; ++i) {
      Vec a = p, b = p;
      a[i] += h2;
      b[i] -= h2;
      pt.ddx[i].col(i) = (position(a) - 2.0 * pt.x + position(b)) / (h2 * h2);
      for (int j = i + 1; j < chart_dim; ++j) {
        Vec pp = p, pm = p, mp = p, mm = p;
        pp[i] += h2, pp[j] += h2;
        pm[i] += h2, pm[j] -= h2;
        mp[i] -= h2, mp[j] += h2;
        mm[i] -= h2, mm[j] -= h2;
        const Vec v = (position(pp) - position(pm) - position(mp) + position(mm)) / (4.0 * h2 * h2);
        pt.ddx[i].col(j) = v;
        pt.ddx[j].col(i) = v;
      }
    }
    return pt;
  };
  return ImmersionPatch(ambient_dim, chart_dim, std::move(domain), std::move(map), orientation, std::move(name));
}

PatchPoint ImmersionPatch::evaluate(const Vec& params) const {
  if (params.size() != chart_dim_) throw Error(ErrorKind::InvalidArgument, "chart point has wrong dimension");
  PatchPoint pt = map_(params);
  if (orientation_ < 0) {
    if (pt.nu) *pt.nu = -*pt.nu;
    if (pt.dnu) *pt.dnu = -*pt.dnu;
  }
  return pt;
}

ImmersionPatch ImmersionPatch::flipped() const {
  ImmersionPatch p = *this;
  p.orientation_ = -orientation_;
  return p;
}

ImmersionPatch ImmersionPatch::scaled(double c) const {
  if (!(c > 0.0)) throw Error(ErrorKind::InvalidArgument, "homothety factor must be positive");
  auto inner = map_;
  auto map = [inner, c](const Vec& p) {
    PatchPoint pt = inner(p);
    pt.x *= c;
    pt.dx *= c;
    for (auto& m : pt.ddx) m *= c;
    return pt;
  };
  return ImmersionPatch(ambient_dim_, chart_dim_, domain_, map, orientation_, name_);
}

std::vector<Vec> ImmersionPatch::grid(int per_axis) const {
  if (per_axis < 1) throw Error(ErrorKind::InvalidArgument, "grid needs per_axis >= 1");
  std::vector<Vec> pts;
  std::vector<int> idx(chart_dim_, 0);
  while (true) {
    Vec p(chart_dim_);
    for (int i = 0; i < chart_dim_; ++i) {
      const double s = per_axis == 1 ? 0.5 : static_cast<double>(idx[i]) / (per_axis - 1);
      p[i] = domain_.lo[i] + s * (domain_.hi[i] - domain_.lo[i]);
    }
    pts.push_back(p);
    int i = 0;
    while (i < chart_dim_ && ++idx[i] == per_axis) idx[i++] = 0;
    if (i == chart_dim_) break;
  }
  return pts;
}

namespace {

// Generalised cross product: nu_i is the cofactor of row i in the last
// column of [dx | nu], so det[dx | nu] = |nu|^2 > 0.
Vec cofactor_normal(const Mat& dx) {
  const int d = static_cast<int>(dx.rows());
  Vec nu(d);
  Mat minor(d - 1, d - 1);
  for (int i = 0; i < d; ++i) {
    int r = 0;
    for (int k = 0; k < d; ++k) {
      if (k == i) continue;
      minor.row(r++) = dx.row(k);
    }
    const double sign = ((i + d - 1) % 2 == 0) ? 1.0 : -1.0;
    nu[i] = sign * minor.determinant();
  }
  return nu;
}

}  // namespace

Frame frame_at(const ImmersionPatch& patch, const Vec& params) {
  const PointGeometry g = geometry_at(patch, params);
  return Frame{g.x, g.dx, g.nu, g.metric};
}

PointGeometry geometry_at(const ImmersionPatch& patch, const Vec& params) {
  const PatchPoint pt = patch.evaluate(params);
  const int n = patch.chart_dim();
  const double smin = min_singular_value(pt.dx);
  if (!(smin >= 1e-8)) {
    throw Error(ErrorKind::RankDeficient, "smallest singular value of dx is " + std::to_string(smin));
  }
  PointGeometry g;
  g.params = params;
  g.x = pt.x;
  g.dx = pt.dx;
  g.metric = pt.dx.transpose() * pt.dx;
  if (pt.nu) {
    g.nu = pt.nu->normalized();
  } else {
    g.nu = patch.orientation() * cofactor_normal(pt.dx).normalized();
  }
  const Eigen::LDLT<Mat> metric_solve(g.metric);
  if (pt.dnu) {
    g.dnu = *pt.dnu;
    g.w = -metric_solve.solve(pt.dx.transpose() * g.dnu);
  } else {
    if (static_cast<int>(pt.ddx.size()) != n) {
      throw Error(ErrorKind::InvalidArgument, "patch provides neither second derivatives nor dnu");
    }
    Mat b(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) b(i, j) = pt.ddx[i].col(j).dot(g.nu);
    b = 0.5 * (b + b.transpose());
    g.w = metric_solve.solve(b);
    g.dnu = -pt.dx * g.w;
  }
  return g;
}

Mat shape_operator(const ImmersionPatch& patch, const Vec& params) { return geometry_at(patch, params).w; }

namespace {

AnisotropyEval convex_eval(const AnisotropyFunction& f, const Vec& nu) {
  AnisotropyEval e = evaluate(f, nu);
  if (!e.convex()) {
    throw Error(ErrorKind::ConvexityViolation,
                "A_F not positive at the normal (min eigenvalue " + std::to_string(e.min_eigenvalue) + ")");
  }
  return e;
}

}  // namespace

Mat f_weingarten(const AnisotropyFunction& f, const PointGeometry& geo) {
  const AnisotropyEval e = convex_eval(f, geo.nu);
  const Mat b = e.basis.transpose() * geo.dx;
  return b.partialPivLu().solve(e.a_matrix * b * geo.w);
}

Mat f_weingarten(const AnisotropyFunction& f, const ImmersionPatch& patch, const Vec& params) {
  return f_weingarten(f, geometry_at(patch, params));
}

WeingartenCrossCheck f_weingarten_cross_check(const AnisotropyFunction& f, const ImmersionPatch& patch,
                                              const Vec& params, double fd_step) {
  const PointGeometry geo = geometry_at(patch, params);
  WeingartenCrossCheck out;
  out.via_a_matrix = f_weingarten(f, geo);
  const int n = patch.chart_dim();
  Mat dphi(patch.ambient_dim(), n);
  for (int i = 0; i < n; ++i) {
    Vec a = params, b = params;
    a[i] += fd_step;
    b[i] -= fd_step;
    dphi.col(i) = (phi(f, frame_at(patch, a).nu) - phi(f, frame_at(patch, b).nu)) / (2.0 * fd_step);
  }
  out.via_phi_derivative = -geo.metric.ldlt().solve(geo.dx.transpose() * dphi);
  out.max_abs_diff = (out.via_a_matrix - out.via_phi_derivative).cwiseAbs().maxCoeff();
  return out;
}

SymmetrizedShape symmetrized_shape(const AnisotropyFunction& f, const PointGeometry& geo) {
  SymmetrizedShape s;
  s.aniso = convex_eval(f, geo.nu);
  s.b = s.aniso.basis.transpose() * geo.dx;
  const Mat t = s.b * geo.w * s.b.inverse();
  s.t_tilde = 0.5 * (t + t.transpose());
  const Mat& c = s.aniso.c_matrix;
  Mat m = c * s.t_tilde * c;
  m = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> eig(m);
  const int n = static_cast<int>(m.rows());

  // Descending order; exact ties broken by the lexicographic order of the
  // sign-normalised eigenvectors.
  Mat vecs = eig.eigenvectors();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (std::abs(vecs(i, j)) > 1e-12) {
        if (vecs(i, j) < 0) vecs.col(j) = -vecs.col(j);
        break;
      }
    }
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const Vec& ev = eig.eigenvalues();
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (std::abs(ev[a] - ev[b]) > 1e-14) return ev[a] > ev[b];
    for (int i = 0; i < n; ++i)
      if (vecs(i, a) != vecs(i, b)) return vecs(i, a) > vecs(i, b);
    return a < b;
  });
  s.lambdas = Vec(n);
  s.e_vectors = Mat(n, n);
  for (int j = 0; j < n; ++j) {
    s.lambdas[j] = ev[order[j]];
    s.e_vectors.col(j) = vecs.col(order[j]);
  }
  return s;
}

std::vector<CurvatureGroup> cluster_values(const Vec& descending, double tol) {
  std::vector<CurvatureGroup> groups;
  double sum = 0.0;
  for (int i = 0; i < descending.size(); ++i) {
    if (i == 0 || descending[i - 1] - descending[i] > tol) {
      if (!groups.empty()) groups.back().value = sum / groups.back().multiplicity;
      groups.push_back({descending[i], 0});
      sum = 0.0;
    }
    sum += descending[i];
    ++groups.back().multiplicity;
  }
  if (!groups.empty()) groups.back().value = sum / groups.back().multiplicity;
  return groups;
}

CurvatureSpectrum anisotropic_curvatures(const AnisotropyFunction& f, const PointGeometry& geo,
                                         double cluster_tol) {
  const SymmetrizedShape s = symmetrized_shape(f, geo);
  CurvatureSpectrum out;
  out.lambdas = s.lambdas;
  out.groups = cluster_values(s.lambdas, cluster_tol);
  int acc = 0;
  for (const auto& g : out.groups) out.group_offsets.push_back(acc += g.multiplicity);
  // eps_i = C_F e_i are eigenvectors of S_F; pull back to the chart.
  const Mat eps = s.aniso.c_matrix * s.e_vectors;
  out.eigenframe = s.b.partialPivLu().solve(eps);
  for (int j = 0; j < out.eigenframe.cols(); ++j) {
    const double len = (geo.dx * out.eigenframe.col(j)).norm();
    if (len > 0) out.eigenframe.col(j) /= len;
  }
  out.sym_functions = elementary_symmetric(s.lambdas);
  out.mean = s.lambdas.sum() / static_cast<double>(s.lambdas.size());
  return out;
}

CurvatureSpectrum anisotropic_curvatures(const AnisotropyFunction& f, const ImmersionPatch& patch,
                                         const Vec& params, double cluster_tol) {
  return anisotropic_curvatures(f, geometry_at(patch, params), cluster_tol);
}

double anisotropic_mean(const AnisotropyFunction& f, const ImmersionPatch& patch, const Vec& params) {
  return f_weingarten(f, patch, params).trace() / patch.chart_dim();
}

double anisotropic_mean_phi_route(const AnisotropyFunction& f, const ImmersionPatch& patch, const Vec& params,
                                  double fd_step) {
  return f_weingarten_cross_check(f, patch, params, fd_step).via_phi_derivative.trace() / patch.chart_dim();
}

Vec classical_curvatures(const ImmersionPatch& patch, const Vec& params) {
  const PointGeometry g = geometry_at(patch, params);
  // W is self-adjoint for the metric; use the symmetric form L^-1 b L^-T.
  const Mat b = g.metric * g.w;
  const Eigen::LLT<Mat> llt(g.metric);
  const Mat l = llt.matrixL();
  const Mat linv = l.inverse();
  Mat m = linv * (0.5 * (b + b.transpose())) * linv.transpose();
  Vec ev = Eigen::SelfAdjointEigenSolver<Mat>(m).eigenvalues();
  std::sort(ev.data(), ev.data() + ev.size(), std::greater<>());
  return ev;
}

std::vector<CurvatureRow> curvature_batch(const AnisotropyFunction& f, const ImmersionPatch& patch,
                                          const std::vector<Vec>& grid, double cluster_tol) {
  std::vector<CurvatureRow> rows(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    const PointGeometry g = geometry_at(patch, grid[i]);
    rows[i] = {grid[i], g.x, g.nu, anisotropic_curvatures(f, g, cluster_tol)};
  });
  return rows;
}

void write_curvature_csv(std::ostream& out, const std::vector<CurvatureRow>& rows) {
  out << "# wulfflab curvature-report v1\n";
  if (rows.empty()) return;
  const int n = static_cast<int>(rows.front().params.size());
  std::vector<std::string> header;
  for (int i = 0; i < n; ++i) header.push_back("p" + std::to_string(i));
  for (int i = 0; i <= n; ++i) header.push_back("x" + std::to_string(i));
  for (int i = 0; i <= n; ++i) header.push_back("nu" + std::to_string(i));
  for (int i = 1; i <= n; ++i) header.push_back("lambda" + std::to_string(i));
  header.push_back("H_F");
  header.push_back("g");
  write_csv_header(out, header);
  for (const auto& r : rows) {
    std::vector<double> v;
    for (const Vec* part : {&r.params, &r.x, &r.nu, &r.spectrum.lambdas}) v.insert(v.end(), part->data(), part->data() + part->size());
    v.push_back(r.spectrum.mean);
    v.push_back(r.spectrum.g());
    write_csv_row(out, v);
  }
}

}  // namespace wulfflab
