#include "wulfflab/classify_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <json.hpp>

#include "json_io.hpp"
#include "wulfflab/errors.hpp"
#include "wulfflab/parallel.hpp"
#include "wulfflab/parallel_focal.hpp"

namespace wulfflab {

IsoparametricReport detect_isoparametric(const AnisotropyFunction& f, const ImmersionPatch& patch,
                                         const std::vector<Vec>& grid, double iso_tol, double cluster_tol) {
  if (grid.empty()) throw Error(ErrorKind::InvalidArgument, "empty sample grid");
  for (const auto& p : grid)
    if (!patch.domain().contains(p, 1e-9)) throw Error(ErrorKind::InvalidArgument, "grid point outside the chart");
  const std::vector<CurvatureRow> rows = curvature_batch(f, patch, grid, cluster_tol);
  const int n = patch.chart_dim();
  const double count = static_cast<double>(rows.size());

  IsoparametricReport r;
  Vec lo = Vec::Constant(n, std::numeric_limits<double>::infinity());
  Vec hi = -lo;
  Vec sum = Vec::Zero(n), sum2 = Vec::Zero(n);
  const int g0 = rows.front().spectrum.g();
  for (const auto& row : rows) {
    const Vec& l = row.spectrum.lambdas;
    lo = lo.cwiseMin(l);
    hi = hi.cwiseMax(l);
    sum += l;
    sum2 += l.cwiseProduct(l);
    if (row.spectrum.g() != g0) r.group_mismatch = true;
  }
  r.mean_lambdas = sum / count;
  r.spread = (hi - lo).maxCoeff();
  r.max_std = 0.0;
  for (int i = 0; i < n; ++i) {
    const double var = std::max(0.0, sum2[i] / count - r.mean_lambdas[i] * r.mean_lambdas[i]);
    r.max_std = std::max(r.max_std, std::sqrt(var));
  }

  // Groups by sorted order, using the first point's clustering.
  int offset = 0;
  for (const auto& g : rows.front().spectrum.groups) {
    GroupStats s;
    s.multiplicity = g.multiplicity;
    s.min = lo.segment(offset, g.multiplicity).minCoeff();
    s.max = hi.segment(offset, g.multiplicity).maxCoeff();
    s.mean = r.mean_lambdas.segment(offset, g.multiplicity).mean();
    r.groups.push_back(s);
    offset += g.multiplicity;
  }
  r.isoparametric = !r.group_mismatch && r.spread < iso_tol;
  return r;
}

std::string_view to_string(CaseLabel label) {
  switch (label) {
    case CaseLabel::Plane:
      return "plane";
    case CaseLabel::WulffShape:
      return "wulff_shape";
    case CaseLabel::ProductK:
      return "product_k";
    case CaseLabel::LocalOnly:
      return "local_only";
    case CaseLabel::NotIsoparametric:
      return "not_isoparametric";
    case CaseLabel::InconsistentCompleteness:
      return "inconsistent_completeness";
  }
  return "unknown";
}

WulffCenterFit fit_wulff_center(const AnisotropyFunction& f, const std::vector<Vec>& points, double lambda) {
  if (points.empty()) throw Error(ErrorKind::InvalidArgument, "no points for the center fit");
  const int d = static_cast<int>(points.front().size());
  WulffCenterFit out;
  out.center = Vec::Zero(d);
  for (const auto& p : points) out.center += p;
  out.center /= static_cast<double>(points.size());

  const int m = static_cast<int>(points.size());
  Vec r(m);
  Mat j(m, d);
  auto evaluate_at = [&](const Vec& q) {
    parallel_for(points.size(), [&](std::size_t i) {
      const Vec y = -lambda * (points[i] - q);
      const DualNormResult dn = dual_norm_solve(f, y);
      r[i] = dn.value - 1.0;
      // grad F*(y) = z*/F(z*); dy/dq = lambda I.
      j.row(i) = (lambda / f.value(dn.maximizer)) * dn.maximizer.transpose();
    });
  };
  evaluate_at(out.center);
  for (out.iterations = 0; out.iterations < 30; ++out.iterations) {
    const Vec step = j.colPivHouseholderQr().solve(-r);
    out.center += step;
    evaluate_at(out.center);
    if (step.norm() < 1e-13 * std::max(1.0, out.center.norm())) break;
  }
  out.max_residual = r.cwiseAbs().maxCoeff();
  return out;
}

namespace {

Vec nearest_to_center(const ImmersionPatch& patch, const std::vector<Vec>& grid) {
  const Vec mid = 0.5 * (patch.domain().lo + patch.domain().hi);
  const Vec* best = &grid.front();
  for (const auto& p : grid)
    if ((p - mid).norm() < (*best - mid).norm()) best = &p;
  return *best;
}

}  // namespace

ClassificationVerdict classify(const AnisotropyFunction& f, const ImmersionPatch& patch,
                               const std::vector<Vec>& grid, bool completeness_asserted,
                               const ClassifyOptions& options) {
  const IsoparametricReport iso = detect_isoparametric(f, patch, grid, options.iso_tol, options.cluster_tol);
  ClassificationVerdict v;
  v.isoparametric = iso.isoparametric;
  v.spread = iso.spread;
  v.g = static_cast<int>(iso.groups.size());
  for (const auto& g : iso.groups) v.groups.push_back({g.mean, g.multiplicity});
  v.diagnostics["spread"] = iso.spread;
  v.diagnostics["max_std"] = iso.max_std;
  v.diagnostics["group_mismatch"] = iso.group_mismatch ? 1.0 : 0.0;
  if (!iso.isoparametric) {
    v.label = CaseLabel::NotIsoparametric;
    return v;
  }
  if (!completeness_asserted) {
    v.label = CaseLabel::LocalOnly;
    return v;
  }

  const double zero_tol = std::max(options.cluster_tol, options.iso_tol);
  auto is_zero = [&](double x) { return std::abs(x) < zero_tol; };

  if (v.g == 1 && is_zero(v.groups[0].value)) {
    v.label = CaseLabel::Plane;
    return v;
  }
  if (v.g == 1) {
    v.label = CaseLabel::WulffShape;
    const double lambda = v.groups[0].value;
    std::vector<Vec> pts;
    const std::size_t stride = std::max<std::size_t>(1, grid.size() / std::max(1, options.center_fit_points));
    for (std::size_t i = 0; i < grid.size(); i += stride) pts.push_back(frame_at(patch, grid[i]).x);
    const WulffCenterFit fit = fit_wulff_center(f, pts, lambda);
    v.diagnostics["center_norm"] = fit.center.norm();
    v.diagnostics["center_dual_residual"] = fit.max_residual;
    v.cross_check_passed = fit.max_residual < 1e-6;
    return v;
  }
  if (v.g == 2 && (is_zero(v.groups[0].value) != is_zero(v.groups[1].value))) {
    v.label = CaseLabel::ProductK;
    const int nz = is_zero(v.groups[0].value) ? 1 : 0;
    v.k = v.groups[nz].multiplicity;
    try {
      const FocalData fd = cartan_residual(f, patch, v.groups[nz].value, nearest_to_center(patch, grid));
      const double ii_norm = fd.ii_matrix.size() ? fd.ii_matrix.cwiseAbs().maxCoeff() : 0.0;
      v.diagnostics["cartan_residual"] = fd.cartan_residual;
      v.diagnostics["focal_ii_norm"] = ii_norm;
      v.cross_check_passed = std::abs(fd.cartan_residual) < 1e-6 && ii_norm < 1e-6;
    } catch (const Error&) {
      v.diagnostics["cartan_residual"] = std::numeric_limits<double>::quiet_NaN();
      v.cross_check_passed = false;
    }
    return v;
  }
  v.label = CaseLabel::InconsistentCompleteness;
  return v;
}

void axisymmetric_eigenvalues(const std::vector<double>& c, double z, double& alpha, double& beta) {
  // With w = z^2: z f' = w g1 and f'' = g2, where g1 = sum 2j c_j w^(j-1)
  // and g2 = sum 2j (2j-1) c_j w^(j-1).
  const double w = z * z;
  double f = c.empty() ? 0.0 : c[0], g1 = 0.0, g2 = 0.0, wj = 1.0;
  for (std::size_t j = 1; j < c.size(); ++j) {
    const double e = 2.0 * static_cast<double>(j);
    g1 += e * c[j] * wj;
    g2 += e * (e - 1.0) * c[j] * wj;
    wj *= w;
    f += c[j] * wj;
  }
  alpha = f - w * g1;
  beta = alpha + (1.0 - w) * g2;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Geometry of the target frozen once; only F changes during the fit.
struct FitPoint {
  Mat t_tilde;  ///< shape operator in an orthonormal basis of nu^perp
  Vec meridian;  ///< unit meridian direction in that basis (zero at the poles)
  double z = 0.0;
};

struct FitProblem {
  std::vector<FitPoint> points;
  int n = 0;
  FitOptions opt;
  std::vector<double> z_scan;

  std::vector<double> full(const Vec& c) const {
    std::vector<double> out{1.0};
    out.insert(out.end(), c.data(), c.data() + c.size());
    return out;
  }

  double min_eigenvalue(const std::vector<double>& coef) const {
    double m = kInf;
    for (double z : z_scan) {
      double a, b;
      axisymmetric_eigenvalues(coef, z, a, b);
      m = std::min({m, a, b});
    }
    return m;
  }

  // lambdas at each point, descending; false if A_F is not positive somewhere.
  bool spectra(const std::vector<double>& coef, std::vector<Vec>& out) const {
    out.resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      const FitPoint& p = points[i];
      double a, b;
      axisymmetric_eigenvalues(coef, p.z, a, b);
      if (!(a > 0.0) || !(b > 0.0)) return false;
      const double sa = std::sqrt(a), sb = std::sqrt(b);
      const Mat c = sa * Mat::Identity(n, n) + (sb - sa) * p.meridian * p.meridian.transpose();
      Mat m = c * p.t_tilde * c;
      m = 0.5 * (m + m.transpose());
      Vec ev = Eigen::SelfAdjointEigenSolver<Mat>(m, Eigen::EigenvaluesOnly).eigenvalues();
      std::sort(ev.data(), ev.data() + ev.size(), std::greater<>());
      out[i] = ev;
    }
    return true;
  }

  double objective(const Vec& c) const {
    const std::vector<double> coef = full(c);
    const double me = min_eigenvalue(coef);
    const double pen = opt.penalty * std::pow(std::max(0.0, opt.margin - me), 2);
    std::vector<Vec> lam;
    if (!spectra(coef, lam)) return kInf;
    Vec sum = Vec::Zero(n), sum2 = Vec::Zero(n);
    for (const auto& l : lam) {
      sum += l;
      sum2 += l.cwiseProduct(l);
    }
    const double m = static_cast<double>(lam.size());
    double var = 0.0;
    for (int i = 0; i < n; ++i) var += std::max(0.0, sum2[i] / m - (sum[i] / m) * (sum[i] / m));
    return var + pen;
  }

  Vec gradient(const Vec& c, double fc) const {
    Vec g(c.size());
    const double h = opt.fd_step;
    for (int i = 0; i < c.size(); ++i) {
      Vec a = c, b = c;
      a[i] += h;
      b[i] -= h;
      const double fa = objective(a), fb = objective(b);
      if (std::isfinite(fa) && std::isfinite(fb)) {
        g[i] = (fa - fb) / (2.0 * h);
      } else if (std::isfinite(fb)) {
        g[i] = (fc - fb) / h;
      } else {
        g[i] = (fa - fc) / h;
      }
    }
    return g;
  }
};

struct RestartOutcome {
  Vec c;
  double objective = kInf;
  std::vector<double> history;
  int iterations = 0;
};

RestartOutcome bfgs(const FitProblem& prob, Vec c) {
  RestartOutcome out;
  double fc = prob.objective(c);
  out.history.push_back(fc);
  const int m = static_cast<int>(c.size());
  Mat hinv = Mat::Identity(m, m);
  Vec g = prob.gradient(c, fc);
  for (int it = 0; it < prob.opt.max_iterations; ++it) {
    out.iterations = it + 1;
    if (g.norm() < 1e-14 || fc == 0.0) break;
    Vec dir = -hinv * g;
    if (dir.dot(g) >= 0.0) {
      hinv.setIdentity();
      dir = -g;
    }
    double step = 1.0;
    double fn = kInf;
    Vec cn;
    const double slope = dir.dot(g);
    for (int ls = 0; ls < 60; ++ls) {
      cn = c + step * dir;
      fn = prob.objective(cn);
      if (std::isfinite(fn) && fn <= fc + 1e-4 * step * slope) break;
      step *= 0.5;
      fn = kInf;
    }
    if (!std::isfinite(fn)) break;
    const Vec gn = prob.gradient(cn, fn);
    const Vec s = cn - c;
    const Vec y = gn - g;
    const double sy = s.dot(y);
    if (sy > 1e-300) {
      const double rho = 1.0 / sy;
      const Mat i = Mat::Identity(m, m);
      hinv = (i - rho * s * y.transpose()) * hinv * (i - rho * y * s.transpose()) + rho * s * s.transpose();
    }
    const double gain = fc - fn;
    c = cn;
    g = gn;
    fc = fn;
    out.history.push_back(fc);
    if (gain <= 1e-15 * std::max(fc, 1e-300) && s.norm() < 1e-12) break;
  }
  out.c = c;
  out.objective = fc;
  return out;
}

}  // namespace

FitResult fit_anisotropy(const ImmersionPatch& target, int basis_degree, const std::vector<Vec>& grid,
                         const FitOptions& options) {
  if (basis_degree < 2 || basis_degree > 8 || basis_degree % 2 != 0) {
    throw Error(ErrorKind::InvalidArgument, "basis_degree must be even and in [2, 8]");
  }
  if (grid.empty()) throw Error(ErrorKind::InvalidArgument, "empty sample grid");
  if (options.restarts < 1) throw Error(ErrorKind::InvalidArgument, "need at least one restart");
  const int d = target.ambient_dim();
  const int n = target.chart_dim();
  const int m = basis_degree / 2;

  FitProblem prob;
  prob.n = n;
  prob.opt = options;
  for (int i = 0; i <= 400; ++i) prob.z_scan.push_back(-1.0 + i / 200.0);
  prob.points.resize(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    const PointGeometry geo = geometry_at(target, grid[i]);
    const Mat e = orthonormal_complement(geo.nu);
    const Mat b = e.transpose() * geo.dx;
    Mat t = b * geo.w * b.inverse();
    FitPoint p;
    p.t_tilde = 0.5 * (t + t.transpose());
    p.z = geo.nu[d - 1];
    Vec axis = Vec::Zero(d);
    axis[d - 1] = 1.0;
    const Vec mer = e.transpose() * axis;
    p.meridian = mer.norm() > 1e-12 ? Vec(mer.normalized()) : Vec(Vec::Zero(n));
    prob.points[i] = p;
  });

  // Starting points: the isotropic F, then audited random draws.
  std::vector<Vec> starts{Vec::Zero(m)};
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> draw(-options.box, options.box);
  while (static_cast<int>(starts.size()) < options.restarts) {
    Vec c(m);
    for (int tries = 0; tries < 10000; ++tries) {
      for (int j = 0; j < m; ++j) c[j] = draw(rng);
      if (prob.min_eigenvalue(prob.full(c)) > options.margin) break;
    }
    starts.push_back(c);
  }

  std::vector<RestartOutcome> outcomes(starts.size());
  parallel_for(starts.size(), [&](std::size_t i) { outcomes[i] = bfgs(prob, starts[i]); });
  std::size_t best = 0;
  for (std::size_t i = 1; i < outcomes.size(); ++i)
    if (outcomes[i].objective < outcomes[best].objective) best = i;

  FitResult r;
  r.coefficients = prob.full(outcomes[best].c);
  r.objective_history = outcomes[best].history;
  r.objective = outcomes[best].objective;
  r.best_restart = static_cast<int>(best);
  r.iterations = outcomes[best].iterations;

  const AnisotropyFunction fitted = AnisotropyFunction::axisymmetric(d, r.coefficients);
  const ConvexityReport audit = convexity_audit(fitted, d > 3 ? 12 : 32);
  r.min_eigenvalue = audit.min_eigenvalue;
  if (!audit.pass) throw Error(ErrorKind::ConvexityViolation, "no audited iterate found");
  const IsoparametricReport iso = detect_isoparametric(fitted, target, grid, kInf);
  r.final_spread = iso.max_std;
  const double scale = iso.mean_lambdas.cwiseAbs().maxCoeff();
  r.normalized_spectrum = scale > 0 ? Vec(iso.mean_lambdas / scale) : iso.mean_lambdas;
  r.non_convergence = r.final_spread > options.target_spread;
  return r;
}

std::string to_json(const ClassificationVerdict& v) {
  nlohmann::json j;
  j["case"] = std::string(to_string(v.label));
  j["isoparametric"] = v.isoparametric;
  j["spread"] = v.spread;
  j["g"] = v.g;
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& g : v.groups) groups.push_back({{"lambda", g.value}, {"multiplicity", g.multiplicity}});
  j["groups"] = groups;
  j["k"] = v.k;
  j["cross_check_passed"] = v.cross_check_passed;
  nlohmann::json diag = nlohmann::json::object();
  for (const auto& [k, val] : v.diagnostics) diag[k] = std::isfinite(val) ? nlohmann::json(val) : nlohmann::json();
  j["diagnostics"] = diag;
  return j.dump(2);
}

std::string to_json(const FitResult& r) {
  nlohmann::json j;
  j["family"] = "axisymmetric-series";
  j["coefficients"] = r.coefficients;
  j["objective"] = r.objective;
  j["objective_history"] = r.objective_history;
  j["final_spread"] = r.final_spread;
  j["normalized_spectrum"] = json_io::to_value(r.normalized_spectrum);
  j["min_eigenvalue"] = r.min_eigenvalue;
  j["best_restart"] = r.best_restart;
  j["iterations"] = r.iterations;
  j["non_convergence"] = r.non_convergence;
  return j.dump(2);
}

}  // namespace wulfflab
