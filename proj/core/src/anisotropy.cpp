#include "wulfflab/anisotropy.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include "jet.hpp"
#include "json_io.hpp"
#include "wulfflab/errors.hpp"
#include "wulfflab/parallel.hpp"
#include "wulfflab/sphere_grid.hpp"

namespace wulfflab {

using detail::Jet;

std::string_view to_string(Family family) {
  switch (family) {
    case Family::Isotropic: return "isotropic";
    case Family::QuadraticNorm: return "quadratic-norm";
    case Family::AxisymmetricSeries: return "axisymmetric-series";
    case Family::BandExtension: return "band-extension";
    case Family::Tabulated: return "tabulated";
  }
  return "unknown";
}

std::string_view to_string(DerivativeMode mode) {
  return mode == DerivativeMode::Analytic ? "analytic" : "finite-difference";
}

Family family_from_string(std::string_view name) {
  for (Family f : {Family::Isotropic, Family::QuadraticNorm, Family::AxisymmetricSeries,
                   Family::BandExtension, Family::Tabulated}) {
    if (name == to_string(f)) return f;
  }
  throw Error(ErrorKind::Parse, "unknown anisotropy family '" + std::string(name) + "'");
}

DerivativeMode derivative_mode_from_string(std::string_view name) {
  if (name == "analytic") return DerivativeMode::Analytic;
  if (name == "finite-difference") return DerivativeMode::FiniteDifference;
  throw Error(ErrorKind::Parse, "unknown derivative_mode '" + std::string(name) + "'");
}

namespace {

void check_dim(int ambient_dim) {
  if (ambient_dim < 2 || ambient_dim > detail::kMaxVars) {
    throw Error(ErrorKind::InvalidArgument,
                "ambient_dim must be in [2, " + std::to_string(detail::kMaxVars) + "]");
  }
}

std::vector<double> natural_spline_moments(const std::vector<double>& f) {
  const int m = static_cast<int>(f.size());
  const double h = 2.0 / (m - 1);
  std::vector<double> moments(m, 0.0);
  if (m < 3) return moments;
  // Tridiagonal system for interior moments: M_{k-1} + 4 M_k + M_{k+1} = 6 (f_{k+1} - 2 f_k + f_{k-1}) / h^2.
  const int n = m - 2;
  std::vector<double> diag(n, 4.0), rhs(n);
  for (int k = 0; k < n; ++k) rhs[k] = 6.0 * (f[k + 2] - 2.0 * f[k + 1] + f[k]) / (h * h);
  for (int k = 1; k < n; ++k) {
    const double w = 1.0 / diag[k - 1];
    diag[k] -= w;
    rhs[k] -= w * rhs[k - 1];
  }
  moments[n] = rhs[n - 1] / diag[n - 1];
  for (int k = n - 2; k >= 0; --k) moments[k + 1] = (rhs[k] - moments[k + 2]) / diag[k];
  return moments;
}

template <class T>
T make_constant(double c, const T& like) {
  if constexpr (std::is_same_v<T, double>) {
    (void)like;
    return c;
  } else {
    return Jet(c, like.size());
  }
}

template <class T>
T hom_value(const AnisotropyFunction& f, const std::vector<T>& y);

template <class T>
T norm_of(const std::vector<T>& y) {
  using std::sqrt;
  T s = y[0] * y[0];
  for (std::size_t i = 1; i < y.size(); ++i) s = s + y[i] * y[i];
  return sqrt(s);
}

template <class T>
T spline_profile(const AnisotropyFunction& f, const T& z) {
  const auto& samples = f.params();
  const auto& moments = f.spline_moments();
  const int m = static_cast<int>(samples.size());
  const double h = 2.0 / (m - 1);
  const double zv = std::clamp(detail::value_of(z), -1.0, 1.0);
  int k = static_cast<int>(std::floor((zv + 1.0) / h));
  k = std::clamp(k, 0, m - 2);
  const double zk = -1.0 + k * h;
  const T b = (z - zk) / h;
  const T a = 1.0 - b;
  const T cubic_a = a * a * a - a;
  const T cubic_b = b * b * b - b;
  return a * samples[k] + b * samples[k + 1] + (cubic_a * moments[k] + cubic_b * moments[k + 1]) * (h * h / 6.0);
}

// C^2 convex smoothing of max(x, 1) on |x - 1| < delta.
template <class T>
T smooth_max_one(const T& x, double delta) {
  const T s = x - 1.0;
  const double c = 3.0 / (4.0 * delta * delta * delta);
  const T s2 = s * s;
  return 1.0 + c * (0.5 * delta * delta * s2 - s2 * s2 / 12.0 + (2.0 / 3.0) * delta * delta * delta * s +
                    0.25 * delta * delta * delta * delta);
}

template <class T>
T band_value(const AnisotropyFunction& f, const std::vector<T>& y) {
  using std::sqrt;
  const auto& p = f.params();
  const double a = p[1], b = p[2], delta = p[3];
  const int last = static_cast<int>(y.size()) - 1;
  std::vector<T> head(y.begin(), y.begin() + last);
  T p2 = head[0] * head[0];
  for (int i = 1; i < last; ++i) p2 = p2 + head[i] * head[i];
  const T r2 = p2 + y[last] * y[last];
  const T cap = sqrt(a * a * p2 + b * b * (y[last] * y[last]));
  if (detail::value_of(p2) <= 1e-24 * detail::value_of(r2)) return cap;
  const T band = (sqrt(r2) / sqrt(p2)) * hom_value(*f.base(), head);
  const T ratio = band / cap;
  const double rv = detail::value_of(ratio);
  if (rv <= 1.0 - delta) return cap;
  if (rv >= 1.0 + delta) return band;
  return cap * smooth_max_one(ratio, delta);
}

template <class T>
T hom_value(const AnisotropyFunction& f, const std::vector<T>& y) {
  switch (f.family()) {
    case Family::Isotropic:
      return norm_of(y);
    case Family::QuadraticNorm: {
      using std::sqrt;
      const auto& q = f.params();
      T s = q[0] * (y[0] * y[0]);
      for (std::size_t i = 1; i < y.size(); ++i) s = s + q[i] * (y[i] * y[i]);
      return sqrt(s);
    }
    case Family::AxisymmetricSeries: {
      const T r = norm_of(y);
      const T z = y.back() / r;
      const T w = z * z;
      const auto& c = f.params();
      T acc = make_constant(c.back(), r);
      for (int j = static_cast<int>(c.size()) - 2; j >= 0; --j) acc = acc * w + c[j];
      return r * acc;
    }
    case Family::Tabulated: {
      const T r = norm_of(y);
      return r * spline_profile(f, y.back() / r);
    }
    case Family::BandExtension:
      return band_value(f, y);
  }
  throw Error(ErrorKind::InvalidArgument, "unhandled family");
}

std::vector<double> to_std(const Vec& y) { return std::vector<double>(y.data(), y.data() + y.size()); }

AnisotropyFunction::Derivatives jet_derivatives(const AnisotropyFunction& f, const Vec& y) {
  const int d = static_cast<int>(y.size());
  std::vector<Jet> jy;
  jy.reserve(d);
  for (int i = 0; i < d; ++i) jy.push_back(Jet::variable(y[i], i, d));
  const Jet r = hom_value(f, jy);
  AnisotropyFunction::Derivatives out;
  out.value = r.v;
  out.gradient = r.g;
  out.hessian = r.h;
  return out;
}

AnisotropyFunction::Derivatives fd_derivatives(const AnisotropyFunction& f, const Vec& y) {
  const int d = static_cast<int>(y.size());
  const double scale = y.norm();
  const double h = f.fd_step() * scale;
  const double h2 = 10.0 * f.fd_step() * scale;
  auto val = [&](const Vec& p) { return hom_value(f, to_std(p)); };

  AnisotropyFunction::Derivatives out;
  out.value = val(y);
  out.gradient = Vec(d);
  out.hessian = Mat(d, d);
  for (int i = 0; i < d; ++i) {
    Vec yp = y, ym = y;
    yp[i] += h;
    ym[i] -= h;
    out.gradient[i] = (val(yp) - val(ym)) / (2.0 * h);
  }
  for (int i = 0; i < d; ++i) {
    Vec yp = y, ym = y;
    yp[i] += h2;
    ym[i] -= h2;
    out.hessian(i, i) = (val(yp) - 2.0 * out.value + val(ym)) / (h2 * h2);
    for (int j = i + 1; j < d; ++j) {
      Vec pp = y, pm = y, mp = y, mm = y;
      pp[i] += h2, pp[j] += h2;
      pm[i] += h2, pm[j] -= h2;
      mp[i] -= h2, mp[j] += h2;
      mm[i] -= h2, mm[j] -= h2;
      const double v = (val(pp) - val(pm) - val(mp) + val(mm)) / (4.0 * h2 * h2);
      out.hessian(i, j) = v;
      out.hessian(j, i) = v;
    }
  }
  return out;
}

}  // namespace

AnisotropyFunction AnisotropyFunction::isotropic(int ambient_dim) {
  check_dim(ambient_dim);
  AnisotropyFunction f;
  f.ambient_dim_ = ambient_dim;
  f.family_ = Family::Isotropic;
  return f;
}

AnisotropyFunction AnisotropyFunction::quadratic_norm(const Vec& diagonal) {
  check_dim(static_cast<int>(diagonal.size()));
  if (diagonal.minCoeff() <= 0.0) throw Error(ErrorKind::InvalidArgument, "quadratic-norm needs Q > 0");
  AnisotropyFunction f;
  f.ambient_dim_ = static_cast<int>(diagonal.size());
  f.family_ = Family::QuadraticNorm;
  f.params_ = to_std(diagonal);
  return f;
}

AnisotropyFunction AnisotropyFunction::axisymmetric(int ambient_dim, std::vector<double> coefficients) {
  check_dim(ambient_dim);
  if (coefficients.empty()) throw Error(ErrorKind::InvalidArgument, "axisymmetric-series needs c_0");
  AnisotropyFunction f;
  f.ambient_dim_ = ambient_dim;
  f.family_ = Family::AxisymmetricSeries;
  f.params_ = std::move(coefficients);
  return f;
}

AnisotropyFunction AnisotropyFunction::tabulated(int ambient_dim, std::vector<double> samples) {
  check_dim(ambient_dim);
  if (samples.size() < 4) throw Error(ErrorKind::InvalidArgument, "tabulated needs at least 4 samples");
  for (double s : samples)
    if (!(s > 0.0)) throw Error(ErrorKind::InvalidArgument, "tabulated samples must be positive");
  AnisotropyFunction f;
  f.ambient_dim_ = ambient_dim;
  f.family_ = Family::Tabulated;
  f.params_ = std::move(samples);
  f.spline_m_ = natural_spline_moments(f.params_);
  return f;
}

AnisotropyFunction AnisotropyFunction::band_extension(const AnisotropyFunction& base, double band_halfwidth,
                                                      double a, double b, double delta) {
  check_dim(base.ambient_dim() + 1);
  if (!(a > 0.0) || !(b > 0.0) || !(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "band-extension needs a, b > 0 and delta in (0, 1)");
  }
  AnisotropyFunction f;
  f.ambient_dim_ = base.ambient_dim() + 1;
  f.family_ = Family::BandExtension;
  f.params_ = {band_halfwidth, a, b, delta};
  f.base_ = std::make_shared<const AnisotropyFunction>(base);
  f.mode_ = base.mode_;
  f.fd_step_ = base.fd_step_;
  return f;
}

AnisotropyFunction AnisotropyFunction::with_mode(DerivativeMode mode, double fd_step) const {
  if (!(fd_step > 0.0)) throw Error(ErrorKind::InvalidArgument, "fd_step must be positive");
  AnisotropyFunction f = *this;
  f.mode_ = mode;
  f.fd_step_ = fd_step;
  if (base_) f.base_ = std::make_shared<const AnisotropyFunction>(base_->with_mode(mode, fd_step));
  return f;
}

double AnisotropyFunction::homogeneous(const Vec& y) const {
  if (y.size() != ambient_dim_) throw Error(ErrorKind::InvalidArgument, "dimension mismatch");
  if (y.squaredNorm() == 0.0) return 0.0;
  return hom_value(*this, to_std(y));
}

double AnisotropyFunction::value(const Vec& u) const { return homogeneous(u.normalized()); }

AnisotropyFunction::Derivatives AnisotropyFunction::homogeneous_derivatives(const Vec& y) const {
  if (y.size() != ambient_dim_) throw Error(ErrorKind::InvalidArgument, "dimension mismatch");
  if (y.squaredNorm() == 0.0) throw Error(ErrorKind::InvalidArgument, "derivatives undefined at the origin");
  Derivatives d = mode_ == DerivativeMode::Analytic ? jet_derivatives(*this, y) : fd_derivatives(*this, y);
  if (!std::isfinite(d.value) || !d.gradient.allFinite() || !d.hessian.allFinite()) {
    throw Error(ErrorKind::DerivativeFailure, "non-finite derivative values");
  }
  return d;
}

AnisotropyEval evaluate(const AnisotropyFunction& f, const Vec& u) {
  const double n = u.norm();
  if (u.size() != f.ambient_dim()) throw Error(ErrorKind::InvalidArgument, "dimension mismatch");
  if (!(std::abs(n - 1.0) <= 1e-4)) {
    throw Error(ErrorKind::NonUnitInput, "|u| = " + std::to_string(n));
  }
  AnisotropyEval e;
  e.u = u / n;
  const auto d = f.homogeneous_derivatives(e.u);
  e.value = d.value;
  e.gradient = d.gradient - e.u.dot(d.gradient) * e.u;
  e.basis = orthonormal_complement(e.u);
  Mat a = e.basis.transpose() * d.hessian * e.basis;
  e.a_matrix = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> eig(e.a_matrix);
  e.min_eigenvalue = eig.eigenvalues().minCoeff();
  if (e.min_eigenvalue >= -1e-8) {
    const Vec root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    Mat c = eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
    e.c_matrix = 0.5 * (c + c.transpose());
  }
  return e;
}

Vec phi(const AnisotropyFunction& f, const Vec& u) {
  const double n = u.norm();
  if (!(std::abs(n - 1.0) <= 1e-4)) throw Error(ErrorKind::NonUnitInput, "|u| = " + std::to_string(n));
  return f.homogeneous_derivatives(u / n).gradient;
}

namespace {

const std::vector<Vec>& dual_seed_grid(int ambient_dim) {
  static std::mutex guard;
  static std::vector<std::vector<Vec>> cache(detail::kMaxVars + 1);
  std::lock_guard lock(guard);
  auto& grid = cache[ambient_dim];
  if (grid.empty()) {
    if (ambient_dim == 2) grid = circle_grid(256);
    else if (ambient_dim == 3) grid = icosphere(8).vertices;  // level-3 geodesic subdivision
    else grid = spiral_grid(ambient_dim, 4096);
  }
  return grid;
}

}  // namespace

DualNormResult dual_norm_solve(const AnisotropyFunction& f, const Vec& y) {
  if (y.size() != f.ambient_dim()) throw Error(ErrorKind::InvalidArgument, "dimension mismatch");
  DualNormResult out;
  const double ynorm = y.norm();
  if (ynorm == 0.0) {
    out.value = 0.0;
    out.maximizer = Vec::Unit(f.ambient_dim(), 0);
    return out;
  }
  auto objective = [&](const Vec& z) { return y.dot(z) / f.homogeneous(z); };

  const auto& grid = dual_seed_grid(f.ambient_dim());
  Vec z = grid.front();
  double best = objective(z);
  for (const Vec& p : grid) {
    const double v = objective(p);
    if (v > best) best = v, z = p;
  }
  const double seed_value = best;

  // Projected gradient ascent on the sphere with adaptive step.
  double step = 0.5 / ynorm;
  int it = 0;
  while (it < 200) {
    ++it;
    const auto d = f.homogeneous_derivatives(z);
    Vec grad = y / d.value - (y.dot(z) / (d.value * d.value)) * d.gradient;
    grad -= grad.dot(z) * z;
    // The value error is quadratic in the angular error, so a 1e-9 gradient
    // leaves it at round-off.
    if (grad.norm() < 1e-9 * ynorm) break;
    bool improved = false;
    for (int halvings = 0; halvings < 60 && !improved; ++halvings) {
      const Vec trial = (z + step * grad).normalized();
      const double trial_value = objective(trial);
      if (trial_value > best) {
        z = trial;
        best = trial_value;
        improved = true;
        step *= 1.5;
      } else {
        step *= 0.5;
      }
    }
    if (!improved) break;
  }
  out.value = best;
  out.maximizer = z;
  out.iterations = it;
  // Refinement fails only if it cannot move off a seed that is not a
  // stationary point.
  if (best <= seed_value) {
    const auto d = f.homogeneous_derivatives(z);
    Vec grad = y / d.value - (y.dot(z) / (d.value * d.value)) * d.gradient;
    grad -= grad.dot(z) * z;
    out.refined = grad.norm() <= 1e-6 * ynorm;
  }
  return out;
}

double dual_norm(const AnisotropyFunction& f, const Vec& y) { return dual_norm_solve(f, y).value; }

ConvexityReport convexity_audit(const AnisotropyFunction& f, int grid_resolution, double tolerance) {
  if (grid_resolution < 8) throw Error(ErrorKind::InvalidArgument, "grid_resolution must be >= 8");
  const auto grid = sphere_grid(f.ambient_dim(), grid_resolution);
  std::vector<double> mins(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { mins[i] = evaluate(f, grid[i]).min_eigenvalue; });
  const auto it = std::min_element(mins.begin(), mins.end());
  ConvexityReport r;
  r.min_eigenvalue = *it;
  r.argmin = grid[static_cast<std::size_t>(it - mins.begin())];
  r.pass = r.min_eigenvalue > tolerance;
  r.points = grid.size();
  return r;
}

namespace json_io {

nlohmann::json to_value(const AnisotropyFunction& f) {
  nlohmann::json j;
  j["ambient_dim"] = f.ambient_dim();
  j["family"] = std::string(to_string(f.family()));
  j["params"] = f.params();
  j["derivative_mode"] = std::string(to_string(f.derivative_mode()));
  j["fd_step"] = f.fd_step();
  if (f.base()) j["base"] = to_value(*f.base());
  return j;
}

AnisotropyFunction anisotropy_from_value(const nlohmann::json& j) {
  static const std::vector<std::string> known = {"ambient_dim", "family", "params", "derivative_mode",
                                                 "fd_step", "base"};
  if (!j.is_object()) throw Error(ErrorKind::Parse, "anisotropy document must be an object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw Error(ErrorKind::Parse, "unknown anisotropy field '" + key + "'");
    }
  }
  try {
    const int dim = j.at("ambient_dim").get<int>();
    const Family family = family_from_string(j.at("family").get<std::string>());
    const auto params = j.value("params", std::vector<double>{});
    const DerivativeMode mode = derivative_mode_from_string(j.value("derivative_mode", std::string("analytic")));
    const double step = j.value("fd_step", 1e-5);
    auto need = [&](std::size_t count) {
      if (params.size() != count) {
        throw Error(ErrorKind::Parse, std::string(to_string(family)) + " expects " + std::to_string(count) +
                                          " params, got " + std::to_string(params.size()));
      }
    };
    AnisotropyFunction f = AnisotropyFunction::isotropic(std::max(dim, 2));
    switch (family) {
      case Family::Isotropic:
        need(0);
        f = AnisotropyFunction::isotropic(dim);
        break;
      case Family::QuadraticNorm:
        need(static_cast<std::size_t>(dim));
        f = AnisotropyFunction::quadratic_norm(Eigen::Map<const Vec>(params.data(), dim));
        break;
      case Family::AxisymmetricSeries:
        f = AnisotropyFunction::axisymmetric(dim, params);
        break;
      case Family::Tabulated:
        f = AnisotropyFunction::tabulated(dim, params);
        break;
      case Family::BandExtension: {
        need(4);
        if (!j.contains("base")) throw Error(ErrorKind::Parse, "band-extension needs a 'base' document");
        const AnisotropyFunction base = anisotropy_from_value(j.at("base"));
        if (base.ambient_dim() + 1 != dim) throw Error(ErrorKind::Parse, "band-extension base has wrong dimension");
        f = AnisotropyFunction::band_extension(base, params[0], params[1], params[2], params[3]);
        break;
      }
    }
    return f.with_mode(mode, step);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, e.what());
  }
}

}  // namespace json_io

std::string to_json(const AnisotropyFunction& f) { return json_io::to_value(f).dump(2); }

AnisotropyFunction anisotropy_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, e.what());
  }
  return json_io::anisotropy_from_value(j);
}

}  // namespace wulfflab
