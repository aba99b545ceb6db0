#include "wulfflab/parallel_focal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "json_io.hpp"
#include "wulfflab/errors.hpp"
#include "wulfflab/parallel.hpp"
#include "wulfflab/report.hpp"

namespace wulfflab {

ImmersionPatch translated_patch(const AnisotropyFunction& f, const ImmersionPatch& patch, double t) {
  if (!std::isfinite(t)) throw Error(ErrorKind::InvalidArgument, "translation parameter must be finite");
  auto map = [f, patch, t](const Vec& p) {
    const PointGeometry g = geometry_at(patch, p);
    PatchPoint pt;
    if (t == 0.0) {
      pt.x = g.x;
      pt.dx = g.dx;
    } else {
      const auto der = f.homogeneous_derivatives(g.nu);
      pt.x = g.x + t * der.gradient;
      pt.dx = g.dx + t * der.hessian * g.dnu;
    }
    pt.nu = g.nu;
    pt.dnu = g.dnu;
    return pt;
  };
  return ImmersionPatch(patch.ambient_dim(), patch.chart_dim(), patch.domain(), map, 1, patch.name());
}

TranslationResult translate(const AnisotropyFunction& f, const ImmersionPatch& patch, double t, int per_axis,
                            double degeneracy_tol) {
  TranslationResult r{t, translated_patch(f, patch, t), 0.0, false};
  const std::vector<Vec> grid = patch.grid(per_axis);
  std::vector<double> sv(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { sv[i] = min_singular_value(r.patch_t.evaluate(grid[i]).dx); });
  r.min_singular_value = *std::min_element(sv.begin(), sv.end());
  r.degenerate = r.min_singular_value < degeneracy_tol;
  return r;
}

namespace {

Vec predicted_lambdas(const Vec& lambdas, double t) {
  Vec out(lambdas.size());
  for (int i = 0; i < lambdas.size(); ++i) {
    const double denom = 1.0 - t * lambdas[i];
    if (std::abs(denom) < 1e-8) {
      throw Error(ErrorKind::DegenerateTranslation, "1 - t*lambda vanishes for lambda = " + format_double(lambdas[i]));
    }
    out[i] = lambdas[i] / denom;
  }
  std::sort(out.data(), out.data() + out.size(), std::greater<>());
  return out;
}

}  // namespace

TransformedSpectrum transformed_spectrum(const AnisotropyFunction& f, const ImmersionPatch& patch,
                                         const Vec& params, double t) {
  TransformedSpectrum r;
  r.source = anisotropic_curvatures(f, patch, params);
  r.predicted = predicted_lambdas(r.source.lambdas, t);
  r.actual = anisotropic_curvatures(f, translated_patch(f, patch, t), params);
  r.max_deviation = (r.actual.lambdas - r.predicted).cwiseAbs().maxCoeff();
  return r;
}

double generating_mean(const Vec& m, double t) {
  const int n = static_cast<int>(m.size()) - 1;
  double p = 0.0, dp = 0.0, tk = 1.0;
  for (int k = 0; k <= n; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    p += sign * m[k] * tk;
    if (k + 1 <= n) dp += sign * -(k + 1) * m[k + 1] * tk;
    tk *= t;
  }
  // dp accumulates -(k+1) M_{k+1} t^k with the sign of (-1)^k, i.e. P'(t).
  return -dp / (n * p);
}

std::vector<MeanProfileRow> mean_profile(const AnisotropyFunction& f, const ImmersionPatch& patch,
                                         const Vec& params, const std::vector<double>& t_grid) {
  const CurvatureSpectrum source = anisotropic_curvatures(f, patch, params);
  for (double t : t_grid) {
    for (int i = 0; i < source.lambdas.size(); ++i) {
      const double l = source.lambdas[i];
      if (l != 0.0 && std::abs(t - 1.0 / l) < 1e-6) {
        throw Error(ErrorKind::DegenerateTranslation, "t = " + format_double(t) + " is a focal parameter");
      }
    }
  }
  std::vector<MeanProfileRow> rows;
  for (double t : t_grid) {
    const CurvatureSpectrum actual = anisotropic_curvatures(f, translated_patch(f, patch, t), params);
    rows.push_back({t, actual.mean, generating_mean(source.sym_functions, t)});
  }
  return rows;
}

std::vector<SweepRow> translation_sweep(const AnisotropyFunction& f, const ImmersionPatch& patch,
                                        const std::vector<double>& t_values, const std::vector<Vec>& grid) {
  std::vector<SweepRow> rows;
  for (double t : t_values) {
    const ImmersionPatch pt = translated_patch(f, patch, t);
    std::vector<double> sv(grid.size()), dev(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
      sv[i] = min_singular_value(pt.evaluate(grid[i]).dx);
      dev[i] = std::numeric_limits<double>::quiet_NaN();
      if (sv[i] >= 1e-6) {
        try {
          dev[i] = transformed_spectrum(f, patch, grid[i], t).max_deviation;
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::DegenerateTranslation && e.kind() != ErrorKind::RankDeficient) throw;
        }
      }
    });
    SweepRow row;
    row.t = t;
    row.min_singular_value = *std::min_element(sv.begin(), sv.end());
    row.degenerate = row.min_singular_value < 1e-6;
    row.max_deviation = row.degenerate ? std::numeric_limits<double>::quiet_NaN() : 0.0;
    if (!row.degenerate)
      for (double d : dev) row.max_deviation = std::isnan(d) ? d : std::max(row.max_deviation, d);
    rows.push_back(row);
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "# wulfflab translation-sweep v1\n";
  write_csv_header(out, {"t", "min_singular_value", "degenerate", "max_deviation"});
  for (const auto& r : rows) write_csv_row(out, {r.t, r.min_singular_value, r.degenerate ? 1.0 : 0.0, r.max_deviation});
}

namespace {

Mat select_columns(const Mat& m, const std::vector<int>& cols) {
  Mat out(m.rows(), cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(j) = m.col(cols[j]);
  return out;
}

// Indices of the m eigenvalues closest to lambda (the focal group) and the rest.
void split_indices(const Vec& lambdas, double lambda, int m, std::vector<int>& focal, std::vector<int>& rest) {
  std::vector<int> order(lambdas.size());
  for (int i = 0; i < lambdas.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return std::abs(lambdas[a] - lambda) < std::abs(lambdas[b] - lambda); });
  focal.assign(order.begin(), order.begin() + m);
  rest.assign(order.begin() + m, order.end());
  std::sort(focal.begin(), focal.end());
  std::sort(rest.begin(), rest.end());
}

Mat orth(const Mat& a) {
  if (a.cols() == 0) return Mat(a.rows(), 0);
  Eigen::HouseholderQR<Mat> qr(a);
  return qr.householderQ() * Mat::Identity(a.rows(), a.cols());
}

struct Context {
  const AnisotropyFunction& f;
  const ImmersionPatch& patch;
  ImmersionPatch patch_t;
  double lambda = 0.0;
  double t = 0.0;
  int m = 0;
  Vec q;
  Vec seed_lambdas;
  FocalOptions opt;
};

// Chart velocity tangent to the focal distribution, closest to the ambient
// direction w, with unit Gauss-map speed.
Vec leaf_velocity(const Context& c, const Vec& p, const Vec& w) {
  const PointGeometry geo = geometry_at(c.patch, p);
  const CurvatureSpectrum s = anisotropic_curvatures(c.f, geo, c.opt.cluster_tol);
  std::vector<int> focal, rest;
  split_indices(s.lambdas, c.lambda, c.m, focal, rest);
  const Mat e = select_columns(s.eigenframe, focal);
  const Vec coef = (geo.dx * e).colPivHouseholderQr().solve(w);
  Vec v = e * coef;
  const double speed = (geo.dnu * v).norm();
  if (!(speed > 1e-12)) throw Error(ErrorKind::LeafDrift, "Gauss map degenerates along the leaf");
  return v / speed;
}

struct CurveOutcome {
  bool drifted = false;
};

CurveOutcome integrate_curve(const Context& c, const Vec& p0, const Vec& w0, double h,
                             std::vector<LeafSample>& samples) {
  const int steps = static_cast<int>(std::ceil(c.opt.leaf_length / h));
  const int every = std::max(1, steps / std::max(1, c.opt.leaf_resolution));
  Vec p = p0;
  Vec w = w0;
  for (int s = 1; s <= steps; ++s) {
    const Vec k1 = leaf_velocity(c, p, w);
    const Vec k2 = leaf_velocity(c, p + 0.5 * h * k1, w);
    const Vec k3 = leaf_velocity(c, p + 0.5 * h * k2, w);
    const Vec k4 = leaf_velocity(c, p + h * k3, w);
    const Vec pn = p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!c.patch.domain().contains(pn)) break;
    const PointGeometry geo = geometry_at(c.patch, pn);
    const Vec xt = c.patch_t.evaluate(pn).x;
    if ((xt - c.q).norm() > c.opt.drift_tol) return {true};
    w = geo.dx * leaf_velocity(c, pn, w);
    p = pn;
    if (s % every == 0) samples.push_back({p, geo.x, geo.nu});
  }
  return {false};
}

struct SecondForm {
  Vec lambdas;
  Mat reduced_a;
  Vec inv_diag;
  Mat closed;
  Mat direct;
};

SecondForm second_form_at(const Context& c, const Vec& p) {
  const PointGeometry geo = geometry_at(c.patch, p);
  const SymmetrizedShape s = symmetrized_shape(c.f, geo);
  std::vector<int> focal, rest;
  split_indices(s.lambdas, c.lambda, c.m, focal, rest);
  SecondForm out;
  const int r = static_cast<int>(rest.size());
  out.lambdas = Vec(r);
  for (int a = 0; a < r; ++a) out.lambdas[a] = s.lambdas[rest[a]];
  if (r == 0) {
    out.reduced_a = out.closed = out.direct = Mat(0, 0);
    out.inv_diag = Vec(0);
    return out;
  }
  const Mat ec = select_columns(s.e_vectors, rest);
  out.reduced_a = ec.transpose() * s.aniso.a_matrix * ec;
  out.reduced_a = 0.5 * (out.reduced_a + out.reduced_a.transpose());
  const Mat ct = sym_sqrt(out.reduced_a);
  const Mat ct_inv = ct.inverse();
  out.inv_diag = out.reduced_a.inverse().diagonal();
  Vec ratio(r), shrink(r);
  for (int a = 0; a < r; ++a) {
    shrink[a] = 1.0 / (1.0 - c.t * out.lambdas[a]);
    ratio[a] = out.lambdas[a] * shrink[a];
  }
  out.closed = ct_inv * ratio.asDiagonal() * ct_inv;

  // Orthonormal frame of the focal tangent space: e~ = eps (I - t L)^-1 C~^-1.
  const Mat e_tilde = s.aniso.c_matrix * ec * shrink.asDiagonal() * ct_inv;
  const Mat chart = s.b.partialPivLu().solve(e_tilde);
  const Mat dxt = c.patch_t.evaluate(p).dx * chart;
  const Mat mdnu = -geo.dnu * chart;
  out.direct = dxt.transpose() * mdnu;
  return out;
}

Context make_context(const AnisotropyFunction& f, const ImmersionPatch& patch, double lambda_star,
                     const Vec& seed, const FocalOptions& opt, FocalData& data) {
  if (lambda_star == 0.0 || std::abs(lambda_star) < opt.cluster_tol) {
    throw Error(ErrorKind::ZeroCurvature, "focal parameter 1/lambda needs lambda != 0");
  }
  const CurvatureSpectrum s = anisotropic_curvatures(f, patch, seed, opt.cluster_tol);
  int best = -1;
  for (int k = 0; k < s.g(); ++k) {
    if (std::abs(s.groups[k].value - lambda_star) <= opt.cluster_tol * std::max(1.0, std::abs(lambda_star))) best = k;
  }
  if (best < 0) {
    throw Error(ErrorKind::InvalidArgument,
                "lambda_star = " + format_double(lambda_star) + " is not a curvature group at the seed");
  }
  const double lambda = s.groups[best].value;
  Context c{f, patch, translated_patch(f, patch, 1.0 / lambda), lambda, 1.0 / lambda, s.groups[best].multiplicity,
            Vec(), s.lambdas, opt};
  c.q = c.patch_t.evaluate(seed).x;
  data.lambda_star = lambda;
  data.t = c.t;
  data.group_index = best;
  data.multiplicity = c.m;
  data.seed_params = seed;
  data.q = c.q;
  return c;
}

void fill_leaf(const Context& c, FocalData& data) {
  const Vec& seed = data.seed_params;
  const PointGeometry g0 = geometry_at(c.patch, seed);
  const CurvatureSpectrum s0 = anisotropic_curvatures(c.f, g0, c.opt.cluster_tol);
  std::vector<int> focal, rest;
  split_indices(s0.lambdas, c.lambda, c.m, focal, rest);

  double h = c.opt.leaf_step;
  while (true) {
    std::vector<LeafSample> samples{{seed, g0.x, g0.nu}};
    bool drifted = false;
    for (int j : focal) {
      const Vec dir = g0.dx * s0.eigenframe.col(j);
      for (double sign : {1.0, -1.0}) {
        if (integrate_curve(c, seed, sign * dir, h, samples).drifted) drifted = true;
        if (drifted) break;
      }
      if (drifted) break;
    }
    if (!drifted) {
      data.leaf_samples = std::move(samples);
      data.step_used = h;
      break;
    }
    h *= 0.5;
    if (h < c.opt.min_step) throw Error(ErrorKind::LeafDrift, "leaf integration drifted off the focal point");
  }

  data.leaf_equation_residual = 0.0;
  data.max_drift = 0.0;
  data.min_gauss_singular_value = std::numeric_limits<double>::infinity();
  data.curvature_drift = 0.0;
  for (const auto& smp : data.leaf_samples) {
    const PointGeometry geo = geometry_at(c.patch, smp.params);
    const Vec xt = c.patch_t.evaluate(smp.params).x;
    data.max_drift = std::max(data.max_drift, (xt - c.q).norm());
    data.leaf_equation_residual =
        std::max(data.leaf_equation_residual, (c.lambda * (geo.x - c.q) + phi(c.f, geo.nu)).norm());
    const CurvatureSpectrum s = anisotropic_curvatures(c.f, geo, c.opt.cluster_tol);
    data.curvature_drift = std::max(data.curvature_drift, (s.lambdas - c.seed_lambdas).cwiseAbs().maxCoeff());
    std::vector<int> fi, ri;
    split_indices(s.lambdas, c.lambda, c.m, fi, ri);
    const Mat e = select_columns(s.eigenframe, fi);
    Eigen::HouseholderQR<Mat> qr(geo.dx * e);
    const Mat r = qr.matrixQR().topRows(c.m).triangularView<Eigen::Upper>();
    const Mat restricted = geo.dnu * e * r.inverse();
    data.min_gauss_singular_value = std::min(data.min_gauss_singular_value, min_singular_value(restricted));
  }

  const PatchPoint pt = c.patch_t.evaluate(seed);
  data.focal_singular_values = singular_values(pt.dx);
  data.focal_rank_deficiency = 0;
  for (int i = 0; i < data.focal_singular_values.size(); ++i)
    if (data.focal_singular_values[i] < 1e-6) ++data.focal_rank_deficiency;

  // Angle between D_i and the normal space of the focal submanifold at q.
  const Mat di = orth(g0.dx * select_columns(s0.eigenframe, focal));
  const Mat tangent = orth(pt.dx * select_columns(s0.eigenframe, rest));
  const int d = c.patch.ambient_dim();
  Mat normal_space;
  if (tangent.cols() == 0) {
    normal_space = Mat::Identity(d, d);
  } else {
    normal_space = complement_of_rows(tangent.transpose());
  }
  const Vec cosines = singular_values(normal_space.transpose() * di);
  const double cmin = std::clamp(cosines.minCoeff(), -1.0, 1.0);
  data.d1_normal_angle = std::acos(cmin);
}

}  // namespace

FocalData focal_map(const AnisotropyFunction& f, const ImmersionPatch& patch, double lambda_star,
                    const Vec& seed_params, const FocalOptions& options) {
  FocalData data;
  const Context c = make_context(f, patch, lambda_star, seed_params, options, data);
  fill_leaf(c, data);
  return data;
}

namespace {

FocalData second_form_impl(const Context& c, FocalData data) {
  if (data.curvature_drift > c.opt.iso_tol) {
    throw Error(ErrorKind::NotIsoparametric,
                "curvatures drift by " + format_double(data.curvature_drift) + " along the leaf");
  }
  const SecondForm sf = second_form_at(c, data.seed_params);
  data.complementary_lambdas = sf.lambdas;
  data.reduced_a = sf.reduced_a;
  data.reduced_a_inv_diag = sf.inv_diag;
  data.ii_matrix = sf.closed;
  data.ii_direct = sf.direct;
  data.ii_route_deviation = sf.closed.size() ? (sf.closed - sf.direct).cwiseAbs().maxCoeff() : 0.0;
  const std::size_t count = data.leaf_samples.size();
  const std::size_t checks = std::min<std::size_t>(count, std::max(0, c.opt.ii_check_points));
  for (std::size_t i = 0; i < checks; ++i) {
    const std::size_t idx = checks > 1 ? i * (count - 1) / (checks - 1) : 0;
    const SecondForm other = second_form_at(c, data.leaf_samples[idx].params);
    if (other.closed.size())
      data.ii_route_deviation = std::max(data.ii_route_deviation, (other.closed - other.direct).cwiseAbs().maxCoeff());
  }
  return data;
}

}  // namespace

FocalData focal_second_form(const AnisotropyFunction& f, const ImmersionPatch& patch, double lambda_star,
                            const Vec& seed_params, const FocalOptions& options) {
  FocalData data;
  const Context c = make_context(f, patch, lambda_star, seed_params, options, data);
  fill_leaf(c, data);
  return second_form_impl(c, std::move(data));
}

namespace {

// Damped Gauss-Newton for nu(p) = -u and x_t(p) = q.
Vec find_antipode(const Context& c, const Vec& u, const Vec& start, double& residual) {
  auto eval = [&](const Vec& p, Vec& r, Mat* jac) {
    const PointGeometry geo = geometry_at(c.patch, p);
    const PatchPoint pt = c.patch_t.evaluate(p);
    const int d = c.patch.ambient_dim();
    r.resize(2 * d);
    r.head(d) = geo.nu + u;
    r.tail(d) = pt.x - c.q;
    if (jac) {
      jac->resize(2 * d, c.patch.chart_dim());
      jac->topRows(d) = geo.dnu;
      jac->bottomRows(d) = pt.dx;
    }
  };
  Vec p = start, r, rn;
  Mat j;
  eval(p, r, &j);
  double mu = 1e-3;
  for (int it = 0; it < 200 && r.norm() > 1e-14; ++it) {
    const int n = static_cast<int>(p.size());
    const Mat jtj = j.transpose() * j;
    const Vec step = (jtj + mu * Mat::Identity(n, n)).ldlt().solve(-j.transpose() * r);
    if (step.norm() < 1e-16) break;
    const Vec trial = p + step;
    try {
      eval(trial, rn, nullptr);
    } catch (const Error&) {
      mu *= 4.0;
      continue;
    }
    if (rn.norm() < r.norm()) {
      p = trial;
      eval(p, r, &j);
      mu = std::max(mu / 3.0, 1e-12);
    } else {
      mu *= 4.0;
      if (mu > 1e12) break;
    }
  }
  residual = r.norm();
  return p;
}

}  // namespace

FocalData cartan_residual(const AnisotropyFunction& f, const ImmersionPatch& patch, double lambda_star,
                          const Vec& seed_params, const FocalOptions& options) {
  FocalData data;
  const Context c = make_context(f, patch, lambda_star, seed_params, options, data);
  fill_leaf(c, data);
  data = second_form_impl(c, std::move(data));

  const Vec u = data.leaf_samples.front().nu;
  const LeafSample* start = &data.leaf_samples.front();
  for (const auto& s : data.leaf_samples)
    if (s.nu.dot(u) < start->nu.dot(u)) start = &s;
  double residual = 0.0;
  const Vec p2 = find_antipode(c, u, start->params, residual);
  if (!(residual < 1e-8)) {
    throw Error(ErrorKind::AntipodeNotFound, "best residual " + format_double(residual));
  }
  const SecondForm at2 = second_form_at(c, p2);
  data.pair.p1 = data.seed_params;
  data.pair.p2 = p2;
  data.pair.gauss_residual = residual;
  data.pair.trace_u = data.ii_direct.size() ? data.ii_direct.trace() : 0.0;
  data.pair.trace_minus_u = at2.direct.size() ? at2.direct.trace() : 0.0;
  data.trace_antisymmetry = std::abs(data.pair.trace_u + data.pair.trace_minus_u);

  // Gamma^k sums the A~^{-1} diagonal over group k at both antipodal points.
  data.gamma.clear();
  data.gamma_lambdas.clear();
  data.cartan_residual = 0.0;
  const auto groups = cluster_values(data.complementary_lambdas, options.cluster_tol);
  int offset = 0;
  for (const auto& g : groups) {
    double gamma = 0.0;
    for (int a = offset; a < offset + g.multiplicity; ++a) gamma += data.reduced_a_inv_diag[a] + at2.inv_diag[a];
    offset += g.multiplicity;
    data.gamma.push_back(gamma);
    data.gamma_lambdas.push_back(g.value);
    data.cartan_residual += gamma * g.value / (1.0 - data.t * g.value);
  }
  return data;
}

std::string to_json(const FocalData& d) {
  using json_io::to_value;
  nlohmann::json j;
  j["lambda_star"] = d.lambda_star;
  j["t"] = d.t;
  j["multiplicity"] = d.multiplicity;
  j["seed_params"] = to_value(d.seed_params);
  j["q"] = to_value(d.q);
  j["leaf_sample_count"] = d.leaf_samples.size();
  j["leaf_equation_residual"] = d.leaf_equation_residual;
  j["max_drift"] = d.max_drift;
  j["min_gauss_singular_value"] = d.min_gauss_singular_value;
  j["curvature_drift"] = d.curvature_drift;
  j["focal_singular_values"] = to_value(d.focal_singular_values);
  j["focal_rank_deficiency"] = d.focal_rank_deficiency;
  j["d1_normal_angle"] = d.d1_normal_angle;
  j["complementary_lambdas"] = to_value(d.complementary_lambdas);
  j["reduced_a"] = to_value(d.reduced_a);
  j["reduced_a_inv_diag"] = to_value(d.reduced_a_inv_diag);
  j["ii_matrix"] = to_value(d.ii_matrix);
  j["ii_direct"] = to_value(d.ii_direct);
  j["ii_route_deviation"] = d.ii_route_deviation;
  j["gamma"] = d.gamma;
  j["gamma_lambdas"] = d.gamma_lambdas;
  j["cartan_residual"] = d.cartan_residual;
  j["antipode"] = {{"p1", to_value(d.pair.p1)},
                   {"p2", to_value(d.pair.p2)},
                   {"residual", d.pair.gauss_residual},
                   {"trace_u", d.pair.trace_u},
                   {"trace_minus_u", d.pair.trace_minus_u}};
  j["trace_antisymmetry"] = d.trace_antisymmetry;
  return j.dump(2);
}

}  // namespace wulfflab
