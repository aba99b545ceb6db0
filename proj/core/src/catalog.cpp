#include "wulfflab/catalog.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "wulfflab/errors.hpp"
#include "wulfflab/report.hpp"
#include "wulfflab/sphere_grid.hpp"
#include "wulfflab/wulff_geometry.hpp"

namespace wulfflab {

namespace {

constexpr int kAuditResolution = 32;

AnisotropyFunction audited(AnisotropyFunction f) {
  const ConvexityReport r = convexity_audit(f, f.ambient_dim() > 3 ? 12 : kAuditResolution);
  if (!r.pass) {
    throw Error(ErrorKind::ConvexityViolation,
                "anisotropy fails the convexity audit (min eigenvalue " + format_double(r.min_eigenvalue) + ")");
  }
  return f;
}

double parse_number(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorKind::Parse, "not a number: '" + std::string(s) + "'");
  }
  return v;
}

std::vector<double> parse_list(std::string_view s) {
  std::vector<double> out;
  while (true) {
    const auto pos = s.find(';');
    out.push_back(parse_number(s.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return out;
}

struct ParsedName {
  std::string kind;
  std::map<std::string, std::string> args;
};

ParsedName parse_name(std::string_view name) {
  ParsedName p;
  const auto colon = name.find(':');
  p.kind = std::string(name.substr(0, colon));
  if (colon == std::string_view::npos) return p;
  std::string_view rest = name.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw Error(ErrorKind::Parse, "expected key=value in '" + std::string(name) + "'");
    }
    p.args[std::string(item.substr(0, eq))] = std::string(item.substr(eq + 1));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return p;
}

void allow_keys(const ParsedName& p, std::initializer_list<const char*> keys) {
  for (const auto& [k, v] : p.args) {
    bool ok = false;
    for (const char* allowed : keys) ok = ok || k == allowed;
    if (!ok) throw Error(ErrorKind::Parse, "unknown parameter '" + k + "' for '" + p.kind + "'");
  }
}

double arg_or(const ParsedName& p, const std::string& key, double fallback) {
  const auto it = p.args.find(key);
  return it == p.args.end() ? fallback : parse_number(it->second);
}

int int_arg_or(const ParsedName& p, const std::string& key, int fallback) {
  const double v = arg_or(p, key, fallback);
  if (v != std::floor(v)) throw Error(ErrorKind::Parse, "parameter '" + key + "' must be an integer");
  return static_cast<int>(v);
}

std::string short_number(double v) { return format_double(v); }

}  // namespace

AnisotropyFunction anisotropy_by_name(std::string_view name, int ambient_dim) {
  const ParsedName p = parse_name(name);
  if (p.kind == "isotropic") {
    allow_keys(p, {});
    return AnisotropyFunction::isotropic(ambient_dim);
  }
  if (p.kind == "quadratic") {
    allow_keys(p, {"q"});
    Vec q = Vec::Ones(ambient_dim);
    q[ambient_dim - 1] = 4.0;
    if (p.args.count("q")) {
      const auto list = parse_list(p.args.at("q"));
      if (static_cast<int>(list.size()) != ambient_dim) {
        throw Error(ErrorKind::InvalidArgument, "quadratic needs one diagonal entry per ambient axis");
      }
      q = Eigen::Map<const Vec>(list.data(), ambient_dim);
    }
    return audited(AnisotropyFunction::quadratic_norm(q));
  }
  if (p.kind == "axisymmetric") {
    allow_keys(p, {"c"});
    std::vector<double> c{1.0, 0.05};
    if (p.args.count("c")) c = parse_list(p.args.at("c"));
    return audited(AnisotropyFunction::axisymmetric(ambient_dim, c));
  }
  throw Error(ErrorKind::Parse, "unknown anisotropy '" + p.kind + "'");
}

std::vector<NamedAnisotropy> builtin_anisotropies(int ambient_dim) {
  std::vector<NamedAnisotropy> out;
  for (const char* name : {"isotropic", "quadratic", "axisymmetric"}) {
    out.push_back({name, anisotropy_by_name(name, ambient_dim)});
  }
  return out;
}

ImmersionPatch hyperplane_patch(int ambient_dim) {
  const int n = ambient_dim - 1;
  auto map = [ambient_dim, n](const Vec& p) {
    PatchPoint pt;
    pt.x = Vec::Zero(ambient_dim);
    pt.x.head(n) = p;
    pt.dx = Mat::Identity(ambient_dim, n);
    pt.ddx.assign(n, Mat::Zero(ambient_dim, n));
    return pt;
  };
  return ImmersionPatch(ambient_dim, n, {Vec::Constant(n, -1.0), Vec::Constant(n, 1.0)}, map, 1, "plane");
}

namespace {

// Helicoid (s, t) -> (t cos s, t sin s, s) with its first and second
// derivatives, written into the first three coordinates.
void helicoid_into(double s, double t, PatchPoint& pt) {
  const double c = std::cos(s), sn = std::sin(s);
  pt.x.head(3) << t * c, t * sn, s;
  pt.dx.block(0, 0, 3, 1) << -t * sn, t * c, 1.0;
  pt.dx.block(0, 1, 3, 1) << c, sn, 0.0;
  pt.ddx[0].block(0, 0, 3, 1) << -t * c, -t * sn, 0.0;
  pt.ddx[0].block(0, 1, 3, 1) << -sn, c, 0.0;
  pt.ddx[1].block(0, 0, 3, 1) << -sn, c, 0.0;
}

}  // namespace

ImmersionPatch helicoid_patch(double t_max) {
  if (!(t_max > 0.0)) throw Error(ErrorKind::InvalidArgument, "helicoid needs t_max > 0");
  auto map = [](const Vec& p) {
    PatchPoint pt;
    pt.x = Vec::Zero(3);
    pt.dx = Mat::Zero(3, 2);
    pt.ddx.assign(2, Mat::Zero(3, 2));
    helicoid_into(p[0], p[1], pt);
    return pt;
  };
  const double pi = std::numbers::pi;
  return ImmersionPatch(3, 2, {Eigen::Vector2d(-pi, -t_max), Eigen::Vector2d(pi, t_max)}, map, 1, "helicoid");
}

ImmersionPatch helicoid_line_patch(double t_max) {
  if (!(t_max > 0.0)) throw Error(ErrorKind::InvalidArgument, "helicoid needs t_max > 0");
  auto map = [](const Vec& p) {
    PatchPoint pt;
    pt.x = Vec::Zero(4);
    pt.dx = Mat::Zero(4, 3);
    pt.ddx.assign(3, Mat::Zero(4, 3));
    helicoid_into(p[0], p[1], pt);
    pt.x[3] = p[2];
    pt.dx(3, 2) = 1.0;
    return pt;
  };
  const double pi = std::numbers::pi;
  ChartBox box{Eigen::Vector3d(-pi, -t_max, -1.0), Eigen::Vector3d(pi, t_max, 1.0)};
  ImmersionPatch patch(4, 3, box, map, 1, "helicoid-line");
  // Orient so that the normal is (helicoid normal, 0).
  const Vec probe = Eigen::Vector3d(0.3, 0.7, 0.0);
  const Vec nu = frame_at(patch, probe).nu;
  const Eigen::Vector4d expected(-std::sin(0.3), std::cos(0.3), -0.7, 0.0);
  return nu.dot(expected) > 0 ? patch : patch.flipped();
}

ImmersionPatch round_cylinder_patch(double radius) {
  if (!(radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "cylinder radius must be positive");
  auto map = [radius](const Vec& p) {
    const double c = std::cos(p[0]), s = std::sin(p[0]);
    PatchPoint pt;
    pt.x = Eigen::Vector3d(p[1], radius * c, radius * s);
    pt.dx = Mat::Zero(3, 2);
    pt.dx.col(0) << 0.0, -radius * s, radius * c;
    pt.dx.col(1) << 1.0, 0.0, 0.0;
    pt.ddx.assign(2, Mat::Zero(3, 2));
    pt.ddx[0].col(0) << 0.0, -radius * c, -radius * s;
    return pt;
  };
  const ChartBox box{Eigen::Vector2d(0.0, -1.0), Eigen::Vector2d(2.0 * std::numbers::pi, 1.0)};
  return ImmersionPatch(3, 2, box, map, 1, "round-cylinder");
}

AnisotropyFunction extend_axis(const AnisotropyFunction& f, double band_halfwidth) {
  if (!(band_halfwidth > 0.0 && band_halfwidth < std::numbers::pi / 2)) {
    throw Error(ErrorKind::InvalidArgument, "band half-width must lie in (0, pi/2)");
  }
  if (f.family() == Family::Isotropic) return AnisotropyFunction::isotropic(f.ambient_dim() + 1);
  audited(f);
  // The band part F(u) at cos(th) u + sin(th) e_last has A = A_F / cos^2 - F tan^2,
  // so it stays convex while sin^2(th) < rho = min lambda_min(A_F) / F. The cap
  // must take over before half of that.
  double fmin = std::numeric_limits<double>::infinity(), fmax = 0.0, rho = std::numeric_limits<double>::infinity();
  for (const Vec& u : sphere_grid(f.ambient_dim(), 64)) {
    const AnisotropyEval ev = evaluate(f, u);
    fmin = std::min(fmin, ev.value);
    fmax = std::max(fmax, ev.value);
    rho = std::min(rho, ev.min_eigenvalue / ev.value);
  }
  const double delta = 0.05;
  const double sin_cut = std::sqrt(0.5 * std::min(rho, 1.0));
  const double a = fmin / (2.0 * (1.0 + delta));
  const double b = fmax / ((1.0 - delta) * sin_cut);
  const double c = std::cos(band_halfwidth), s = std::sin(band_halfwidth);
  if (!(std::hypot(a * c, b * s) * (1.0 + delta) <= fmin)) {
    throw Error(ErrorKind::ConvexityViolation,
                "band half-width too large for the range of F (shrink the band or flatten F)");
  }
  return audited(AnisotropyFunction::band_extension(f, band_halfwidth, a, b, delta));
}

std::vector<std::string> entry_names(const AnisotropyFunction& f) {
  const int d = f.ambient_dim();
  const int n = d - 1;
  std::vector<std::string> names{"plane", "wulff"};
  for (int k = 1; k < n; ++k)
    for (double t : {0.5, 2.0}) names.push_back("cylinder:k=" + std::to_string(k) + ",t=" + short_number(t));
  if (d == 3) {
    names.push_back("helicoid");
    if (f.family() == Family::Isotropic) names.push_back("round-cylinder");
  }
  if (d == 4) names.push_back("helicoid-line");
  return names;
}

CatalogEntry make_entry(const AnisotropyFunction& f, std::string_view name) {
  const ParsedName p = parse_name(name);
  const int d = f.ambient_dim();
  const int n = d - 1;
  const bool isotropic = f.family() == Family::Isotropic;
  auto entry = [&](ImmersionPatch patch) {
    return CatalogEntry{std::string(name), f, std::move(patch), std::nullopt, "", false, "", 0};
  };

  if (p.kind == "plane") {
    allow_keys(p, {});
    CatalogEntry e = entry(hyperplane_patch(d));
    e.expected_spectrum = std::vector<CurvatureGroup>{{0.0, n}};
    e.provenance = "T = 0 on a hyperplane";
    e.complete_model = true;
    e.expected_case = "plane";
    return e;
  }
  if (p.kind == "wulff") {
    allow_keys(p, {"variant"});
    const int variant = int_arg_or(p, "variant", 0);
    if (variant != 0 && variant != 1) throw Error(ErrorKind::InvalidArgument, "wulff variant must be 0 or 1");
    audited(f);
    CatalogEntry e = entry(wulff_patch(f, variant));
    e.expected_spectrum = std::vector<CurvatureGroup>{{-1.0, n}};
    e.provenance = "dx = A_F du and dnu = du give S = -I (outward normal)";
    e.complete_model = true;
    e.expected_case = "wulff_shape";
    return e;
  }
  if (p.kind == "cylinder") {
    allow_keys(p, {"k", "t", "variant"});
    const int k = int_arg_or(p, "k", 1);
    const double t = arg_or(p, "t", 0.5);
    const int variant = int_arg_or(p, "variant", 0);
    audited(f);
    CatalogEntry e = entry(product_immersion(f, coordinate_subsphere(d, k), t, variant));
    std::vector<CurvatureGroup> groups;
    if (k == n) {
      groups.push_back({1.0 / t, n});
    } else if (t > 0) {
      groups = {{1.0 / t, k}, {0.0, n - k}};
    } else {
      groups = {{0.0, n - k}, {1.0 / t, k}};
    }
    e.expected_spectrum = groups;
    e.provenance = "v - t phi(u): 1/t with multiplicity k, 0 with multiplicity n-k";
    e.complete_model = true;
    e.expected_case = k == n ? "wulff_shape" : "product_k";
    e.expected_k = k == n ? 0 : k;
    return e;
  }
  if (p.kind == "helicoid") {
    allow_keys(p, {"tmax"});
    if (d != 3) throw Error(ErrorKind::InvalidArgument, "helicoid lives in R^3");
    CatalogEntry e = entry(helicoid_patch(arg_or(p, "tmax", 2.0)));
    if (isotropic) e.expected_case = "not_isoparametric";
    return e;
  }
  if (p.kind == "round-cylinder") {
    allow_keys(p, {"r"});
    if (d != 3) throw Error(ErrorKind::InvalidArgument, "round cylinder lives in R^3");
    const double r = arg_or(p, "r", 1.0);
    CatalogEntry e = entry(round_cylinder_patch(r));
    if (isotropic) {
      e.expected_spectrum = std::vector<CurvatureGroup>{{0.0, 1}, {-1.0 / r, 1}};
      e.provenance = "classical cylinder curvatures 0 and -1/r (outward)";
      e.complete_model = true;
      e.expected_case = "product_k";
      e.expected_k = 1;
    }
    return e;
  }
  if (p.kind == "helicoid-line") {
    allow_keys(p, {"tmax"});
    if (d != 4) throw Error(ErrorKind::InvalidArgument, "helicoid x line lives in R^4");
    CatalogEntry e = entry(helicoid_line_patch(arg_or(p, "tmax", 2.0)));
    if (isotropic) e.expected_case = "not_isoparametric";
    return e;
  }
  throw Error(ErrorKind::Parse, "unknown catalog entry '" + p.kind + "'");
}

std::vector<CatalogEntry> builtin_patches(const AnisotropyFunction& f) {
  std::vector<CatalogEntry> out;
  for (const auto& name : entry_names(f)) out.push_back(make_entry(f, name));
  return out;
}

}  // namespace wulfflab
