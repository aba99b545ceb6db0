#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wulfflab/anisotropy.hpp"
#include "wulfflab/hypersurface.hpp"

namespace wulfflab {

struct CatalogEntry {
  std::string name;
  AnisotropyFunction anisotropy;
  ImmersionPatch patch;
  std::optional<std::vector<CurvatureGroup>> expected_spectrum;
  std::string provenance;     ///< why the expected spectrum holds
  bool complete_model = false;  ///< the patch is part of a complete model hypersurface
  std::string expected_case;  ///< classification label when known, else empty
  int expected_k = 0;
};

struct NamedAnisotropy {
  std::string name;
  AnisotropyFunction anisotropy;
};

/// isotropic, quadratic (Q = diag(1,..,1,4)) and axisymmetric (1, 0.05) in
/// the given ambient dimension, all audited.
std::vector<NamedAnisotropy> builtin_anisotropies(int ambient_dim = 3);

/// Builds and audits an anisotropy from a catalog name:
///   isotropic
///   quadratic[:q=q0;q1;...]        default diag(1,..,1,4)
///   axisymmetric[:c=c0;c1;...]     default (1, 0.05)
/// Throws ConvexityViolation when the audit fails.
AnisotropyFunction anisotropy_by_name(std::string_view name, int ambient_dim = 3);

/// Hyperplane, Wulff shape, product immersions for k = 1..n-1 and
/// t in {0.5, 2}, plus the helicoid (R^3), round cylinder (R^3, isotropic F
/// only) and helicoid x line (R^4).
std::vector<CatalogEntry> builtin_patches(const AnisotropyFunction& f);

/// Entry by name, e.g. "plane", "wulff", "wulff:variant=1",
/// "cylinder:k=1,t=0.5", "helicoid:tmax=2", "round-cylinder:r=1",
/// "helicoid-line:tmax=2".
CatalogEntry make_entry(const AnisotropyFunction& f, std::string_view name);

/// Names accepted by make_entry for this F, in builtin_patches order.
std::vector<std::string> entry_names(const AnisotropyFunction& f);

ImmersionPatch hyperplane_patch(int ambient_dim);
/// x(s, t) = (t cos s, t sin s, s) on [-pi, pi] x [-t_max, t_max].
ImmersionPatch helicoid_patch(double t_max = 2.0);
/// Radius r, axis e_1, outward normal; chart (s, w) on [0, 2 pi] x [-1, 1].
ImmersionPatch round_cylinder_patch(double radius = 1.0);
/// Helicoid in span(e1, e2, e3) times the e4 line; chart (s, t, w).
ImmersionPatch helicoid_line_patch(double t_max = 2.0);

/// Extension of F from S^n to S^{n+1}: equals F(u) at cos(a) u + sin(a) e_last
/// for |a| <= band_halfwidth and an ellipsoidal cap near the poles, joined
/// by a C^2 convex blend. Isotropic F maps to isotropic F.
/// Throws ConvexityViolation if the band is too wide for F or the audit fails.
AnisotropyFunction extend_axis(const AnisotropyFunction& f, double band_halfwidth = 0.1);

}  // namespace wulfflab
