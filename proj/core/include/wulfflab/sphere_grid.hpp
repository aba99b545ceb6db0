#pragma once

#include <array>
#include <vector>

#include "wulfflab/linalg.hpp"

namespace wulfflab {

/// Icosahedral geodesic sphere. Each icosahedron face is split into
/// frequency^2 triangles; frequency 2^L reproduces L recursive subdivisions.
/// Vertices on shared edges are emitted once, so the mesh is watertight.
struct Icosphere {
  std::vector<Vec> vertices;
  std::vector<std::array<int, 3>> triangles;
};

Icosphere icosphere(int frequency);

/// `count` equally spaced points on the unit circle.
std::vector<Vec> circle_grid(int count);

/// Low-discrepancy points on S^{ambient_dim-1} (Halton sequence pushed
/// through Box-Muller and normalised).
std::vector<Vec> spiral_grid(int ambient_dim, int count);

/// Quasi-uniform grid on S^{ambient_dim-1} at a given resolution:
///   S^1   2*resolution equally spaced angles
///   S^2   icosphere of frequency max(1, resolution/2)
///   S^n   min(resolution^n, 131072) spiral points
std::vector<Vec> sphere_grid(int ambient_dim, int resolution);

/// Grid on the embedded S^k spanned by the rows of `frame` ((k+1) x d).
std::vector<Vec> subsphere_grid(const Mat& frame, int resolution);

}  // namespace wulfflab
