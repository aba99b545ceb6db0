#include "wulfflab/sphere_grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <utility>

#include "wulfflab/errors.hpp"
#include "wulfflab/parallel.hpp"

namespace wulfflab {

namespace {

// Key identifying a lattice point on the icosahedron: the (vertex, weight)
// pairs with nonzero weight, sorted by vertex. Shared edge points get the same
// key from both faces.
using LatticeKey = std::vector<std::pair<int, int>>;

double halton(std::size_t index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

}  // namespace

Icosphere icosphere(int frequency) {
  if (frequency < 1) throw Error(ErrorKind::InvalidArgument, "icosphere frequency must be >= 1");
  const double p = (1.0 + std::sqrt(5.0)) / 2.0;
  const std::array<std::array<double, 3>, 12> corners{{{-1, p, 0}, {1, p, 0}, {-1, -p, 0}, {1, -p, 0},
                                                      {0, -1, p}, {0, 1, p}, {0, -1, -p}, {0, 1, -p},
                                                      {p, 0, -1}, {p, 0, 1}, {-p, 0, -1}, {-p, 0, 1}}};
  const std::array<std::array<int, 3>, 20> faces{{{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                                  {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                                  {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                                  {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}}};
  std::array<Vec, 12> c;
  for (int i = 0; i < 12; ++i) c[i] = Vec{{corners[i][0], corners[i][1], corners[i][2]}}.normalized();

  Icosphere out;
  std::map<LatticeKey, int> index;
  auto vertex = [&](const std::array<int, 3>& face, int i, int j) {
    const int k = frequency - i - j;
    LatticeKey key;
    const int w[3] = {i, j, k};
    for (int s = 0; s < 3; ++s)
      if (w[s] > 0) key.emplace_back(face[s], w[s]);
    std::sort(key.begin(), key.end());
    auto [it, inserted] = index.try_emplace(key, static_cast<int>(out.vertices.size()));
    if (inserted) {
      Vec v = Vec::Zero(3);
      for (const auto& [corner, weight] : key) v += static_cast<double>(weight) * c[corner];
      out.vertices.push_back(v.normalized());
    }
    return it->second;
  };

  for (const auto& face : faces) {
    // Row i, column j; weights (i, j, f-i-j) on the face corners.
    for (int i = 0; i < frequency; ++i) {
      for (int j = 0; j + i < frequency; ++j) {
        const int a = vertex(face, i, j);
        const int b = vertex(face, i + 1, j);
        const int d = vertex(face, i, j + 1);
        out.triangles.push_back({a, b, d});
        if (i + j + 1 < frequency) {
          const int e = vertex(face, i + 1, j + 1);
          out.triangles.push_back({b, e, d});
        }
      }
    }
  }
  // Orient outward.
  for (auto& t : out.triangles) {
    const Eigen::Vector3d p0 = out.vertices[t[0]], p1 = out.vertices[t[1]], p2 = out.vertices[t[2]];
    if ((p1 - p0).cross(p2 - p0).dot(p0 + p1 + p2) < 0) std::swap(t[1], t[2]);
  }
  return out;
}

std::vector<Vec> circle_grid(int count) {
  std::vector<Vec> pts;
  pts.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double a = 2.0 * std::numbers::pi * i / count;
    pts.push_back(Vec{{std::cos(a), std::sin(a)}});
  }
  return pts;
}

std::vector<Vec> spiral_grid(int ambient_dim, int count) {
  static constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
  const int pairs = (ambient_dim + 1) / 2;
  if (2 * pairs > 10) throw Error(ErrorKind::InvalidArgument, "spiral_grid supports dimension <= 10");
  std::vector<Vec> pts;
  pts.reserve(count);
  for (int i = 0; i < count; ++i) {
    Vec g(2 * pairs);
    for (int p = 0; p < pairs; ++p) {
      const double u1 = halton(i + 1, kPrimes[2 * p]);
      const double u2 = halton(i + 1, kPrimes[2 * p + 1]);
      const double r = std::sqrt(-2.0 * std::log(std::max(u1, 1e-300)));
      g[2 * p] = r * std::cos(2.0 * std::numbers::pi * u2);
      g[2 * p + 1] = r * std::sin(2.0 * std::numbers::pi * u2);
    }
    Vec v = g.head(ambient_dim);
    const double n = v.norm();
    if (n > 1e-12) pts.push_back(v / n);
  }
  return pts;
}

std::vector<Vec> sphere_grid(int ambient_dim, int resolution) {
  if (ambient_dim < 2) throw Error(ErrorKind::InvalidArgument, "sphere_grid needs ambient_dim >= 2");
  if (resolution < 1) throw Error(ErrorKind::InvalidArgument, "sphere_grid needs resolution >= 1");
  if (ambient_dim == 2) return circle_grid(2 * resolution);
  if (ambient_dim == 3) return icosphere(std::max(1, resolution / 2)).vertices;
  double count = std::pow(static_cast<double>(resolution), ambient_dim - 1);
  count = std::min(count, 131072.0);
  return spiral_grid(ambient_dim, static_cast<int>(count));
}

std::vector<Vec> subsphere_grid(const Mat& frame, int resolution) {
  const int k1 = static_cast<int>(frame.rows());
  std::vector<Vec> pts;
  if (k1 == 1) {
    pts.push_back(frame.row(0).transpose());
    pts.push_back(-frame.row(0).transpose());
    return pts;
  }
  for (const Vec& s : sphere_grid(k1, resolution)) pts.push_back(frame.transpose() * s);
  return pts;
}

}  // namespace wulfflab
