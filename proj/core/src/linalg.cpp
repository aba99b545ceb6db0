#include "wulfflab/linalg.hpp"

#include <cmath>
#include <string>

#include "wulfflab/errors.hpp"

namespace wulfflab {

namespace {

// Appends candidate to basis if it keeps enough norm after projecting out
// the existing columns (two passes of classical Gram-Schmidt).
bool try_append(Mat& basis, int& filled, Vec candidate, const Mat& against) {
  for (int pass = 0; pass < 2; ++pass) {
    for (int j = 0; j < against.cols(); ++j) candidate -= against.col(j).dot(candidate) * against.col(j);
    for (int j = 0; j < filled; ++j) candidate -= basis.col(j).dot(candidate) * basis.col(j);
  }
  const double norm = candidate.norm();
  if (norm < 1e-6) return false;
  basis.col(filled++) = candidate / norm;
  return true;
}

}  // namespace

Mat orthonormal_complement(const Vec& u) {
  const int d = static_cast<int>(u.size());
  const Vec unit = u.normalized();
  int least = 0;
  for (int i = 1; i < d; ++i)
    if (std::abs(unit[i]) < std::abs(unit[least])) least = i;

  Mat basis(d, d - 1);
  int filled = 0;
  const Mat against = unit;
  try_append(basis, filled, Vec::Unit(d, least), against);
  for (int i = 0; i < d && filled < d - 1; ++i) {
    if (i == least) continue;
    try_append(basis, filled, Vec::Unit(d, i), against);
  }
  return basis;
}

Mat complement_of_rows(const Mat& rows) {
  const int d = static_cast<int>(rows.cols());
  const int k = static_cast<int>(rows.rows());
  Mat against = rows.transpose();
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < j; ++i) against.col(j) -= against.col(i).dot(against.col(j)) * against.col(i);
    against.col(j).normalize();
  }
  Mat basis(d, d - k);
  int filled = 0;
  for (int i = 0; i < d && filled < d - k; ++i) try_append(basis, filled, Vec::Unit(d, i), against);
  return basis;
}

Mat sym_sqrt(const Mat& a, double neg_tol) {
  const Mat sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> eig(sym);
  Vec ev = eig.eigenvalues();
  if (ev.size() > 0 && ev.minCoeff() < -neg_tol) {
    throw Error(ErrorKind::ConvexityViolation,
                "matrix has eigenvalue " + std::to_string(ev.minCoeff()) + " < 0");
  }
  ev = ev.cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().transpose();
}

Vec singular_values(const Mat& m) {
  if (m.size() == 0) return Vec();
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues();
}

double min_singular_value(const Mat& m) {
  const Vec s = singular_values(m);
  return s.size() ? s.minCoeff() : 0.0;
}

Vec elementary_symmetric(const Vec& v) {
  const int n = static_cast<int>(v.size());
  Vec e = Vec::Zero(n + 1);
  e[0] = 1.0;
  for (int i = 0; i < n; ++i)
    for (int k = i + 1; k >= 1; --k) e[k] += v[i] * e[k - 1];
  return e;
}

}  // namespace wulfflab
