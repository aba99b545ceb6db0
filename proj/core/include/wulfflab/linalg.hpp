#pragma once

#include <Eigen/Dense>

namespace wulfflab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Orthonormal basis of u^perp as the columns of a (d x d-1) matrix.
///
/// Gram-Schmidt seeded with the coordinate axis least aligned with u, then
/// the remaining axes in index order, so the result is reproducible.
Mat orthonormal_complement(const Vec& u);

/// Orthonormal basis (columns) of the orthogonal complement of span(rows).
Mat complement_of_rows(const Mat& rows);

/// Symmetric square root through an eigen-decomposition. Eigenvalues in
/// [-neg_tol, 0) are clamped to zero; anything more negative throws
/// ConvexityViolation.
Mat sym_sqrt(const Mat& a, double neg_tol = 1e-8);

double min_singular_value(const Mat& m);

/// Singular values in descending order.
Vec singular_values(const Mat& m);

/// Elementary symmetric polynomials M_0..M_n of the entries of v.
Vec elementary_symmetric(const Vec& v);

}  // namespace wulfflab
