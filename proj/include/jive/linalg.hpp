#ifndef JIVE_LINALG_HPP
#define JIVE_LINALG_HPP

#include <Eigen/Dense>

#include "jive/errors.hpp"

namespace jive {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Singular values below rank_tolerance * s1 are treated as zero when
// computing numerical ranks and row-space projectors.
constexpr double kRankTolerance = 1e-10;

/// Leading-r SVD factors of a dense matrix.
///
/// Sign convention: within each singular triple the u-column entry of
/// largest magnitude is nonnegative (ties broken by lowest row index),
/// making the factorization a pure function of the input whenever the
/// singular values are separated.
struct TruncatedSvd {
    Matrix u;   // p x r, orthonormal columns
    Vector s;   // r, nonnegative, nonincreasing
    Matrix vt;  // r x n, orthonormal rows
    Eigen::Index rank;

    Matrix reconstruct() const { return u * s.asDiagonal() * vt; }
};

void check_finite(const Matrix& m, const char* what = "matrix");

double frobenius_norm(const Matrix& m);

TruncatedSvd truncated_svd(const Matrix& m, Eigen::Index r);

// All singular values (nonincreasing) of m; the reference route used by
// truncated_svd internally and by Eckart-Young style checks.
Vector singular_values(const Matrix& m);

// Largest singular value via power iteration on the smaller Gram matrix.
// Cheap enough to evaluate thousands of times inside permutation tests.
double leading_singular_value(const Matrix& m, double tol = 1e-9, int max_iter = 1000);

// n x n symmetric idempotent projector onto the row space of m, built
// from right singular vectors above the rank tolerance.
Matrix row_space_projector(const Matrix& m);

// Count of singular values above rel_tol * s1.
Eigen::Index numerical_rank(const Matrix& m, double rel_tol = kRankTolerance);

}  // namespace jive

#endif
