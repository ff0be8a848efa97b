#include "jive/linalg.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <string>

namespace jive {

void check_finite(const Matrix& m, const char* what) {
    if (!m.allFinite()) {
        throw InputError(std::string(what) + " contains non-finite entries");
    }
}

double frobenius_norm(const Matrix& m) {
    check_finite(m);
    return m.norm();
}

namespace {

// Flip signs so the largest-magnitude entry of each u column is
// nonnegative; ties resolved by the lowest row index.
void apply_sign_convention(Matrix& u, Matrix& vt) {
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
        Eigen::Index imax = 0;
        double best = -1.0;
        for (Eigen::Index i = 0; i < u.rows(); ++i) {
            double a = std::abs(u(i, j));
            if (a > best) {
                best = a;
                imax = i;
            }
        }
        if (u(imax, j) < 0.0) {
            u.col(j) = -u.col(j);
            vt.row(j) = -vt.row(j);
        }
    }
}

}  // namespace

TruncatedSvd truncated_svd(const Matrix& m, Eigen::Index r) {
    check_finite(m);
    const Eigen::Index rmax = std::min(m.rows(), m.cols());
    if (r < 0 || r > rmax) {
        throw RankBoundsError("requested rank " + std::to_string(r) +
                              " outside [0, " + std::to_string(rmax) + "]");
    }
    TruncatedSvd out;
    out.rank = r;
    if (r == 0) {
        out.u = Matrix::Zero(m.rows(), 0);
        out.s = Vector::Zero(0);
        out.vt = Matrix::Zero(0, m.cols());
        return out;
    }
    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.u = svd.matrixU().leftCols(r);
    out.s = svd.singularValues().head(r);
    out.vt = svd.matrixV().leftCols(r).transpose();
    apply_sign_convention(out.u, out.vt);
    return out;
}

Vector singular_values(const Matrix& m) {
    check_finite(m);
    if (m.rows() == 0 || m.cols() == 0) return Vector::Zero(0);
    Eigen::BDCSVD<Matrix> svd(m);
    return svd.singularValues();
}

double leading_singular_value(const Matrix& m, double tol, int max_iter) {
    check_finite(m);
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    // Iterate on the smaller of A'A and AA'.
    const bool wide = m.cols() <= m.rows();
    const Eigen::Index n = wide ? m.cols() : m.rows();
    if (n == 1) return m.norm();
    Vector v = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
    double lambda = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Vector w = wide ? Vector(m.transpose() * (m * v)) : Vector(m * (m.transpose() * v));
        double norm = w.norm();
        if (norm == 0.0) return 0.0;
        w /= norm;
        double prev = lambda;
        lambda = norm;
        v = w;
        if (it > 0 && std::abs(lambda - prev) <= tol * lambda) break;
    }
    return std::sqrt(lambda);
}

Matrix row_space_projector(const Matrix& m) {
    check_finite(m);
    if (m.rows() == 0 || m.cols() == 0) {
        throw InputError("row_space_projector requires a nonempty matrix");
    }
    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinV);
    const Vector& s = svd.singularValues();
    const double cutoff = (s.size() > 0 ? s(0) : 0.0) * kRankTolerance;
    Eigen::Index rank = 0;
    while (rank < s.size() && s(rank) > cutoff && s(rank) > 0.0) ++rank;
    if (rank == 0) return Matrix::Zero(m.cols(), m.cols());
    Matrix vr = svd.matrixV().leftCols(rank);
    return vr * vr.transpose();
}

Eigen::Index numerical_rank(const Matrix& m, double rel_tol) {
    Vector s = singular_values(m);
    if (s.size() == 0) return 0;
    const double cutoff = s(0) * rel_tol;
    Eigen::Index rank = 0;
    while (rank < s.size() && s(rank) > cutoff && s(rank) > 0.0) ++rank;
    return rank;
}

}  // namespace jive
