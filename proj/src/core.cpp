#include "jive/core.hpp"

#include <cmath>
#include <limits>

namespace jive {

namespace {

// Rank-r SVD via an eigendecomposition of the smaller-side Gram matrix.
// Several times faster than the general-purpose dense SVD and accurate to
// well below the estimation tolerances for the leading (non-negligible)
// part of the spectrum, which is all the alternating fits consume.
TruncatedSvd gram_truncated_svd(const Matrix& m, Eigen::Index r) {
    const Eigen::Index max_rank = std::min(m.rows(), m.cols());
    if (r < 0 || r > max_rank) {
        throw RankBoundsError("requested rank " + std::to_string(r) + " outside [0, " +
                              std::to_string(max_rank) + "]");
    }
    TruncatedSvd out;
    out.rank = r;
    if (r == 0) {
        out.u.resize(m.rows(), 0);
        out.s.resize(0);
        out.vt.resize(0, m.cols());
        return out;
    }

    const bool wide = m.rows() <= m.cols();
    Matrix gram = wide ? Matrix(m * m.transpose()) : Matrix(m.transpose() * m);
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
    if (es.info() != Eigen::Success) throw NumericalError("Gram eigendecomposition failed");

    const Eigen::Index g = gram.rows();
    out.u.resize(m.rows(), r);
    out.s.resize(r);
    out.vt.resize(r, m.cols());
    const double top = std::max(es.eigenvalues()(g - 1), 0.0);
    for (Eigen::Index j = 0; j < r; ++j) {
        const Eigen::Index idx = g - 1 - j;  // eigenvalues are ascending
        const double lambda = std::max(es.eigenvalues()(idx), 0.0);
        const double s = std::sqrt(lambda);
        out.s(j) = s;
        Vector evec = es.eigenvectors().col(idx);
        if (wide) {
            out.u.col(j) = evec;
            if (lambda > top * 1e-28) {
                out.vt.row(j) = (evec.transpose() * m) / s;
            } else {
                out.s(j) = 0.0;
                out.vt.row(j).setZero();
            }
        } else {
            out.vt.row(j) = evec.transpose();
            if (lambda > top * 1e-28) {
                out.u.col(j) = (m * evec) / s;
            } else {
                out.s(j) = 0.0;
                out.u.col(j).setZero();
            }
        }
        // Same orientation rule as the reference SVD: the largest-magnitude
        // entry of each left vector is nonnegative.
        Eigen::Index imax = 0;
        double best = -1.0;
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            const double a = std::abs(out.u(i, j));
            if (a > best) {
                best = a;
                imax = i;
            }
        }
        if (out.u(imax, j) < 0.0) {
            out.u.col(j) = -out.u.col(j);
            out.vt.row(j) = -out.vt.row(j);
        }
    }
    return out;
}

Matrix stack(const std::vector<Matrix>& blocks) {
    Eigen::Index p = 0;
    const Eigen::Index n = blocks.empty() ? 0 : blocks.front().cols();
    for (const auto& b : blocks) p += b.rows();
    Matrix out(p, n);
    Eigen::Index row = 0;
    for (const auto& b : blocks) {
        out.middleRows(row, b.rows()) = b;
        row += b.rows();
    }
    return out;
}

}  // namespace

Matrix JiveDecomposition::joint_stacked() const { return stack(joint_blocks); }
Matrix JiveDecomposition::individual_stacked() const { return stack(individual_blocks); }
Matrix JiveDecomposition::residual_stacked() const { return stack(residual_blocks); }

double JiveDecomposition::residual_sq() const {
    double total = 0.0;
    for (const auto& r : residual_blocks) total += r.squaredNorm();
    return total;
}

void validate_ranks(const MultiBlockDataset& ds, const JiveRanks& ranks) {
    if (ranks.individual.size() != ds.n_blocks()) {
        throw RankBoundsError("expected " + std::to_string(ds.n_blocks()) +
                              " individual ranks, got " +
                              std::to_string(ranks.individual.size()));
    }
    if (ranks.joint < 0) throw RankBoundsError("joint rank must be >= 0");
    const Eigen::Index n = ds.n_samples();
    for (std::size_t i = 0; i < ds.n_blocks(); ++i) {
        const Eigen::Index ri = ranks.individual[i];
        const Eigen::Index cap = std::min(ds.blocks[i].data.rows(), n);
        if (ri < 0) throw RankBoundsError("individual rank must be >= 0");
        if (ranks.joint + ri > cap) {
            throw RankBoundsError("block '" + ds.blocks[i].name + "': r + r_i = " +
                                  std::to_string(ranks.joint + ri) + " exceeds min(p_i, n) = " +
                                  std::to_string(cap));
        }
    }
}

JiveDecomposition estimate_jive(const MultiBlockDataset& ds, const JiveRanks& ranks,
                                const JiveOptions& opts) {
    validate_dataset(ds);
    validate_ranks(ds, ranks);
    const std::size_t k = ds.n_blocks();
    const Eigen::Index n = ds.n_samples();
    const Eigen::Index r = ranks.joint;

    JiveDecomposition out;
    out.ranks = ranks;
    for (std::size_t i = 0; i < k; ++i) {
        const Eigen::Index cap = std::min(ds.blocks[i].data.rows(), n);
        if (r + ranks.individual[i] == cap && cap > 0) {
            out.warnings.push_back("block '" + ds.blocks[i].name +
                                   "' is fully parameterized (r + r_i = min(p_i, n))");
        }
    }

    std::vector<Matrix> X;
    std::vector<Eigen::Index> offsets;
    Eigen::Index p = 0;
    for (const auto& b : ds.blocks) {
        X.push_back(b.data);
        offsets.push_back(p);
        p += b.data.rows();
    }

    std::vector<Matrix> J(k), A(k), W(k), Si(k), Ui(k);
    for (std::size_t i = 0; i < k; ++i) {
        J[i] = Matrix::Zero(X[i].rows(), n);
        A[i] = Matrix::Zero(X[i].rows(), n);
        W[i] = Matrix::Zero(X[i].rows(), ranks.individual[i]);
        Si[i] = Matrix::Zero(ranks.individual[i], n);
        Ui[i] = Matrix::Zero(X[i].rows(), r);
    }
    Matrix S = Matrix::Zero(r, n);

    // Initialize X^Joint = X and alternate: joint SVD on the stacked
    // joint part, then per-block individual SVD on the joint-removed part
    // projected off the joint score rows.
    Matrix x_joint(p, n);
    for (std::size_t i = 0; i < k; ++i) x_joint.middleRows(offsets[i], X[i].rows()) = X[i];

    // Exact-recovery runs drive ||R||^2 to rounding noise where the
    // relative-change test never fires; stop at this absolute floor.
    const double r2_floor = 1e-20 * x_joint.squaredNorm();

    double prev_r2 = std::numeric_limits<double>::infinity();
    for (int iter = 1; iter <= opts.max_iter; ++iter) {
        TruncatedSvd jsvd = gram_truncated_svd(x_joint, r);
        S = jsvd.s.asDiagonal() * jsvd.vt;
        const Matrix& vt = jsvd.vt;  // r x n, orthonormal rows

        double r2 = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            Ui[i] = jsvd.u.middleRows(offsets[i], X[i].rows());
            J[i] = Ui[i] * S;
            Matrix unique = X[i] - J[i];
            // Project off the joint score rows so JA' = 0 by construction.
            Matrix projected = unique - (unique * vt.transpose()) * vt;
            TruncatedSvd isvd = gram_truncated_svd(projected, ranks.individual[i]);
            W[i] = isvd.u;
            Si[i] = isvd.s.asDiagonal() * isvd.vt;
            A[i] = W[i] * Si[i];
            x_joint.middleRows(offsets[i], X[i].rows()) = X[i] - A[i];
            r2 += (X[i] - J[i] - A[i]).squaredNorm();
        }
        out.residual_trace.push_back(r2);
        out.iterations = iter;

        const double denom = std::max(prev_r2, std::numeric_limits<double>::min());
        if (r2 <= r2_floor || (iter > 1 && std::abs(prev_r2 - r2) <= opts.tol * denom)) {
            out.converged = true;
            break;
        }
        prev_r2 = r2;
    }

    out.joint_blocks = J;
    out.individual_blocks = A;
    out.joint_scores = S;
    out.joint_loadings = Ui;
    out.individual_scores = Si;
    out.individual_loadings = W;
    out.residual_blocks.resize(k);
    for (std::size_t i = 0; i < k; ++i) out.residual_blocks[i] = X[i] - J[i] - A[i];
    return out;
}

std::pair<std::vector<Matrix>, std::vector<Matrix>>
orthogonalize(const std::vector<Matrix>& joint_blocks,
              const std::vector<Matrix>& individual_blocks) {
    if (joint_blocks.size() != individual_blocks.size() || joint_blocks.empty()) {
        throw InputError("orthogonalize: need matching nonempty block lists");
    }
    const Eigen::Index n = joint_blocks.front().cols();
    for (std::size_t i = 0; i < joint_blocks.size(); ++i) {
        if (joint_blocks[i].cols() != n || individual_blocks[i].cols() != n ||
            joint_blocks[i].rows() != individual_blocks[i].rows()) {
            throw InputError("orthogonalize: block " + std::to_string(i) +
                             " dimensions do not agree");
        }
    }
    Matrix stacked_j = stack(joint_blocks);
    Matrix proj;
    if (stacked_j.isZero(0.0)) {
        proj = Matrix::Zero(n, n);
    } else {
        proj = row_space_projector(stacked_j);
    }
    std::vector<Matrix> j_out, a_out;
    for (std::size_t i = 0; i < joint_blocks.size(); ++i) {
        Matrix ap = individual_blocks[i] * proj;
        j_out.push_back(joint_blocks[i] + ap);
        a_out.push_back(individual_blocks[i] - ap);
    }
    return {std::move(j_out), std::move(a_out)};
}

JiveDecomposition reduce_then_estimate(const MultiBlockDataset& ds, const JiveRanks& ranks,
                                       const JiveOptions& opts) {
    validate_dataset(ds);
    validate_ranks(ds, ranks);
    const Eigen::Index n = ds.n_samples();

    MultiBlockDataset reduced = ds;
    std::vector<Matrix> basis(ds.n_blocks());  // empty when the block is not reduced
    bool any_reduced = false;
    for (std::size_t i = 0; i < ds.n_blocks(); ++i) {
        const Matrix& xi = ds.blocks[i].data;
        if (xi.rows() <= n) continue;
        any_reduced = true;
        TruncatedSvd svd = truncated_svd(xi, n);
        basis[i] = svd.u;  // p_i x n, orthonormal columns
        reduced.blocks[i].data = svd.s.asDiagonal() * svd.vt;  // n x n
        reduced.blocks[i].variable_labels.assign(static_cast<std::size_t>(n), "");
        for (Eigen::Index j = 0; j < n; ++j) {
            reduced.blocks[i].variable_labels[static_cast<std::size_t>(j)] =
                ds.blocks[i].name + "_c" + std::to_string(j + 1);
        }
    }
    if (!any_reduced) return estimate_jive(ds, ranks, opts);

    JiveDecomposition d = estimate_jive(reduced, ranks, opts);

    // Map components back to the original variable space. Columnwise
    // geometry is unchanged, so scores carry over as-is.
    for (std::size_t i = 0; i < ds.n_blocks(); ++i) {
        if (basis[i].size() == 0) continue;
        d.joint_blocks[i] = basis[i] * d.joint_blocks[i];
        d.individual_blocks[i] = basis[i] * d.individual_blocks[i];
        d.joint_loadings[i] = basis[i] * d.joint_loadings[i];
        d.individual_loadings[i] = basis[i] * d.individual_loadings[i];
        d.residual_blocks[i] = ds.blocks[i].data - d.joint_blocks[i] - d.individual_blocks[i];
    }
    return d;
}

std::vector<VariationExplained> variation_explained(const MultiBlockDataset& ds,
                                                    const JiveDecomposition& d) {
    if (d.joint_blocks.size() != ds.n_blocks()) {
        throw InputError("decomposition/block count mismatch");
    }
    std::vector<VariationExplained> out;
    for (std::size_t i = 0; i < ds.n_blocks(); ++i) {
        const double total = ds.blocks[i].data.squaredNorm();
        if (total == 0.0) {
            throw DegenerateError("block '" + ds.blocks[i].name + "' has zero variation");
        }
        VariationExplained v;
        v.block = ds.blocks[i].name;
        v.joint_pct = 100.0 * d.joint_blocks[i].squaredNorm() / total;
        v.individual_pct = 100.0 * d.individual_blocks[i].squaredNorm() / total;
        v.residual_pct = 100.0 * d.residual_blocks[i].squaredNorm() / total;
        out.push_back(v);
    }
    return out;
}

}  // namespace jive
