#include "jive/sparse.hpp"

#include <cmath>
#include <limits>

namespace jive {

Vector soft_threshold(const Vector& x, double threshold) {
    Vector out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double a = std::abs(x(i));
        out(i) = (a <= threshold) ? 0.0 : std::copysign(a - threshold, x(i));
    }
    return out;
}

namespace {

// BIC over candidate weights for the u-step given score direction v.
// RSS of the rank-1 fit u v' expands to ||m||^2 - 2 u.mv + ||u||^2 since
// v is a unit vector.
double select_bic_lambda(const Vector& mv, double m_sq, double n_eff) {
    const double lambda_max = 2.0 * mv.cwiseAbs().maxCoeff();
    if (lambda_max <= 0.0) return 0.0;
    double best_lambda = 0.0;
    double best_bic = std::numeric_limits<double>::infinity();
    const double lo = std::log(lambda_max) + std::log(1e-4);
    const double hi = std::log(lambda_max);
    const int n_grid = 20;
    for (int g = 0; g < n_grid; ++g) {
        const double lambda = std::exp(lo + (hi - lo) * g / (n_grid - 1));
        Vector u = soft_threshold(mv, lambda / 2.0);
        int df = 0;
        for (Eigen::Index i = 0; i < u.size(); ++i) {
            if (u(i) != 0.0) ++df;
        }
        double rss = m_sq - 2.0 * u.dot(mv) + u.squaredNorm();
        rss = std::max(rss, 1e-300);
        const double bic = n_eff * std::log(rss / n_eff) + df * std::log(n_eff);
        if (bic < best_bic) {
            best_bic = bic;
            best_lambda = lambda;
        }
    }
    return best_lambda;
}

void apply_sign_convention(Vector& u, Vector& v) {
    Eigen::Index imax = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        const double a = std::abs(u(i));
        if (a > best) {
            best = a;
            imax = i;
        }
    }
    if (u.size() > 0 && u(imax) < 0.0) {
        u = -u;
        v = -v;
    }
}

}  // namespace

SparseRank1 sparse_rank1(const Matrix& m, const PenaltyWeight& weight,
                         double inner_tol, int inner_max_iter) {
    check_finite(m);
    if (m.rows() == 0 || m.cols() == 0) throw InputError("sparse_rank1 requires a nonempty matrix");

    SparseRank1 out;
    out.u = Vector::Zero(m.rows());
    out.v = Vector::Zero(m.cols());
    if (m.isZero(0.0)) return out;

    if (!weight.use_bic && weight.value == 0.0) {
        // Penalty-free case is an ordinary leading singular triple.
        TruncatedSvd svd = truncated_svd(m, 1);
        out.u = svd.u.col(0);
        out.s = svd.s(0);
        out.v = svd.vt.row(0).transpose();
        return out;
    }

    const double m_sq = m.squaredNorm();
    const double n_eff = static_cast<double>(m.size());
    Vector v = truncated_svd(m, 1).vt.row(0).transpose();
    Vector u_raw;
    double lambda = weight.value;

    for (int it = 0; it < inner_max_iter; ++it) {
        Vector mv = m * v;
        if (weight.use_bic) lambda = select_bic_lambda(mv, m_sq, n_eff);
        u_raw = soft_threshold(mv, lambda / 2.0);
        if (u_raw.isZero(0.0)) {
            out.v = v;
            out.lambda_used = lambda;
            return out;  // fully shrunk
        }
        Vector w = m.transpose() * u_raw;
        const double wn = w.norm();
        if (wn == 0.0) break;
        Vector v_new = w / wn;
        if (v_new.dot(v) < 0.0) v_new = -v_new;
        const double delta = (v_new - v).norm();
        v = v_new;
        if (delta < inner_tol) break;
    }

    out.s = u_raw.norm();
    out.u = u_raw / out.s;
    out.v = v;
    out.lambda_used = lambda;
    apply_sign_convention(out.u, out.v);
    return out;
}

namespace {

struct SparseFactors {
    Matrix loadings;  // p x r, unit columns with exact zeros
    Matrix scores;    // r x n, row j = s_j v_j'
    double penalty = 0.0;  // sum over components of lambda_j * s_j * ||u_j||_1
};

// Greedy deflation: extract rank-1 sparse components one at a time.
SparseFactors extract_sparse(const Matrix& m, Eigen::Index r, const PenaltyWeight& weight,
                             const SparsityConfig& cfg) {
    SparseFactors f;
    f.loadings = Matrix::Zero(m.rows(), r);
    f.scores = Matrix::Zero(r, m.cols());
    Matrix residual = m;
    for (Eigen::Index j = 0; j < r; ++j) {
        SparseRank1 c = sparse_rank1(residual, weight, cfg.inner_tol, cfg.inner_max_iter);
        if (c.s == 0.0) break;
        f.loadings.col(j) = c.u;
        f.scores.row(j) = c.s * c.v.transpose();
        f.penalty += c.lambda_used * c.s * c.u.lpNorm<1>();
        residual.noalias() -= c.s * c.u * c.v.transpose();
    }
    return f;
}

}  // namespace

JiveDecomposition estimate_sparse_jive(const MultiBlockDataset& ds, const JiveRanks& ranks,
                                       const SparsityConfig& cfg, const JiveOptions& opts) {
    validate_dataset(ds);
    validate_ranks(ds, ranks);
    if (cfg.individual_weights.size() != ds.n_blocks()) {
        throw InputError("expected one individual weight per block");
    }

    const std::size_t k = ds.n_blocks();
    const Eigen::Index n = ds.n_samples();
    const Eigen::Index r = ranks.joint;

    std::vector<Matrix> X;
    std::vector<Eigen::Index> offsets;
    Eigen::Index p = 0;
    for (const auto& b : ds.blocks) {
        X.push_back(b.data);
        offsets.push_back(p);
        p += b.data.rows();
    }

    JiveDecomposition out;
    out.ranks = ranks;
    std::vector<Matrix> J(k), A(k), W(k), Si(k), Ui(k);
    Matrix S = Matrix::Zero(r, n);

    Matrix x_joint(p, n);
    for (std::size_t i = 0; i < k; ++i) x_joint.middleRows(offsets[i], X[i].rows()) = X[i];

    const double obj_floor = 1e-20 * x_joint.squaredNorm();
    double prev_obj = std::numeric_limits<double>::infinity();
    for (int iter = 1; iter <= opts.max_iter; ++iter) {
        SparseFactors joint = extract_sparse(x_joint, r, cfg.joint_weight, cfg);
        S = joint.scores;
        double penalty = joint.penalty;

        Matrix score_proj;
        if (r > 0 && !S.isZero(0.0)) {
            score_proj = row_space_projector(S);
        } else {
            score_proj = Matrix::Zero(n, n);
        }

        double r2 = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            Ui[i] = joint.loadings.middleRows(offsets[i], X[i].rows());
            J[i] = Ui[i] * S;
            Matrix unique = X[i] - J[i];
            // Orthogonality to the joint scores is enforced on the right
            // factors; loadings are left unconstrained.
            Matrix projected = unique - unique * score_proj;
            SparseFactors indiv =
                extract_sparse(projected, ranks.individual[i], cfg.individual_weights[i], cfg);
            W[i] = indiv.loadings;
            Si[i] = indiv.scores;
            penalty += indiv.penalty;
            A[i] = W[i] * Si[i];
            x_joint.middleRows(offsets[i], X[i].rows()) = X[i] - A[i];
            r2 += (X[i] - J[i] - A[i]).squaredNorm();
        }
        const double obj = r2 + penalty;
        out.residual_trace.push_back(obj);
        out.iterations = iter;

        const double denom = std::max(prev_obj, std::numeric_limits<double>::min());
        if (obj <= obj_floor || (iter > 1 && std::abs(prev_obj - obj) <= opts.tol * denom)) {
            out.converged = true;
            break;
        }
        prev_obj = obj;
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

}  // namespace jive
