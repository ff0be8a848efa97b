#ifndef JIVE_SPARSE_HPP
#define JIVE_SPARSE_HPP

#include "jive/core.hpp"

namespace jive {

/// An L1 weight, either fixed or selected per iteration by BIC over a
/// logarithmic grid.
struct PenaltyWeight {
    bool use_bic = false;
    double value = 0.0;

    static PenaltyWeight bic() { return {true, 0.0}; }
    static PenaltyWeight fixed(double v) {
        if (v < 0.0) throw InputError("penalty weight must be >= 0");
        return {false, v};
    }
};

struct SparsityConfig {
    PenaltyWeight joint_weight;
    std::vector<PenaltyWeight> individual_weights;
    double inner_tol = 1e-9;
    int inner_max_iter = 500;
};

struct SparseRank1 {
    Vector u;  // unit loading vector with exact zeros
    double s = 0.0;
    Vector v;  // unit score direction
    double lambda_used = 0.0;
};

// Entrywise shrink toward zero; entries at or below the threshold become
// exact 0.
Vector soft_threshold(const Vector& x, double threshold);

// Rank-1 sparse SVD: alternate a soft-thresholded u-step (threshold
// lambda/2) with an ordinary leading-direction v-step. With BIC the
// weight is re-selected every u-step by minimizing
// n log(RSS/n) + df log(n) over a 20-point logarithmic grid up to the
// full-shrinkage threshold.
SparseRank1 sparse_rank1(const Matrix& m, const PenaltyWeight& weight,
                         double inner_tol = 1e-9, int inner_max_iter = 500);

// The dense outer loop with every SVD step replaced by sequential
// sparse_rank1 extraction and deflation. With all weights fixed at 0 the
// result matches estimate_jive. residual_trace records the penalized
// objective ||R||^2 + lambda Pen(U) + sum_i lambda_i Pen(W_i), with
// penalties on the magnitude-carrying loadings.
JiveDecomposition estimate_sparse_jive(const MultiBlockDataset& ds, const JiveRanks& ranks,
                                       const SparsityConfig& cfg, const JiveOptions& opts = {});

}  // namespace jive

#endif
