#ifndef JIVE_CORE_HPP
#define JIVE_CORE_HPP

#include <string>
#include <utility>
#include <vector>

#include "jive/multiblock.hpp"

namespace jive {

/// Target ranks: one joint rank shared across blocks, one individual
/// rank per block.
struct JiveRanks {
    Eigen::Index joint = 0;
    std::vector<Eigen::Index> individual;
};

struct JiveOptions {
    int max_iter = 500;
    double tol = 1e-8;  // relative decrease of ||R||^2 declaring convergence
};

/// Result of the iterative estimation: per-block joint, individual and
/// residual pieces, the factorized score/loading view, and the
/// convergence trace.
struct JiveDecomposition {
    std::vector<Matrix> joint_blocks;       // J_i, p_i x n
    std::vector<Matrix> individual_blocks;  // A_i, p_i x n
    std::vector<Matrix> residual_blocks;    // R_i = X_i - J_i - A_i
    JiveRanks ranks;

    Matrix joint_scores;                     // S, r x n
    std::vector<Matrix> joint_loadings;      // U_i, p_i x r
    std::vector<Matrix> individual_scores;   // S_i, r_i x n
    std::vector<Matrix> individual_loadings; // W_i, p_i x r_i

    std::vector<double> residual_trace;  // ||R||^2 per iteration
    int iterations = 0;
    bool converged = false;
    std::vector<std::string> warnings;

    Matrix joint_stacked() const;
    Matrix individual_stacked() const;
    Matrix residual_stacked() const;
    double residual_sq() const;
};

struct VariationExplained {
    std::string block;
    double joint_pct;
    double individual_pct;
    double residual_pct;
};

void validate_ranks(const MultiBlockDataset& ds, const JiveRanks& ranks);

// Alternating minimization of ||R||^2 under the rank and row-orthogonality
// constraints: rank-r SVD of the joint part, then per-block rank-r_i SVD of
// the individual part projected off the joint score rows.
JiveDecomposition estimate_jive(const MultiBlockDataset& ds, const JiveRanks& ranks,
                                const JiveOptions& opts = {});

// Rewrites an arbitrary (J, A) split as an equivalent split with joint and
// individual row spaces orthogonal: J_i + A_i P_J and A_i (I - P_J). Sums
// are preserved exactly; ranks are preserved when rank(T_i) =
// rank(J) + rank(A_i).
std::pair<std::vector<Matrix>, std::vector<Matrix>>
orthogonalize(const std::vector<Matrix>& joint_blocks,
              const std::vector<Matrix>& individual_blocks);

// For blocks with p_i > n, estimates on the n x n representation
// Lambda_i V_i' (columnwise isometric to X_i) and maps components back
// through the left singular vectors. Identical results, less work when
// p_i >> n.
JiveDecomposition reduce_then_estimate(const MultiBlockDataset& ds, const JiveRanks& ranks,
                                       const JiveOptions& opts = {});

// Per-block percentage of sum of squares captured by each component.
std::vector<VariationExplained> variation_explained(const MultiBlockDataset& ds,
                                                    const JiveDecomposition& d);

}  // namespace jive

#endif
