#ifndef JIVE_RANK_SELECT_HPP
#define JIVE_RANK_SELECT_HPP

#include <cstdint>
#include <vector>

#include "jive/core.hpp"

namespace jive {

struct RankSelectConfig {
    int n_perm = 1000;
    double alpha = 0.01;
    std::uint64_t seed = 0;
    // Estimation settings for the stage-2 inner JIVE fits. Looser than the
    // final-fit defaults; the permutation statistic only needs to be
    // computed consistently between observed and permuted data.
    JiveOptions fit_opts{50, 1e-6};
};

struct RankSelection {
    std::vector<Eigen::Index> effective_ranks;  // rank-eff(X_i)
    Eigen::Index joint_rank = 0;
    std::vector<Eigen::Index> individual_ranks;  // rank-eff(X_i) - r, floored at 0
    std::vector<std::vector<double>> stage1_pvalues;  // per block, per tested singular value
    std::vector<double> stage2_pvalues;               // per tested joint rank
    RankSelectConfig config;

    JiveRanks ranks() const { return JiveRanks{joint_rank, individual_ranks}; }
};

// Stage 1: count significant singular values of one block by comparing
// d1 of the (successively deflated) matrix against its distribution under
// within-row column permutation. Returns the count and the p-value trail.
std::pair<Eigen::Index, std::vector<double>>
effective_rank(const Matrix& block, int n_perm, double alpha, std::uint64_t seed);

// Full two-stage procedure: effective ranks per block, then the joint
// rank by testing residual blocks for remaining joint structure under
// per-block column permutation.
RankSelection select_ranks(const MultiBlockDataset& ds, const RankSelectConfig& cfg);

}  // namespace jive

#endif
