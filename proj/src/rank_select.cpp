#include "jive/rank_select.hpp"

#include <atomic>
#include <cmath>
#include <limits>

#include "jive/parallel.hpp"
#include "jive/rng.hpp"

namespace jive {

namespace {

// Add-one permutation p-value; never exactly zero.
double perm_pvalue(int n_at_least, int n_perm) {
    return (1.0 + n_at_least) / (1.0 + n_perm);
}

// Runs fn(replicate) -> statistic for each replicate in parallel and
// returns the count of statistics >= observed. Reduction order is fixed
// by replicate index, so the result is independent of worker count.
template <typename Fn>
int count_at_least(int n_perm, double observed, const Fn& fn) {
    std::vector<double> stats(static_cast<std::size_t>(n_perm));
    std::atomic<bool> failed{false};
    parallel_for(static_cast<std::size_t>(n_perm), [&](std::size_t t) {
        try {
            stats[t] = fn(t);
        } catch (...) {
            failed.store(true);
        }
    });
    if (failed.load()) throw NumericalError("permutation replicate failed");
    int count = 0;
    for (double s : stats) {
        if (s >= observed) ++count;
    }
    return count;
}

}  // namespace

std::pair<Eigen::Index, std::vector<double>>
effective_rank(const Matrix& block, int n_perm, double alpha, std::uint64_t seed) {
    if (n_perm < 1) throw InputError("n_perm must be >= 1");
    if (alpha <= 0.0 || alpha >= 1.0) throw InputError("alpha must be in (0, 1)");
    check_finite(block, "block");

    Matrix current = block;
    const Eigen::Index max_rank = std::min(block.rows(), block.cols());
    const double sq_min = std::sqrt(static_cast<double>(max_rank));
    const double sq_max = std::sqrt(static_cast<double>(std::max(block.rows(), block.cols())));
    Eigen::Index rank = 0;
    std::vector<double> pvalues;

    while (rank < max_rank) {
        TruncatedSvd lead = truncated_svd(current, 1);
        const double d1 = lead.s(0);
        // Deflation confines the residual to a (m - k)-dimensional subspace,
        // while within-row permutation spreads its energy back over all m
        // dimensions and so deflates the null. Rescale permuted statistics by
        // the ratio of iid-noise operator-norm edges for the two geometries;
        // at k = 0 the factor is exactly 1.
        const double free_dim = static_cast<double>(max_rank - rank);
        const double edge_scale = std::sqrt(static_cast<double>(max_rank) / free_dim) *
                                  (sq_max + std::sqrt(free_dim)) / (sq_max + sq_min);
        const std::uint64_t step_seed = derive_seed(seed, static_cast<std::uint64_t>(rank));
        int count = count_at_least(n_perm, d1, [&](std::size_t t) {
            Matrix permuted = permute_within_rows(current, derive_seed(step_seed, t));
            return edge_scale * leading_singular_value(permuted);
        });
        double p = perm_pvalue(count, n_perm);
        pvalues.push_back(p);
        if (p >= alpha) break;
        current.noalias() -= lead.u * lead.s.asDiagonal() * lead.vt;
        ++rank;
    }
    return {rank, pvalues};
}

namespace {

// Variation explained by fitting rank-1 joint and rank max(r_i - 1, 0)
// individual structure to the given residual blocks; the stage-2 test
// statistic.
double joint_refit_stat(const std::vector<Matrix>& blocks,
                        const std::vector<Eigen::Index>& individual_ranks,
                        const JiveOptions& opts) {
    MultiBlockDataset tmp;
    double total = 0.0;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        Block b;
        b.name = "b" + std::to_string(i);
        b.data = blocks[i];
        for (Eigen::Index v = 0; v < blocks[i].rows(); ++v) b.variable_labels.push_back("v");
        tmp.blocks.push_back(std::move(b));
        total += blocks[i].squaredNorm();
    }
    for (Eigen::Index j = 0; j < blocks.front().cols(); ++j) tmp.sample_labels.push_back("s");

    JiveRanks refit;
    refit.joint = 1;
    for (Eigen::Index ri : individual_ranks) refit.individual.push_back(std::max<Eigen::Index>(ri - 1, 0));
    JiveDecomposition d = estimate_jive(tmp, refit, opts);
    return total - d.residual_sq();
}

}  // namespace

RankSelection select_ranks(const MultiBlockDataset& ds, const RankSelectConfig& cfg) {
    validate_dataset(ds);
    if (cfg.n_perm < 1) throw InputError("n_perm must be >= 1");
    if (cfg.alpha <= 0.0 || cfg.alpha >= 1.0) throw InputError("alpha must be in (0, 1)");

    RankSelection sel;
    sel.config = cfg;

    // Stage 1: effective rank of each block.
    Eigen::Index min_eff = std::numeric_limits<Eigen::Index>::max();
    for (std::size_t i = 0; i < ds.n_blocks(); ++i) {
        auto [eff, pvals] = effective_rank(ds.blocks[i].data, cfg.n_perm, cfg.alpha,
                                           derive_seed(cfg.seed, 0x100 + i));
        sel.effective_ranks.push_back(eff);
        sel.stage1_pvalues.push_back(std::move(pvals));
        min_eff = std::min(min_eff, eff);
    }

    // Stage 2: increase r while the residual blocks X_i - J_i retain
    // significant joint structure; r is capped at min_i rank-eff(X_i).
    Eigen::Index r = 0;
    while (r < min_eff) {
        JiveRanks ranks;
        ranks.joint = r;
        for (Eigen::Index eff : sel.effective_ranks) {
            ranks.individual.push_back(std::max<Eigen::Index>(eff - r, 0));
        }
        JiveDecomposition d = estimate_jive(ds, ranks, cfg.fit_opts);

        // The refit statistic is invariant to a per-block orthogonal change
        // of variable basis, and column permutation commutes with it, so
        // tall residual blocks can be compressed to their n x n coordinate
        // form once per step instead of once per permutation replicate.
        std::vector<Matrix> residual;
        for (std::size_t i = 0; i < ds.n_blocks(); ++i) {
            Matrix res = ds.blocks[i].data - d.joint_blocks[i];
            if (res.rows() > res.cols()) {
                TruncatedSvd svd = truncated_svd(res, res.cols());
                res = svd.s.asDiagonal() * svd.vt;
            }
            residual.push_back(std::move(res));
        }
        double observed = joint_refit_stat(residual, ranks.individual, cfg.fit_opts);
        const std::uint64_t step_seed = derive_seed(cfg.seed, 0x200 + static_cast<std::uint64_t>(r));
        int count = count_at_least(cfg.n_perm, observed, [&](std::size_t t) {
            std::vector<Matrix> permuted = permute_columns_each(residual, derive_seed(step_seed, t));
            return joint_refit_stat(permuted, ranks.individual, cfg.fit_opts);
        });
        double p = perm_pvalue(count, cfg.n_perm);
        sel.stage2_pvalues.push_back(p);
        if (p >= cfg.alpha) break;
        ++r;
    }

    sel.joint_rank = r;
    for (Eigen::Index eff : sel.effective_ranks) {
        sel.individual_ranks.push_back(std::max<Eigen::Index>(eff - r, 0));
    }
    return sel;
}

}  // namespace jive
