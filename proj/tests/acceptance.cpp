// End-to-end acceptance checks for the library: recovery, convergence,
// orthogonality, rank selection, sparsity and cluster-separation behavior,
// each reported as a single pass/fail line.

#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "jive/core.hpp"
#include "jive/metrics.hpp"
#include "jive/rank_select.hpp"
#include "jive/rng.hpp"
#include "jive/sim.hpp"
#include "jive/sparse.hpp"

using namespace jive;

namespace {

int g_failures = 0;

void report(int index, const std::string& name, bool pass, const std::string& detail) {
    std::printf("%2d. %-38s %s  (%s)\n", index, name.c_str(), pass ? "PASS" : "FAIL",
                detail.c_str());
    if (!pass) ++g_failures;
}

// Accumulators applied to every decomposition produced by this suite.
struct RunAudit {
    long runs = 0;
    long trace_violations = 0;
    long orthogonality_violations = 0;
    long closure_violations = 0;
    double worst_orth = 0.0;
    double worst_closure_gap = 0.0;

    void track(const MultiBlockDataset& ds, const JiveDecomposition& d) {
        ++runs;
        const double slack = 1e-12 * std::max(1.0, d.residual_trace.empty()
                                                       ? 1.0
                                                       : d.residual_trace.front());
        for (std::size_t i = 1; i < d.residual_trace.size(); ++i) {
            if (d.residual_trace[i] > d.residual_trace[i - 1] + slack) ++trace_violations;
        }
        Matrix j = d.joint_stacked();
        Matrix a = d.individual_stacked();
        const double orth = (j * a.transpose()).cwiseAbs().maxCoeff();
        worst_orth = std::max(worst_orth, orth);
        if (orth >= 1e-8) ++orthogonality_violations;
        for (const auto& v : variation_explained(ds, d)) {
            const double total = v.joint_pct + v.individual_pct + v.residual_pct;
            const double gap = std::abs(total - 100.0);
            worst_closure_gap = std::max(worst_closure_gap, gap);
            if (gap > 0.5) ++closure_violations;
        }
    }
};

RunAudit g_audit;

SimulationSpec raw_model_spec(std::uint64_t seed, bool with_noise) {
    SimulationSpec spec = random_model_spec(seed, with_noise);
    spec.center_score_factors = false;
    return spec;
}

// --- criterion 1: exact recovery of noiseless planted models ---

void check_noiseless_recovery() {
    int ok = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        SimulationSpec spec = raw_model_spec(seed, false);
        SimulationResult res = generate_random_model(spec);
        JiveDecomposition d = estimate_jive(res.dataset, spec.ranks);
        g_audit.track(res.dataset, d);
        const double r2 = d.residual_sq();
        worst = std::max(worst, r2);
        if (r2 < 1e-9) ++ok;
    }
    char detail[96];
    std::snprintf(detail, sizeof(detail), "%d/100 runs below 1e-9, worst ||R||^2 = %.2e", ok,
                  worst);
    report(1, "noiseless exact recovery", ok == 100, detail);
}

// --- criterion 4: tall-block shortcut equivalence ---

void check_reduction_shortcut() {
    int ok = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        SimulationSpec spec;
        spec.n = 25;
        spec.p = {120 + static_cast<Eigen::Index>(seed), 90};
        spec.ranks.joint = 1 + static_cast<Eigen::Index>(seed % 3);
        spec.ranks.individual = {1 + static_cast<Eigen::Index>(seed % 2), 2};
        spec.noise_sigma = 0.4;
        spec.seed = 900 + seed;
        spec.factor_distributions.assign(7, FactorDistribution::Normal);
        SimulationResult res = generate_random_model(spec);

        JiveDecomposition direct = estimate_jive(res.dataset, spec.ranks);
        JiveDecomposition reduced = reduce_then_estimate(res.dataset, spec.ranks);
        g_audit.track(res.dataset, direct);
        g_audit.track(res.dataset, reduced);

        double diff = 0.0;
        for (std::size_t i = 0; i < 2; ++i) {
            diff = std::max(diff,
                            (direct.joint_blocks[i] - reduced.joint_blocks[i]).cwiseAbs().maxCoeff());
            diff = std::max(
                diff,
                (direct.individual_blocks[i] - reduced.individual_blocks[i]).cwiseAbs().maxCoeff());
        }
        worst = std::max(worst, diff);
        if (diff < 1e-8 && direct.iterations == reduced.iterations) ++ok;
    }
    char detail[96];
    std::snprintf(detail, sizeof(detail), "%d/20 agree, worst entry gap %.2e", ok, worst);
    report(4, "tall-block shortcut equivalence", ok == 20, detail);
}

// --- criterion 5: rank recovery on noisy models ---

void check_rank_recovery() {
    int exact = 0;
    int overshoot = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        SimulationSpec spec = raw_model_spec(seed, true);
        SimulationResult res = generate_random_model(spec);
        RankSelectConfig cfg;
        cfg.n_perm = 100;
        cfg.alpha = 0.01;
        cfg.seed = seed;
        RankSelection sel = select_ranks(res.dataset, cfg);
        if (sel.joint_rank == spec.ranks.joint &&
            sel.individual_ranks[0] == spec.ranks.individual[0] &&
            sel.individual_ranks[1] == spec.ranks.individual[1]) {
            ++exact;
        }
        if (sel.joint_rank > spec.ranks.joint + 1 ||
            sel.individual_ranks[0] > spec.ranks.individual[0] + 1 ||
            sel.individual_ranks[1] > spec.ranks.individual[1] + 1) {
            ++overshoot;
        }
    }
    char detail[96];
    std::snprintf(detail, sizeof(detail), "exact in %d/100 (want 45-75), overshoot >1 in %d",
                  exact, overshoot);
    report(5, "rank recovery under noise", exact >= 45 && exact <= 75 && overshoot == 0, detail);
}

// --- criteria 6 and 7: two-block toy behavior ---

void check_toy_ranks_and_scores() {
    int rank_ok = 0;
    int score_ok = 0;
    auto corr = [](const Vector& a, const Vector& b) {
        Vector x = a.array() - a.mean();
        Vector y = b.array() - b.mean();
        return x.dot(y) / (x.norm() * y.norm());
    };
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        ToySimulation toy = generate_toy(seed);
        MultiBlockDataset ds = scale_blocks(center_rows(toy.dataset));

        RankSelectConfig cfg;
        cfg.n_perm = 100;
        cfg.alpha = 0.01;
        cfg.seed = 4000 + seed;
        RankSelection sel = select_ranks(ds, cfg);
        if (sel.joint_rank == 1 && sel.individual_ranks[0] == 1 && sel.individual_ranks[1] == 1) {
            ++rank_ok;
        }

        JiveRanks ranks;
        ranks.joint = 1;
        ranks.individual = {1, 1};
        JiveDecomposition d = estimate_jive(ds, ranks);
        g_audit.track(ds, d);
        const double c_jive = std::abs(corr(d.joint_scores.row(0).transpose(), toy.joint_pattern));
        auto [cp_scores, cp_loadings] = consensus_pca(ds, 1);
        const double c_pca = std::abs(corr(cp_scores.row(0).transpose(), toy.joint_pattern));
        if (c_jive > 0.9 && c_jive - c_pca >= 0.15) ++score_ok;
    }
    char d6[64], d7[64];
    std::snprintf(d6, sizeof(d6), "(1,1,1) selected in %d/20 (want >= 18)", rank_ok);
    std::snprintf(d7, sizeof(d7), "score-quality margin held in %d/20 (want >= 18)", score_ok);
    report(6, "toy-data rank selection", rank_ok >= 18, d6);
    report(7, "toy-data joint score quality", score_ok >= 18, d7);
}

// --- criterion 8: orthogonalization of equivalent splits ---

void check_orthogonalization() {
    int ok = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng rng = make_rng(derive_seed(seed, 0xAB));
        std::normal_distribution<double> normal(0.0, 1.0);
        auto randm = [&](Eigen::Index r, Eigen::Index c) {
            Matrix m(r, c);
            for (Eigen::Index i = 0; i < r; ++i)
                for (Eigen::Index j = 0; j < c; ++j) m(i, j) = normal(rng);
            return m;
        };

        const Eigen::Index n = 30;
        const Eigen::Index rj = 2, r1 = 2, r2 = 3;
        std::vector<Eigen::Index> p = {14, 11};
        Matrix sj = randm(rj, n);
        std::vector<Matrix> J = {randm(p[0], rj) * sj, randm(p[1], rj) * sj};
        std::vector<Matrix> A = {randm(p[0], r1) * randm(r1, n), randm(p[1], r2) * randm(r2, n)};

        auto [jo, ao] = orthogonalize(J, A);

        bool pass = true;
        Matrix js(p[0] + p[1], n), as(p[0] + p[1], n);
        js << jo[0], jo[1];
        as << ao[0], ao[1];
        if ((js * as.transpose()).cwiseAbs().maxCoeff() >= 1e-8) pass = false;
        Matrix j_in(p[0] + p[1], n);
        j_in << J[0], J[1];
        if (numerical_rank(js, 1e-8) != numerical_rank(j_in, 1e-8)) pass = false;
        for (std::size_t i = 0; i < 2; ++i) {
            if (((jo[i] + ao[i]) - (J[i] + A[i])).cwiseAbs().maxCoeff() >= 1e-12) pass = false;
            if (numerical_rank(ao[i], 1e-8) != numerical_rank(A[i], 1e-8)) pass = false;
        }

        // A second, equivalent split of the same totals: move an invertible
        // mixture of the individual parts into the joint row space.
        Matrix pj = row_space_projector(j_in);
        Matrix g = 0.4 * randm(n, n);
        Matrix mix = g * pj;
        mix *= 0.5 / std::max(0.5, mix.norm());
        std::vector<Matrix> J2 = {J[0] + A[0] * mix, J[1] + A[1] * mix};
        std::vector<Matrix> A2 = {A[0] * (Matrix::Identity(n, n) - mix),
                                  A[1] * (Matrix::Identity(n, n) - mix)};
        auto [jo2, ao2] = orthogonalize(J2, A2);
        for (std::size_t i = 0; i < 2; ++i) {
            if ((jo2[i] - jo[i]).cwiseAbs().maxCoeff() >= 1e-7) pass = false;
            if ((ao2[i] - ao[i]).cwiseAbs().maxCoeff() >= 1e-7) pass = false;
        }
        if (pass) ++ok;
    }
    char detail[64];
    std::snprintf(detail, sizeof(detail), "%d/50 constructions satisfied all properties", ok);
    report(8, "orthogonalized split uniqueness", ok == 50, detail);
}

// --- criterion 9: sparse reduction and shrinkage monotonicity ---

void check_sparse_behavior() {
    ToySimulation toy = generate_toy(7);
    MultiBlockDataset ds = scale_blocks(center_rows(toy.dataset));
    JiveRanks ranks;
    ranks.joint = 1;
    ranks.individual = {1, 1};

    JiveDecomposition dense = estimate_jive(ds, ranks);
    g_audit.track(ds, dense);
    SparsityConfig zero;
    zero.joint_weight = PenaltyWeight::fixed(0.0);
    zero.individual_weights.assign(2, PenaltyWeight::fixed(0.0));
    JiveDecomposition sparse0 = estimate_sparse_jive(ds, ranks, zero);
    g_audit.track(ds, sparse0);

    double diff = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
        diff = std::max(diff,
                        (dense.joint_blocks[i] - sparse0.joint_blocks[i]).cwiseAbs().maxCoeff());
        diff = std::max(
            diff, (dense.individual_blocks[i] - sparse0.individual_blocks[i]).cwiseAbs().maxCoeff());
    }

    bool monotone = true;
    int prev = std::numeric_limits<int>::max();
    for (int step = 0; step < 10; ++step) {
        SparsityConfig cfg;
        cfg.joint_weight = PenaltyWeight::fixed(0.004 * step);
        cfg.individual_weights.assign(2, PenaltyWeight::fixed(0.0));
        JiveDecomposition d = estimate_sparse_jive(ds, ranks, cfg);
        int nnz = 0;
        for (const auto& u : d.joint_loadings) {
            for (Eigen::Index i = 0; i < u.rows(); ++i) {
                if (u(i, 0) != 0.0) ++nnz;
            }
        }
        if (nnz > prev) monotone = false;
        prev = nnz;
    }
    char detail[96];
    std::snprintf(detail, sizeof(detail),
                  "unpenalized gap %.2e, nonzero count %s along the weight ladder", diff,
                  monotone ? "nonincreasing" : "NOT monotone");
    report(9, "sparse reduction and monotonicity", diff < 1e-8 && monotone, detail);
}

// --- criterion 10: subtype separation ordering ---

MultiBlockDataset subtype_dataset(std::uint64_t seed, GroupLabels& groups) {
    Rng rng = make_rng(derive_seed(seed, 0xF00));
    std::normal_distribution<double> normal(0.0, 1.0);
    const Eigen::Index n = 80;
    const std::vector<Eigen::Index> dims = {60, 50};
    groups.assign(static_cast<std::size_t>(n), 0);
    for (Eigen::Index j = n / 2; j < n; ++j) groups[static_cast<std::size_t>(j)] = 1;

    Vector s(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        s(j) = (groups[static_cast<std::size_t>(j)] ? 2.0 : -2.0) + 0.5 * normal(rng);
    }
    std::vector<Block> blocks;
    for (int b = 0; b < 2; ++b) {
        const Eigen::Index p = dims[static_cast<std::size_t>(b)];
        Vector u = Vector::Zero(p);
        for (int i = 0; i < 10; ++i) u(i) = normal(rng);
        Vector w(p), si(n);
        for (Eigen::Index i = 0; i < p; ++i) w(i) = normal(rng);
        for (Eigen::Index j = 0; j < n; ++j) si(j) = normal(rng);
        Matrix x = u * s.transpose() + w * si.transpose();
        for (Eigen::Index i = 0; i < p; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) x(i, j) += normal(rng);
        }
        Block blk;
        blk.name = b == 0 ? "A" : "B";
        blk.data = x;
        blocks.push_back(std::move(blk));
    }
    return make_dataset(std::move(blocks));
}

void check_subtype_separation() {
    int ok = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        GroupLabels groups;
        MultiBlockDataset ds = scale_blocks(center_rows(subtype_dataset(seed, groups)));
        JiveRanks ranks;
        ranks.joint = 1;
        ranks.individual = {1, 1};
        JiveDecomposition dense = estimate_jive(ds, ranks);
        g_audit.track(ds, dense);
        SparsityConfig cfg;
        cfg.joint_weight = PenaltyWeight::bic();
        cfg.individual_weights.assign(2, PenaltyWeight::bic());
        JiveDecomposition sparse = estimate_sparse_jive(ds, ranks, cfg);
        g_audit.track(ds, sparse);

        const double raw = swiss_score(concatenate(ds), groups);
        const double dense_joint = swiss_score(dense.joint_stacked(), groups);
        const double sparse_joint = swiss_score(sparse.joint_stacked(), groups);
        if (sparse_joint < dense_joint && dense_joint < raw) ++ok;
    }
    char detail[64];
    std::snprintf(detail, sizeof(detail), "ordering held in %d/20 (want >= 18)", ok);
    report(10, "subtype separation ordering", ok >= 18, detail);
}

}  // namespace

int main() {
    check_noiseless_recovery();
    check_reduction_shortcut();
    check_rank_recovery();
    check_toy_ranks_and_scores();
    check_orthogonalization();
    check_sparse_behavior();
    check_subtype_separation();

    char d2[96], d3[96], d11[96];
    std::snprintf(d2, sizeof(d2), "%ld violations across %ld tracked runs",
                  g_audit.trace_violations, g_audit.runs);
    std::snprintf(d3, sizeof(d3), "worst max|J A'| = %.2e across %ld runs", g_audit.worst_orth,
                  g_audit.runs);
    std::snprintf(d11, sizeof(d11), "worst |sum - 100| = %.3f%% across %ld runs",
                  g_audit.worst_closure_gap, g_audit.runs);
    report(2, "monotone residual traces", g_audit.trace_violations == 0, d2);
    report(3, "joint/individual orthogonality", g_audit.orthogonality_violations == 0, d3);
    report(11, "variation-explained closure", g_audit.closure_violations == 0, d11);

    std::printf("%s: %d criterion(s) failed\n", g_failures == 0 ? "ALL PASS" : "FAILURES",
                g_failures);
    return g_failures == 0 ? 0 : 1;
}
