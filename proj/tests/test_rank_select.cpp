#include <doctest.h>

#include <random>

#include "jive/rank_select.hpp"
#include "jive/sim.hpp"

using namespace jive;

namespace {

Matrix gaussian(Eigen::Index rows, Eigen::Index cols, unsigned seed, double sigma = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, sigma);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
    }
    return m;
}

}  // namespace

TEST_SUITE("rank_select") {

TEST_CASE("white noise has effective rank zero most of the time") {
    int zeros = 0;
    for (unsigned seed = 0; seed < 20; ++seed) {
        Matrix m = gaussian(50, 40, 100 + seed);
        auto [rank, pvals] = effective_rank(m, 100, 0.01, seed);
        if (rank == 0) ++zeros;
    }
    CHECK(zeros >= 18);
}

TEST_CASE("strong planted rank-1 signal is detected") {
    for (unsigned seed = 0; seed < 5; ++seed) {
        Matrix signal = gaussian(40, 30, 200 + seed) .col(0) * gaussian(1, 30, 300 + seed);
        Matrix m = 5.0 * signal + gaussian(40, 30, 400 + seed, 0.2);
        auto [rank, pvals] = effective_rank(m, 100, 0.01, seed);
        CHECK(rank == 1);
        REQUIRE(pvals.size() >= 1);
        CHECK(pvals.front() < 0.01);
    }
}

TEST_CASE("constant rows give effective rank zero") {
    Matrix m = Matrix::Zero(10, 15);
    auto [rank, pvals] = effective_rank(m, 50, 0.01, 1);
    CHECK(rank == 0);
}

TEST_CASE("p-values stay in range and runs are deterministic") {
    Matrix m = gaussian(20, 25, 7) + 3.0 * gaussian(20, 1, 8) * gaussian(1, 25, 9);
    auto a = effective_rank(m, 200, 0.05, 99);
    auto b = effective_rank(m, 200, 0.05, 99);
    CHECK(a.first == b.first);
    CHECK(a.second == b.second);
    for (double p : a.second) {
        CHECK(p > 0.0);
        CHECK(p <= 1.0);
    }
}

TEST_CASE("deflation exposes the next singular value") {
    Matrix m = gaussian(15, 20, 11);
    TruncatedSvd lead = truncated_svd(m, 1);
    Matrix deflated = m - lead.u * lead.s.asDiagonal() * lead.vt;
    Vector before = singular_values(m);
    Vector after = singular_values(deflated);
    CHECK(after(0) == doctest::Approx(before(1)).epsilon(1e-8));
}

TEST_CASE("independent-column blocks select joint rank zero") {
    int zero_joint = 0;
    for (unsigned seed = 0; seed < 20; ++seed) {
        // Strong per-block structure, no cross-block association.
        Block a, b;
        a.name = "a";
        a.data = 4.0 * gaussian(30, 1, 500 + seed) * gaussian(1, 25, 520 + seed) +
                 gaussian(30, 25, 540 + seed, 0.3);
        b.name = "b";
        b.data = 4.0 * gaussian(28, 1, 560 + seed) * gaussian(1, 25, 580 + seed) +
                 gaussian(28, 25, 600 + seed, 0.3);
        auto ds = scale_blocks(center_rows(make_dataset({a, b})));
        RankSelectConfig cfg;
        cfg.n_perm = 100;
        cfg.alpha = 0.01;
        cfg.seed = seed;
        RankSelection sel = select_ranks(ds, cfg);
        if (sel.joint_rank == 0) ++zero_joint;
        CHECK(sel.joint_rank <= std::min(sel.effective_ranks[0], sel.effective_ranks[1]));
        for (std::size_t i = 0; i < 2; ++i) {
            if (sel.effective_ranks[i] >= sel.joint_rank) {
                CHECK(sel.joint_rank + sel.individual_ranks[i] == sel.effective_ranks[i]);
            } else {
                CHECK(sel.individual_ranks[i] == 0);
            }
        }
    }
    CHECK(zero_joint >= 18);
}

TEST_CASE("toy data selects ranks (1, 1, 1)") {
    ToySimulation toy = generate_toy(42);
    auto ds = scale_blocks(center_rows(toy.dataset));
    RankSelectConfig cfg;
    cfg.n_perm = 100;
    cfg.alpha = 0.01;
    cfg.seed = 4242;
    RankSelection sel = select_ranks(ds, cfg);
    CHECK(sel.joint_rank == 1);
    CHECK(sel.individual_ranks[0] == 1);
    CHECK(sel.individual_ranks[1] == 1);
}

TEST_CASE("full selection is deterministic in the seed") {
    ToySimulation toy = generate_toy(8);
    auto ds = scale_blocks(center_rows(toy.dataset));
    RankSelectConfig cfg;
    cfg.n_perm = 50;
    cfg.alpha = 0.05;
    cfg.seed = 31;
    RankSelection a = select_ranks(ds, cfg);
    RankSelection b = select_ranks(ds, cfg);
    CHECK(a.joint_rank == b.joint_rank);
    CHECK(a.effective_ranks == b.effective_ranks);
    CHECK(a.stage1_pvalues == b.stage1_pvalues);
    CHECK(a.stage2_pvalues == b.stage2_pvalues);
}

TEST_CASE("invalid configuration rejected") {
    Matrix m = gaussian(5, 5, 1);
    CHECK_THROWS_AS(effective_rank(m, 0, 0.01, 1), InputError);
    CHECK_THROWS_AS(effective_rank(m, 10, 1.5, 1), InputError);
}

}  // TEST_SUITE
