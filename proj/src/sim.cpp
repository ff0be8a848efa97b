#include "jive/sim.hpp"

#include <cmath>
#include <string>

#include "jive/rng.hpp"

namespace jive {

void SimulationSpec::validate() const {
    if (n < 1) throw InputError("simulation needs n >= 1");
    if (p.empty()) throw InputError("simulation needs at least one block");
    if (ranks.individual.size() != p.size()) {
        throw InputError("one individual rank per block required");
    }
    if (noise_sigma < 0.0) throw InputError("noise sigma must be >= 0");
    if (ranks.joint < 0) throw InputError("joint rank must be >= 0");
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] < 1) throw InputError("block dimension must be >= 1");
        if (ranks.individual[i] < 0) throw InputError("individual rank must be >= 0");
        if (ranks.joint + ranks.individual[i] > std::min(p[i], n)) {
            throw InputError("block " + std::to_string(i) + ": r + r_i exceeds min(p_i, n)");
        }
    }
    if (!factor_distributions.empty() &&
        factor_distributions.size() != 1 + 3 * p.size()) {
        throw InputError("factor_distributions must have 1 + 3k entries (S, then U_i, W_i, S_i)");
    }
}

namespace {

Matrix draw_factor(Rng& rng, Eigen::Index rows, Eigen::Index cols, FactorDistribution dist) {
    Matrix m(rows, cols);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            switch (dist) {
                case FactorDistribution::Normal: m(i, j) = normal(rng); break;
                case FactorDistribution::Uniform: m(i, j) = uniform(rng); break;
                case FactorDistribution::Bernoulli: m(i, j) = (rng() & 1u) ? 1.0 : 0.0; break;
            }
        }
    }
    return m;
}

void center_rows_inplace(Matrix& m) {
    if (m.cols() == 0) return;
    Vector means = m.rowwise().mean();
    m.colwise() -= means;
}

}  // namespace

SimulationSpec random_model_spec(std::uint64_t seed, bool with_noise) {
    Rng rng = make_rng(derive_seed(seed, 0xA0));
    SimulationSpec spec;
    spec.seed = seed;
    spec.n = 10 + static_cast<Eigen::Index>(uniform_below(rng, 91));
    spec.p = {10 + static_cast<Eigen::Index>(uniform_below(rng, 91)),
              10 + static_cast<Eigen::Index>(uniform_below(rng, 91))};
    spec.ranks.joint = static_cast<Eigen::Index>(uniform_below(rng, 5));
    spec.ranks.individual = {static_cast<Eigen::Index>(uniform_below(rng, 5)),
                             static_cast<Eigen::Index>(uniform_below(rng, 5))};
    if (with_noise) {
        std::uniform_real_distribution<double> sigma(0.0, 2.0);
        spec.noise_sigma = sigma(rng);
    }
    spec.validate();
    return spec;
}

SimulationResult generate_random_model(const SimulationSpec& spec) {
    spec.validate();
    const std::size_t k = spec.p.size();
    Rng rng = make_rng(derive_seed(spec.seed, 0xB0));

    std::vector<FactorDistribution> dists = spec.factor_distributions;
    if (dists.empty()) {
        for (std::size_t i = 0; i < 1 + 3 * k; ++i) {
            dists.push_back(static_cast<FactorDistribution>(uniform_below(rng, 3)));
        }
    }

    SimulationResult res;
    res.spec = spec;
    auto maybe_center = [&](Matrix& scores, FactorDistribution d) {
        if (spec.center_score_factors && d != FactorDistribution::Normal) {
            center_rows_inplace(scores);
        }
    };

    res.truth.joint_scores = draw_factor(rng, spec.ranks.joint, spec.n, dists[0]);
    maybe_center(res.truth.joint_scores, dists[0]);

    std::normal_distribution<double> noise(0.0, spec.noise_sigma);
    std::vector<Block> blocks;
    for (std::size_t i = 0; i < k; ++i) {
        const FactorDistribution du = dists[1 + 3 * i];
        const FactorDistribution dw = dists[2 + 3 * i];
        const FactorDistribution dsi = dists[3 + 3 * i];
        Matrix U = draw_factor(rng, spec.p[i], spec.ranks.joint, du);
        Matrix W = draw_factor(rng, spec.p[i], spec.ranks.individual[i], dw);
        Matrix Si = draw_factor(rng, spec.ranks.individual[i], spec.n, dsi);
        maybe_center(Si, dsi);

        Matrix J = U * res.truth.joint_scores;
        Matrix A = W * Si;
        Matrix E = Matrix::Zero(spec.p[i], spec.n);
        if (spec.noise_sigma > 0.0) {
            for (Eigen::Index a = 0; a < E.rows(); ++a) {
                for (Eigen::Index b = 0; b < E.cols(); ++b) E(a, b) = noise(rng);
            }
        }
        res.truth.joint_loadings.push_back(std::move(U));
        res.truth.individual_loadings.push_back(std::move(W));
        res.truth.individual_scores.push_back(std::move(Si));
        res.truth.joint_blocks.push_back(J);
        res.truth.individual_blocks.push_back(A);
        res.truth.noise_blocks.push_back(E);

        Block b;
        b.name = "block" + std::to_string(i + 1);
        b.data = J + A + E;
        blocks.push_back(std::move(b));
    }
    res.dataset = make_dataset(std::move(blocks));
    return res;
}

ToySimulation generate_toy(std::uint64_t seed) {
    constexpr Eigen::Index p = 50, n = 100, n_groups = 5, group_size = 20;
    Rng rng = make_rng(derive_seed(seed, 0xC0));
    std::normal_distribution<double> normal(0.0, 1.0);

    ToySimulation toy;
    toy.joint_pattern = Vector(n);
    for (Eigen::Index j = 0; j < n; ++j) toy.joint_pattern(j) = normal(rng);

    auto make_groups = [&](GroupLabels& labels) {
        std::vector<std::size_t> perm;
        random_permutation(rng, static_cast<std::size_t>(n), perm);
        labels.assign(n, 0);
        for (Eigen::Index j = 0; j < n; ++j) {
            labels[perm[j]] = static_cast<int>(j / group_size);
        }
    };
    make_groups(toy.groups_x);
    make_groups(toy.groups_y);

    // Group g carries offset g - 2, i.e. -2, -1, 0, 1, 2.
    auto build_block = [&](const GroupLabels& groups, const std::string& name) {
        Matrix J = Matrix::Zero(p, n);
        for (Eigen::Index i = 0; i < p / 2; ++i) J.row(i) = toy.joint_pattern.transpose();
        Matrix A(p, n);
        for (Eigen::Index j = 0; j < n; ++j) {
            A.col(j).setConstant(static_cast<double>(groups[j] - 2));
        }
        Matrix E(p, n);
        for (Eigen::Index i = 0; i < p; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) E(i, j) = normal(rng);
        }
        toy.truth.joint_blocks.push_back(J);
        toy.truth.individual_blocks.push_back(A);
        toy.truth.noise_blocks.push_back(E);
        Block b;
        b.name = name;
        b.data = J + A + E;
        return b;
    };

    std::vector<Block> blocks;
    blocks.push_back(build_block(toy.groups_x, "X"));
    blocks.push_back(build_block(toy.groups_y, "Y"));
    toy.dataset = make_dataset(std::move(blocks));

    toy.truth.joint_scores = toy.joint_pattern.transpose();
    for (int b = 0; b < 2; ++b) {
        Matrix U = Matrix::Zero(p, 1);
        U.topRows(p / 2).setConstant(1.0);
        toy.truth.joint_loadings.push_back(U);
        toy.truth.individual_loadings.push_back(Matrix::Ones(p, 1));
        const GroupLabels& g = (b == 0) ? toy.groups_x : toy.groups_y;
        Matrix Si(1, n);
        for (Eigen::Index j = 0; j < n; ++j) Si(0, j) = static_cast<double>(g[j] - 2);
        toy.truth.individual_scores.push_back(Si);
    }
    return toy;
}

std::pair<MultiBlockDataset, GroupLabels>
plant_cluster_signal(const MultiBlockDataset& ds, double fraction, std::uint64_t seed) {
    validate_dataset(ds);
    if (fraction <= 0.0 || fraction > 1.0) throw InputError("fraction must be in (0, 1]");
    MultiBlockDataset out = permute_columns_per_block(ds, derive_seed(seed, 0xD0));
    const Eigen::Index n = out.n_samples();
    const Eigen::Index half = (n + 1) / 2;

    for (auto& block : out.blocks) {
        const Eigen::Index planted =
            static_cast<Eigen::Index>(std::ceil(fraction * static_cast<double>(block.data.rows())));
        for (Eigen::Index i = 0; i < planted; ++i) {
            const double mean = block.data.row(i).mean();
            const double sd = std::sqrt((block.data.row(i).array() - mean).square().mean());
            block.data.row(i).head(half).array() += sd;
            block.data.row(i).tail(n - half).array() -= sd;
        }
    }
    GroupLabels labels(n, 1);
    for (Eigen::Index j = 0; j < half; ++j) labels[j] = 0;
    return {std::move(out), std::move(labels)};
}

std::pair<Matrix, Matrix> consensus_pca(const MultiBlockDataset& ds, Eigen::Index r) {
    Matrix x = concatenate(ds);
    TruncatedSvd svd = truncated_svd(x, r);
    Matrix scores = svd.s.asDiagonal() * svd.vt;
    return {std::move(scores), svd.u};
}

}  // namespace jive
