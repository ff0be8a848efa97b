#ifndef JIVE_SIM_HPP
#define JIVE_SIM_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "jive/multiblock.hpp"
#include "jive/core.hpp"

namespace jive {

using GroupLabels = std::vector<int>;

enum class FactorDistribution { Normal, Uniform, Bernoulli };

/// Generative parameters for the random factorized model. Factor matrices
/// are ordered S, then U_i, W_i, S_i per block; when factor_distributions
/// is empty each matrix gets an independent random choice among the three
/// distributions.
struct SimulationSpec {
    Eigen::Index n = 50;
    std::vector<Eigen::Index> p;
    JiveRanks ranks;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
    // Score matrices drawn from the location-shifted distributions
    // (uniform, bernoulli) are re-centered along the sample axis so the
    // planted structure survives row-centering.
    bool center_score_factors = true;
    std::vector<FactorDistribution> factor_distributions;

    void validate() const;
};

struct SimulationTruth {
    std::vector<Matrix> joint_blocks;
    std::vector<Matrix> individual_blocks;
    std::vector<Matrix> noise_blocks;
    Matrix joint_scores;                      // S
    std::vector<Matrix> joint_loadings;       // U_i
    std::vector<Matrix> individual_loadings;  // W_i
    std::vector<Matrix> individual_scores;    // S_i
};

struct SimulationResult {
    MultiBlockDataset dataset;
    SimulationTruth truth;
    SimulationSpec spec;
};

struct ToySimulation {
    MultiBlockDataset dataset;  // blocks "X" and "Y", each 50 x 100
    Vector joint_pattern;       // V, length 100
    GroupLabels groups_x;       // five groups of twenty, offsets -2..2
    GroupLabels groups_y;
    SimulationTruth truth;
};

// Uniform draw of model dimensions, ranks, distributions and noise level
// following the random-model protocol bounds (dims in [10, 100], ranks in
// [0, 4], sigma ~ Uniform(0, 2) when with_noise).
SimulationSpec random_model_spec(std::uint64_t seed, bool with_noise);

SimulationResult generate_random_model(const SimulationSpec& spec);

// Two 50 x 100 blocks: a shared standard-normal pattern V added to the
// first 25 rows of each, an independent five-group column offset pattern
// per block, and unit normal noise.
ToySimulation generate_toy(std::uint64_t seed);

// Per-block column permutation (removing cross-block association)
// followed by a planted two-cluster signal: +row-sd on the first half of
// the samples and -row-sd on the rest, applied to the first
// ceil(fraction * p_i) rows of each block.
std::pair<MultiBlockDataset, GroupLabels>
plant_cluster_signal(const MultiBlockDataset& ds, double fraction, std::uint64_t seed);

// PCA of the concatenated block-scaled matrix; the no-individual-structure
// baseline. Returns (scores r x n, loadings p x r).
std::pair<Matrix, Matrix> consensus_pca(const MultiBlockDataset& ds, Eigen::Index r);

}  // namespace jive

#endif
