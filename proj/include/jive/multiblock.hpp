#ifndef JIVE_MULTIBLOCK_HPP
#define JIVE_MULTIBLOCK_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "jive/linalg.hpp"

namespace jive {

/// One datatype: a p_i x n variable-by-sample matrix.
struct Block {
    std::string name;
    Matrix data;
    std::vector<std::string> variable_labels;
    // Frobenius norm before scaling; 0 until scale_blocks runs.
    double total_variation = 0.0;
};

/// k blocks sharing an ordered sample axis.
struct MultiBlockDataset {
    std::vector<Block> blocks;
    std::vector<std::string> sample_labels;
    bool row_centered = false;
    bool block_scaled = false;

    Eigen::Index n_samples() const {
        return blocks.empty() ? 0 : blocks.front().data.cols();
    }
    std::size_t n_blocks() const { return blocks.size(); }
};

// Builds a dataset from raw blocks, generating default labels where the
// caller supplies none. Validates column-count agreement, unique block
// names, label lengths, and finiteness.
MultiBlockDataset make_dataset(std::vector<Block> blocks,
                               std::vector<std::string> sample_labels = {});

void validate_dataset(const MultiBlockDataset& ds);

// Subtracts the mean of each row of each block. Idempotent.
MultiBlockDataset center_rows(const MultiBlockDataset& ds);

// Divides each block by its Frobenius norm, recording the norm in
// total_variation. Errors on any zero block.
MultiBlockDataset scale_blocks(const MultiBlockDataset& ds);

// Vertical stack of the blocks, (p1+...+pk) x n.
Matrix concatenate(const MultiBlockDataset& ds);

// Row offsets of each block inside the concatenated matrix.
std::vector<Eigen::Index> block_row_offsets(const MultiBlockDataset& ds);

// Splits a stacked matrix back into per-block pieces with the dataset's
// row counts.
std::vector<Matrix> split_rows(const Matrix& stacked, const MultiBlockDataset& ds);

// Independently permutes the entries within each row (rank-selection
// stage-1 null model).
Matrix permute_within_rows(const Matrix& m, std::uint64_t seed);

// Applies an independent uniform column permutation to each block,
// destroying cross-block sample alignment while preserving within-block
// structure (stage-2 null model).
MultiBlockDataset permute_columns_per_block(const MultiBlockDataset& ds, std::uint64_t seed);

// Same permutation scheme on a list of raw stacked-block pieces.
std::vector<Matrix> permute_columns_each(const std::vector<Matrix>& blocks, std::uint64_t seed);

}  // namespace jive

#endif
