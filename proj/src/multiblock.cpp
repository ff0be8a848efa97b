#include "jive/multiblock.hpp"

#include <set>
#include <string>

#include "jive/rng.hpp"

namespace jive {

MultiBlockDataset make_dataset(std::vector<Block> blocks,
                               std::vector<std::string> sample_labels) {
    MultiBlockDataset ds;
    ds.blocks = std::move(blocks);
    if (ds.blocks.empty()) throw InputError("dataset needs at least one block");
    const Eigen::Index n = ds.blocks.front().data.cols();
    if (sample_labels.empty()) {
        for (Eigen::Index j = 0; j < n; ++j) {
            sample_labels.push_back("s" + std::to_string(j + 1));
        }
    }
    ds.sample_labels = std::move(sample_labels);
    for (auto& b : ds.blocks) {
        if (b.variable_labels.empty()) {
            for (Eigen::Index i = 0; i < b.data.rows(); ++i) {
                b.variable_labels.push_back(b.name + "_v" + std::to_string(i + 1));
            }
        }
    }
    validate_dataset(ds);
    return ds;
}

void validate_dataset(const MultiBlockDataset& ds) {
    if (ds.blocks.empty()) throw InputError("dataset needs at least one block");
    const Eigen::Index n = ds.blocks.front().data.cols();
    if (static_cast<Eigen::Index>(ds.sample_labels.size()) != n) {
        throw InputError("sample label count " + std::to_string(ds.sample_labels.size()) +
                         " does not match column count " + std::to_string(n));
    }
    std::set<std::string> names;
    for (const auto& b : ds.blocks) {
        if (!names.insert(b.name).second) {
            throw InputError("duplicate block name '" + b.name + "'");
        }
        if (b.data.cols() != n) {
            throw InputError("block '" + b.name + "' has " + std::to_string(b.data.cols()) +
                             " columns, expected " + std::to_string(n));
        }
        if (static_cast<Eigen::Index>(b.variable_labels.size()) != b.data.rows()) {
            throw InputError("block '" + b.name + "' variable label count mismatch");
        }
        check_finite(b.data, b.name.c_str());
    }
}

MultiBlockDataset center_rows(const MultiBlockDataset& ds) {
    validate_dataset(ds);
    if (ds.n_samples() < 1) throw InputError("cannot center an empty dataset");
    MultiBlockDataset out = ds;
    for (auto& b : out.blocks) {
        Vector means = b.data.rowwise().mean();
        b.data.colwise() -= means;
    }
    out.row_centered = true;
    return out;
}

MultiBlockDataset scale_blocks(const MultiBlockDataset& ds) {
    validate_dataset(ds);
    MultiBlockDataset out = ds;
    for (auto& b : out.blocks) {
        double norm = b.data.norm();
        if (norm == 0.0) {
            throw DegenerateError("block '" + b.name + "' has zero Frobenius norm");
        }
        b.data /= norm;
        // Keep the first pre-scaling norm across repeated calls.
        b.total_variation = (b.total_variation > 0.0) ? b.total_variation * norm : norm;
    }
    out.block_scaled = true;
    return out;
}

Matrix concatenate(const MultiBlockDataset& ds) {
    validate_dataset(ds);
    Eigen::Index p = 0;
    for (const auto& b : ds.blocks) p += b.data.rows();
    Matrix out(p, ds.n_samples());
    Eigen::Index row = 0;
    for (const auto& b : ds.blocks) {
        out.middleRows(row, b.data.rows()) = b.data;
        row += b.data.rows();
    }
    return out;
}

std::vector<Eigen::Index> block_row_offsets(const MultiBlockDataset& ds) {
    std::vector<Eigen::Index> offsets;
    Eigen::Index row = 0;
    for (const auto& b : ds.blocks) {
        offsets.push_back(row);
        row += b.data.rows();
    }
    return offsets;
}

std::vector<Matrix> split_rows(const Matrix& stacked, const MultiBlockDataset& ds) {
    std::vector<Matrix> pieces;
    Eigen::Index row = 0;
    for (const auto& b : ds.blocks) {
        pieces.push_back(stacked.middleRows(row, b.data.rows()));
        row += b.data.rows();
    }
    if (row != stacked.rows()) throw InputError("stacked matrix row count mismatch");
    return pieces;
}

Matrix permute_within_rows(const Matrix& m, std::uint64_t seed) {
    check_finite(m);
    Matrix out(m.rows(), m.cols());
    std::vector<std::size_t> perm;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Rng rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
        random_permutation(rng, static_cast<std::size_t>(m.cols()), perm);
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            out(i, j) = m(i, static_cast<Eigen::Index>(perm[j]));
        }
    }
    return out;
}

std::vector<Matrix> permute_columns_each(const std::vector<Matrix>& blocks, std::uint64_t seed) {
    std::vector<Matrix> out;
    out.reserve(blocks.size());
    std::vector<std::size_t> perm;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const Matrix& b = blocks[i];
        check_finite(b);
        Rng rng = make_rng(derive_seed(seed, i));
        random_permutation(rng, static_cast<std::size_t>(b.cols()), perm);
        Matrix p(b.rows(), b.cols());
        for (Eigen::Index j = 0; j < b.cols(); ++j) {
            p.col(j) = b.col(static_cast<Eigen::Index>(perm[j]));
        }
        out.push_back(std::move(p));
    }
    return out;
}

MultiBlockDataset permute_columns_per_block(const MultiBlockDataset& ds, std::uint64_t seed) {
    validate_dataset(ds);
    MultiBlockDataset out = ds;
    std::vector<Matrix> raw;
    for (const auto& b : ds.blocks) raw.push_back(b.data);
    std::vector<Matrix> permuted = permute_columns_each(raw, seed);
    for (std::size_t i = 0; i < out.blocks.size(); ++i) {
        out.blocks[i].data = std::move(permuted[i]);
    }
    return out;
}

}  // namespace jive
