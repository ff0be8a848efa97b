#ifndef JIVE_IO_HPP
#define JIVE_IO_HPP

#include <string>
#include <vector>

#include "jive/multiblock.hpp"
#include "jive/sim.hpp"

namespace jive {

// Delimited text format: tab-separated, first row holds sample labels
// (after a corner cell), first column holds variable labels. Matrix files
// round-trip at full double precision.
inline constexpr const char* kFormatVersion = "jive-tsv-1";

struct LabeledMatrix {
    std::string name;
    Matrix data;
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
};

LabeledMatrix read_matrix_tsv(const std::string& path);

void write_matrix_tsv(const std::string& path, const std::string& corner, const Matrix& m,
                      const std::vector<std::string>& row_labels,
                      const std::vector<std::string>& col_labels);

// One block file per entry of `named_paths` (name=path). Validates shared
// sample labels across files; diagnostics name the offending files.
MultiBlockDataset read_dataset(const std::vector<std::pair<std::string, std::string>>& named_paths);

void write_dataset(const std::string& dir, const MultiBlockDataset& ds);

// Group labels: one "sample<TAB>group" line per sample, in dataset order.
GroupLabels read_group_labels(const std::string& path,
                              const std::vector<std::string>& sample_labels);

void write_group_labels(const std::string& path, const std::vector<std::string>& sample_labels,
                        const GroupLabels& groups);

std::string format_double(double v);  // full round-trip precision

}  // namespace jive

#endif
