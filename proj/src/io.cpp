#include "jive/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace jive {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find('\t', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

double parse_double(const std::string& cell, const std::string& path, std::size_t row,
                    std::size_t col) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
        throw InputError(path + ": row " + std::to_string(row) + ", column " +
                         std::to_string(col) + ": cannot parse '" + cell + "' as a number");
    }
    return v;
}

}  // namespace

LabeledMatrix read_matrix_tsv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    LabeledMatrix out;
    std::string line;
    if (!std::getline(in, line)) throw InputError(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> header = split_tabs(line);
    if (header.size() < 2) throw InputError(path + ": header must contain sample labels");
    out.name = header.front();
    out.col_labels.assign(header.begin() + 1, header.end());

    std::vector<std::vector<double>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells = split_tabs(line);
        if (cells.size() != header.size()) {
            throw InputError(path + ": row " + std::to_string(lineno) + " has " +
                             std::to_string(cells.size() - 1) + " values, expected " +
                             std::to_string(out.col_labels.size()));
        }
        out.row_labels.push_back(cells.front());
        std::vector<double> vals;
        vals.reserve(cells.size() - 1);
        for (std::size_t c = 1; c < cells.size(); ++c) {
            vals.push_back(parse_double(cells[c], path, lineno, c + 1));
        }
        rows.push_back(std::move(vals));
    }
    out.data.resize(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(out.col_labels.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            out.data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    check_finite(out.data, path.c_str());
    return out;
}

void write_matrix_tsv(const std::string& path, const std::string& corner, const Matrix& m,
                      const std::vector<std::string>& row_labels,
                      const std::vector<std::string>& col_labels) {
    if (static_cast<Eigen::Index>(row_labels.size()) != m.rows() ||
        static_cast<Eigen::Index>(col_labels.size()) != m.cols()) {
        throw InputError("label/dimension mismatch writing '" + path + "'");
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << corner;
    for (const auto& c : col_labels) out << '\t' << c;
    out << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out << row_labels[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < m.cols(); ++j) out << '\t' << format_double(m(i, j));
        out << '\n';
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

MultiBlockDataset read_dataset(const std::vector<std::pair<std::string, std::string>>& named_paths) {
    if (named_paths.empty()) throw InputError("no block files given");
    std::vector<Block> blocks;
    std::vector<std::string> sample_labels;
    std::string first_path;
    for (const auto& [name, path] : named_paths) {
        LabeledMatrix lm = read_matrix_tsv(path);
        if (blocks.empty()) {
            sample_labels = lm.col_labels;
            first_path = path;
        } else if (lm.col_labels != sample_labels) {
            throw InputError("sample labels in '" + path + "' do not match '" + first_path +
                             "' (" + std::to_string(lm.col_labels.size()) + " vs " +
                             std::to_string(sample_labels.size()) + " samples)");
        }
        Block b;
        b.name = name;
        b.data = std::move(lm.data);
        b.variable_labels = std::move(lm.row_labels);
        blocks.push_back(std::move(b));
    }
    return make_dataset(std::move(blocks), std::move(sample_labels));
}

void write_dataset(const std::string& dir, const MultiBlockDataset& ds) {
    std::filesystem::create_directories(dir);
    for (const auto& b : ds.blocks) {
        write_matrix_tsv(dir + "/" + b.name + ".tsv", b.name, b.data, b.variable_labels,
                         ds.sample_labels);
    }
}

GroupLabels read_group_labels(const std::string& path,
                              const std::vector<std::string>& sample_labels) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::map<std::string, std::string> by_sample;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells = split_tabs(line);
        if (cells.size() != 2) {
            throw InputError(path + ": line " + std::to_string(lineno) +
                             ": expected 'sample<TAB>group'");
        }
        by_sample[cells[0]] = cells[1];
    }
    GroupLabels groups;
    std::map<std::string, int> group_ids;
    for (const auto& s : sample_labels) {
        auto it = by_sample.find(s);
        if (it == by_sample.end()) {
            throw InputError(path + ": missing group label for sample '" + s + "'");
        }
        auto [gid, inserted] = group_ids.emplace(it->second, static_cast<int>(group_ids.size()));
        groups.push_back(gid->second);
    }
    return groups;
}

void write_group_labels(const std::string& path, const std::vector<std::string>& sample_labels,
                        const GroupLabels& groups) {
    if (sample_labels.size() != groups.size()) {
        throw InputError("label/group count mismatch writing '" + path + "'");
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    for (std::size_t j = 0; j < groups.size(); ++j) {
        out << sample_labels[j] << '\t' << groups[j] << '\n';
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace jive
