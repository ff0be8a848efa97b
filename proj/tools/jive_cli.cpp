// Command-line front end: ingest tab-separated block matrices, run rank
// selection and (sparse) JIVE decomposition, and emit components, metrics
// and plot-ready tables.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "jive/core.hpp"
#include "jive/io.hpp"
#include "jive/metrics.hpp"
#include "jive/rank_select.hpp"
#include "jive/sim.hpp"
#include "jive/sparse.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

std::vector<std::pair<std::string, std::string>> parse_block_args(
    const std::vector<std::string>& specs) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& s : specs) {
        auto pos = s.find('=');
        if (pos == std::string::npos || pos == 0 || pos + 1 == s.size()) {
            throw jive::InputError("--block expects NAME=PATH, got '" + s + "'");
        }
        out.emplace_back(s.substr(0, pos), s.substr(pos + 1));
    }
    return out;
}

// "auto" or "r:r1,r2,...".
bool parse_ranks(const std::string& text, std::size_t k, jive::JiveRanks& ranks) {
    if (text == "auto") return false;
    auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw jive::InputError("--ranks expects 'auto' or 'r:r1,...,rk', got '" + text + "'");
    }
    auto parse_count = [&](const std::string& cell) {
        try {
            std::size_t used = 0;
            long v = std::stol(cell, &used);
            if (used != cell.size() || v < 0) throw std::invalid_argument(cell);
            return static_cast<Eigen::Index>(v);
        } catch (const std::exception&) {
            throw jive::InputError("invalid rank '" + cell + "' in '" + text + "'");
        }
    };
    ranks.joint = parse_count(text.substr(0, colon));
    ranks.individual.clear();
    std::string rest = text.substr(colon + 1);
    std::size_t start = 0;
    while (start <= rest.size()) {
        auto comma = rest.find(',', start);
        std::string cell =
            (comma == std::string::npos) ? rest.substr(start) : rest.substr(start, comma - start);
        ranks.individual.push_back(parse_count(cell));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (ranks.individual.size() != k) {
        throw jive::InputError("--ranks lists " + std::to_string(ranks.individual.size()) +
                               " individual ranks for " + std::to_string(k) + " blocks");
    }
    return true;
}

jive::SparsityConfig parse_sparse(const std::string& text, std::size_t k) {
    jive::SparsityConfig cfg;
    if (text == "bic") {
        cfg.joint_weight = jive::PenaltyWeight::bic();
        cfg.individual_weights.assign(k, jive::PenaltyWeight::bic());
        return cfg;
    }
    std::vector<double> vals;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto comma = text.find(',', start);
        std::string cell =
            (comma == std::string::npos) ? text.substr(start) : text.substr(start, comma - start);
        try {
            std::size_t used = 0;
            vals.push_back(std::stod(cell, &used));
            if (used != cell.size()) throw std::invalid_argument(cell);
        } catch (const std::exception&) {
            throw jive::InputError("invalid sparsity weight '" + cell + "'");
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (vals.size() != k + 1) {
        throw jive::InputError("--sparse expects 'bic' or k+1 weights (joint, then one per block)");
    }
    cfg.joint_weight = jive::PenaltyWeight::fixed(vals[0]);
    for (std::size_t i = 0; i < k; ++i) {
        cfg.individual_weights.push_back(jive::PenaltyWeight::fixed(vals[i + 1]));
    }
    return cfg;
}

std::vector<std::string> component_labels(const std::string& prefix, Eigen::Index r) {
    std::vector<std::string> out;
    for (Eigen::Index j = 0; j < r; ++j) out.push_back(prefix + std::to_string(j + 1));
    return out;
}

std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

struct CommonOpts {
    std::vector<std::string> block_specs;
    int n_perm = 1000;
    double alpha = 0.01;
    std::uint64_t seed = 0;
    bool no_center = false;
    bool no_scale = false;
};

jive::MultiBlockDataset load_preprocessed(const CommonOpts& opts) {
    auto ds = jive::read_dataset(parse_block_args(opts.block_specs));
    if (!opts.no_center) ds = jive::center_rows(ds);
    if (!opts.no_scale) ds = jive::scale_blocks(ds);
    return ds;
}

json rank_selection_json(const jive::RankSelection& sel) {
    json j;
    j["joint_rank"] = sel.joint_rank;
    j["individual_ranks"] = sel.individual_ranks;
    j["effective_ranks"] = sel.effective_ranks;
    j["stage1_pvalues"] = sel.stage1_pvalues;
    j["stage2_pvalues"] = sel.stage2_pvalues;
    j["n_perm"] = sel.config.n_perm;
    j["alpha"] = sel.config.alpha;
    j["seed"] = sel.config.seed;
    return j;
}

int cmd_decompose(const CommonOpts& common, const std::string& ranks_text,
                  const std::string& sparse_text, const std::string& out_dir, int max_iter,
                  double tol) {
    auto ds = load_preprocessed(common);
    const std::size_t k = ds.n_blocks();

    jive::JiveRanks ranks;
    json rank_report;
    bool explicit_ranks = parse_ranks(ranks_text, k, ranks);
    if (!explicit_ranks) {
        if (common.n_perm < 1) throw jive::InputError("--ranks auto requires --n-perm >= 1");
        jive::RankSelectConfig cfg;
        cfg.n_perm = common.n_perm;
        cfg.alpha = common.alpha;
        cfg.seed = common.seed;
        jive::RankSelection sel = jive::select_ranks(ds, cfg);
        ranks = sel.ranks();
        rank_report = rank_selection_json(sel);
    }

    jive::JiveOptions opts;
    opts.max_iter = max_iter;
    opts.tol = tol;

    jive::JiveDecomposition d;
    bool sparse = !sparse_text.empty();
    if (sparse) {
        d = jive::estimate_sparse_jive(ds, ranks, parse_sparse(sparse_text, k), opts);
    } else {
        d = jive::estimate_jive(ds, ranks, opts);
    }

    fs::create_directories(out_dir);
    auto comp_j = component_labels("joint", ranks.joint);
    jive::write_matrix_tsv(out_dir + "/joint_scores.tsv", "component", d.joint_scores, comp_j,
                           ds.sample_labels);
    for (std::size_t i = 0; i < k; ++i) {
        const auto& b = ds.blocks[i];
        auto comp_i = component_labels("indiv", ranks.individual[i]);
        jive::write_matrix_tsv(out_dir + "/" + b.name + "_joint.tsv", b.name, d.joint_blocks[i],
                               b.variable_labels, ds.sample_labels);
        jive::write_matrix_tsv(out_dir + "/" + b.name + "_individual.tsv", b.name,
                               d.individual_blocks[i], b.variable_labels, ds.sample_labels);
        jive::write_matrix_tsv(out_dir + "/" + b.name + "_residual.tsv", b.name,
                               d.residual_blocks[i], b.variable_labels, ds.sample_labels);
        jive::write_matrix_tsv(out_dir + "/" + b.name + "_joint_loadings.tsv", b.name,
                               d.joint_loadings[i], b.variable_labels, comp_j);
        jive::write_matrix_tsv(out_dir + "/" + b.name + "_individual_loadings.tsv", b.name,
                               d.individual_loadings[i], b.variable_labels, comp_i);
        jive::write_matrix_tsv(out_dir + "/" + b.name + "_individual_scores.tsv", "component",
                               d.individual_scores[i], comp_i, ds.sample_labels);
    }

    json manifest;
    manifest["format_version"] = jive::kFormatVersion;
    manifest["command"] = "decompose";
    manifest["blocks"] = json::array();
    for (const auto& spec : common.block_specs) manifest["blocks"].push_back(spec);
    manifest["preprocessing"] = {{"row_centered", !common.no_center},
                                 {"block_scaled", !common.no_scale}};
    manifest["seed"] = common.seed;
    manifest["ranks"] = {{"joint", ranks.joint}, {"individual", ranks.individual}};
    manifest["ranks_mode"] = explicit_ranks ? "explicit" : "auto";
    if (!rank_report.is_null()) manifest["rank_selection"] = rank_report;
    manifest["sparse"] = sparse ? sparse_text : "";
    manifest["estimation"] = {{"max_iter", max_iter},
                              {"tol", tol},
                              {"iterations", d.iterations},
                              {"converged", d.converged},
                              {"residual_trace", d.residual_trace}};
    manifest["warnings"] = d.warnings;
    json var = json::array();
    for (const auto& v : jive::variation_explained(ds, d)) {
        var.push_back({{"block", v.block},
                       {"joint_pct", v.joint_pct},
                       {"individual_pct", v.individual_pct},
                       {"residual_pct", v.residual_pct}});
    }
    manifest["variation_explained"] = var;
    json scaling = json::array();
    for (const auto& b : ds.blocks) {
        scaling.push_back({{"block", b.name}, {"total_variation", b.total_variation}});
    }
    manifest["block_scaling"] = scaling;

    std::ofstream mf(out_dir + "/manifest.json");
    if (!mf) throw jive::IoError("cannot write manifest in '" + out_dir + "'");
    mf << manifest.dump(2) << '\n';

    if (!d.converged) {
        std::cerr << "warning: estimation did not converge within " << max_iter
                  << " iterations\n";
    }
    for (const auto& v : jive::variation_explained(ds, d)) {
        std::cout << v.block << "\tjoint " << fixed4(v.joint_pct) << "%\tindividual "
                  << fixed4(v.individual_pct) << "%\tresidual " << fixed4(v.residual_pct)
                  << "%\n";
    }
    return 0;
}

int cmd_ranks(const CommonOpts& common) {
    auto ds = load_preprocessed(common);
    jive::RankSelectConfig cfg;
    cfg.n_perm = common.n_perm;
    cfg.alpha = common.alpha;
    cfg.seed = common.seed;
    jive::RankSelection sel = jive::select_ranks(ds, cfg);

    std::cout << "alpha\t" << fixed4(cfg.alpha) << "\nn_perm\t" << cfg.n_perm << "\nseed\t"
              << cfg.seed << "\n";
    for (std::size_t i = 0; i < ds.n_blocks(); ++i) {
        std::cout << "effective_rank\t" << ds.blocks[i].name << "\t" << sel.effective_ranks[i]
                  << "\tp-values:";
        for (double p : sel.stage1_pvalues[i]) std::cout << " " << fixed4(p);
        std::cout << "\n";
    }
    std::cout << "joint_rank\t" << sel.joint_rank << "\tp-values:";
    for (double p : sel.stage2_pvalues) std::cout << " " << fixed4(p);
    std::cout << "\n";
    for (std::size_t i = 0; i < ds.n_blocks(); ++i) {
        std::cout << "individual_rank\t" << ds.blocks[i].name << "\t" << sel.individual_ranks[i]
                  << "\n";
    }
    return 0;
}

void write_truth(const std::string& dir, const jive::MultiBlockDataset& ds,
                 const jive::SimulationTruth& truth) {
    for (std::size_t i = 0; i < ds.n_blocks(); ++i) {
        const auto& b = ds.blocks[i];
        jive::write_matrix_tsv(dir + "/truth_" + b.name + "_joint.tsv", b.name,
                               truth.joint_blocks[i], b.variable_labels, ds.sample_labels);
        jive::write_matrix_tsv(dir + "/truth_" + b.name + "_individual.tsv", b.name,
                               truth.individual_blocks[i], b.variable_labels, ds.sample_labels);
        jive::write_matrix_tsv(dir + "/truth_" + b.name + "_noise.tsv", b.name,
                               truth.noise_blocks[i], b.variable_labels, ds.sample_labels);
    }
}

int cmd_simulate(const std::string& protocol, std::uint64_t seed, const std::string& out_dir,
                 Eigen::Index n, std::vector<Eigen::Index> p, const std::string& ranks_text,
                 double sigma, const std::vector<std::string>& block_specs, double fraction) {
    fs::create_directories(out_dir);
    json sidecar;
    sidecar["format_version"] = jive::kFormatVersion;
    sidecar["protocol"] = protocol;
    sidecar["seed"] = seed;

    if (protocol == "toy-3.1") {
        jive::ToySimulation toy = jive::generate_toy(seed);
        jive::write_dataset(out_dir, toy.dataset);
        write_truth(out_dir, toy.dataset, toy.truth);
        std::vector<std::string> vlab{"V"};
        jive::write_matrix_tsv(out_dir + "/joint_pattern.tsv", "pattern",
                               toy.joint_pattern.transpose(), vlab, toy.dataset.sample_labels);
        jive::write_group_labels(out_dir + "/groups_X.tsv", toy.dataset.sample_labels,
                                 toy.groups_x);
        jive::write_group_labels(out_dir + "/groups_Y.tsv", toy.dataset.sample_labels,
                                 toy.groups_y);
    } else if (protocol == "random-3.3") {
        jive::SimulationSpec spec;
        if (ranks_text.empty()) {
            spec = jive::random_model_spec(seed, sigma != 0.0);
        } else {
            spec.n = n;
            spec.p = std::move(p);
            if (spec.p.empty()) throw jive::InputError("random-3.3 needs --p per block");
            parse_ranks(ranks_text, spec.p.size(), spec.ranks);
            spec.noise_sigma = sigma;
            spec.seed = seed;
        }
        jive::SimulationResult res = jive::generate_random_model(spec);
        jive::write_dataset(out_dir, res.dataset);
        write_truth(out_dir, res.dataset, res.truth);
        sidecar["n"] = res.spec.n;
        sidecar["p"] = res.spec.p;
        sidecar["ranks"] = {{"joint", res.spec.ranks.joint},
                            {"individual", res.spec.ranks.individual}};
        sidecar["noise_sigma"] = res.spec.noise_sigma;
        sidecar["noiseless"] = (res.spec.noise_sigma == 0.0);
    } else if (protocol == "planted-3.2-style") {
        if (block_specs.empty()) {
            throw jive::InputError("planted-3.2-style needs --block inputs");
        }
        auto ds = jive::read_dataset(parse_block_args(block_specs));
        auto [planted, labels] = jive::plant_cluster_signal(ds, fraction, seed);
        jive::write_dataset(out_dir, planted);
        jive::write_group_labels(out_dir + "/groups.tsv", planted.sample_labels, labels);
        sidecar["fraction"] = fraction;
    } else {
        throw jive::InputError("unknown protocol '" + protocol + "'");
    }

    std::ofstream sf(out_dir + "/simulation.json");
    if (!sf) throw jive::IoError("cannot write sidecar in '" + out_dir + "'");
    sf << sidecar.dump(2) << '\n';
    return 0;
}

int cmd_swiss(const std::vector<std::string>& matrix_specs, const std::string& labels_path,
              int n_perm, std::uint64_t seed) {
    auto named = parse_block_args(matrix_specs);
    if (named.empty()) throw jive::InputError("no input matrices given");
    std::vector<jive::LabeledMatrix> mats;
    for (const auto& [name, path] : named) {
        mats.push_back(jive::read_matrix_tsv(path));
        mats.back().name = name;
    }
    for (std::size_t i = 1; i < mats.size(); ++i) {
        if (mats[i].col_labels != mats[0].col_labels) {
            throw jive::InputError("sample labels of '" + named[i].second +
                                   "' do not match '" + named[0].second + "'");
        }
    }
    jive::GroupLabels groups = jive::read_group_labels(labels_path, mats[0].col_labels);

    for (const auto& m : mats) {
        std::cout << m.name << "\t" << fixed4(jive::swiss_score(m.data, groups)) << "\n";
    }
    if (n_perm > 0) {
        for (std::size_t i = 0; i < mats.size(); ++i) {
            for (std::size_t j = i + 1; j < mats.size(); ++j) {
                double pv = jive::swiss_permutation_test(mats[i].data, mats[j].data, groups,
                                                         n_perm, seed);
                std::cout << mats[i].name << " vs " << mats[j].name << "\tp=" << fixed4(pv)
                          << "\n";
            }
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"JIVE: joint and individual variation explained for multi-block data"};
    app.require_subcommand(1);

    CommonOpts common;
    std::string ranks_text = "auto";
    std::string sparse_text;
    std::string out_dir;
    int max_iter = 500;
    double tol = 1e-8;

    auto add_common = [&](CLI::App* sub, bool with_perm = true) {
        sub->add_option("--block", common.block_specs, "Block as NAME=PATH (repeatable)")
            ->required();
        if (with_perm) {
            sub->add_option("--n-perm", common.n_perm, "Permutation replicates");
            sub->add_option("--alpha", common.alpha, "Significance level");
        }
        sub->add_option("--seed", common.seed, "RNG seed");
        sub->add_flag("--no-center", common.no_center, "Skip row centering");
        sub->add_flag("--no-scale", common.no_scale, "Skip block scaling");
    };

    CLI::App* dec = app.add_subcommand("decompose", "Estimate the JIVE decomposition");
    add_common(dec);
    dec->add_option("--ranks", ranks_text, "'auto' or 'r:r1,...,rk'");
    dec->add_option("--sparse", sparse_text, "'bic' or k+1 L1 weights (joint, then per block)");
    dec->add_option("--out", out_dir, "Output directory")->required();
    dec->add_option("--max-iter", max_iter, "Iteration cap");
    dec->add_option("--tol", tol, "Relative convergence tolerance on ||R||^2");

    CLI::App* rk = app.add_subcommand("ranks", "Permutation-based rank selection report");
    add_common(rk);

    CLI::App* sim = app.add_subcommand("simulate", "Generate simulation datasets");
    std::string protocol;
    std::uint64_t sim_seed = 0;
    Eigen::Index sim_n = 50;
    std::vector<Eigen::Index> sim_p;
    std::string sim_ranks;
    double sim_sigma = 0.0;
    std::vector<std::string> sim_blocks;
    double sim_fraction = 0.05;
    sim->add_option("--protocol", protocol, "toy-3.1 | random-3.3 | planted-3.2-style")
        ->required();
    sim->add_option("--seed", sim_seed, "RNG seed");
    sim->add_option("--out", out_dir, "Output directory")->required();
    sim->add_option("--n", sim_n, "Samples (random-3.3 with explicit ranks)");
    sim->add_option("--p", sim_p, "Rows per block (repeatable)");
    sim->add_option("--ranks", sim_ranks, "'r:r1,...,rk' (random-3.3; omit to draw at random)");
    sim->add_option("--sigma", sim_sigma, "Noise standard deviation");
    sim->add_option("--block", sim_blocks, "Input blocks for planted-3.2-style");
    sim->add_option("--fraction", sim_fraction, "Planted row fraction");

    CLI::App* sw = app.add_subcommand("swiss", "SWISS subtype-separation scores");
    std::vector<std::string> swiss_mats;
    std::string labels_path;
    int swiss_perm = 0;
    std::uint64_t swiss_seed = 0;
    sw->add_option("--matrix", swiss_mats, "Matrix as NAME=PATH (repeatable)")->required();
    sw->add_option("--labels", labels_path, "Group labels file")->required();
    sw->add_option("--n-perm", swiss_perm, "Permutations for pairwise tests (0 = skip)");
    sw->add_option("--seed", swiss_seed, "RNG seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (dec->parsed()) {
            return cmd_decompose(common, ranks_text, sparse_text, out_dir, max_iter, tol);
        }
        if (rk->parsed()) return cmd_ranks(common);
        if (sim->parsed()) {
            return cmd_simulate(protocol, sim_seed, out_dir, sim_n, sim_p, sim_ranks, sim_sigma,
                                sim_blocks, sim_fraction);
        }
        if (sw->parsed()) return cmd_swiss(swiss_mats, labels_path, swiss_perm, swiss_seed);
    } catch (const jive::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const jive::NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const jive::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return 0;
}
