#include "jive/metrics.hpp"

#include <cmath>
#include <map>

#include "jive/rng.hpp"

namespace jive {

double swiss_score(const Matrix& m, const GroupLabels& groups) {
    check_finite(m);
    if (static_cast<Eigen::Index>(groups.size()) != m.cols()) {
        throw InputError("label count does not match column count");
    }
    std::map<int, std::vector<Eigen::Index>> members;
    for (Eigen::Index j = 0; j < m.cols(); ++j) members[groups[j]].push_back(j);
    if (members.size() < 2) throw InputError("SWISS needs at least two groups");

    Vector grand = m.rowwise().mean();
    double within = 0.0, total = 0.0;
    for (const auto& [label, cols] : members) {
        Vector gmean = Vector::Zero(m.rows());
        for (Eigen::Index j : cols) gmean += m.col(j);
        gmean /= static_cast<double>(cols.size());
        for (Eigen::Index j : cols) {
            within += (m.col(j) - gmean).squaredNorm();
            total += (m.col(j) - grand).squaredNorm();
        }
    }
    if (total == 0.0) throw DegenerateError("zero total variability");
    return within / total;
}

double swiss_permutation_test(const Matrix& a, const Matrix& b, const GroupLabels& groups,
                              int n_perm, std::uint64_t seed) {
    if (a.cols() != b.cols()) throw InputError("matrices must share the sample axis");
    if (n_perm < 1) throw InputError("n_perm must be >= 1");
    const double observed = std::abs(swiss_score(a, groups) - swiss_score(b, groups));

    int count = 0;
    std::vector<std::size_t> perm;
    GroupLabels shuffled(groups.size());
    for (int t = 0; t < n_perm; ++t) {
        Rng rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
        random_permutation(rng, groups.size(), perm);
        for (std::size_t j = 0; j < groups.size(); ++j) shuffled[j] = groups[perm[j]];
        const double stat = std::abs(swiss_score(a, shuffled) - swiss_score(b, shuffled));
        if (stat >= observed) ++count;
    }
    return (1.0 + count) / (1.0 + n_perm);
}

}  // namespace jive
