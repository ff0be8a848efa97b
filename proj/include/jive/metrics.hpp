#ifndef JIVE_METRICS_HPP
#define JIVE_METRICS_HPP

#include <cstdint>

#include "jive/sim.hpp"

namespace jive {

// Within-group sum of squares over total sum of squares (both across all
// rows, column means per group / overall). In [0, 1]; lower means the
// groups are better separated.
double swiss_score(const Matrix& m, const GroupLabels& groups);

// Label-permutation test of H0: the two matrices separate the groups
// equally well. Statistic is |SWISS(a) - SWISS(b)| under joint label
// permutation, with the add-one p-value form.
double swiss_permutation_test(const Matrix& a, const Matrix& b, const GroupLabels& groups,
                              int n_perm, std::uint64_t seed);

}  // namespace jive

#endif
