#ifndef OBCS_ORACLE_HPP
#define OBCS_ORACLE_HPP

#include <cstdint>
#include <vector>

#include "obcs/core.hpp"

namespace obcs {

// Result of the exhaustive minimum-sparsity search. all_minimal_supports
// lists every feasible support of size min_sparsity in lexicographic order;
// best_support is its first element and best_x the corresponding lift.
struct OracleResult {
    std::vector<Index> best_support;
    Vector best_x;
    Index min_sparsity = 0;
    bool feasible = false;
    std::vector<std::vector<Index>> all_minimal_supports;
};

// Enumerates supports of size 1..s_max, lexicographic within each size. A
// support counts as feasible when, anchored at some pivot inside it, the
// inner minimization drives ||(Cz+d)_-||_2^2 below 1e-10 and the lifted x
// certifies sign-consistent. Test-scale only: refuses n > 25 or s_max > 3.
OracleResult brute_force_l0(const Matrix& A, const Vector& y, Index s_max, double c0);

// Mean of a_j * sign(a^T x_true) over `trials` rows a ~ N(0, I). Only the
// coordinates in supp(x_true) ∪ {j} are drawn, in ascending index order.
double monte_carlo_expectation(const SparseSignal& x_true, Index j, Index trials,
                               std::uint64_t seed);

}  // namespace obcs

#endif
