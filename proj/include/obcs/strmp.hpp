#ifndef OBCS_STRMP_HPP
#define OBCS_STRMP_HPP

#include <vector>

#include "obcs/core.hpp"
#include "obcs/solvers.hpp"

namespace obcs {

enum class Variant { L2, L1 };

struct StrmpConfig {
    Index s = 1;                    // sparsity budget, counting the pivot atom
    double c0 = 1.0;
    double epsilon = 0.0;           // loop guard on ||(Cz+d)_-||_2^2; <= 0 -> 1e-12 * m * c0^2
    Variant variant = Variant::L2;
    Index atoms_per_iteration = 1;
    double solver_tol = 0.0;        // <= 0 -> scale-aware default for the variant
    Index solver_max_iter = kDefaultSolverMaxIter;
};

// Greedy proxy: C^T (Cz+d)_- for L2, C^T sign((Cz+d)_-) with sign(0)=0 for L1.
Vector match_step(const Vector& z, const ReducedProblem& rp, Variant variant);

// Up to k_atoms indices of largest |h_i| outside `forbidden`, descending
// magnitude, ties by smallest index. Entries with h_i = 0 are never selected;
// an empty return signals stagnation.
std::vector<Index> identify_step(const Vector& h, const std::vector<Index>& forbidden,
                                 Index k_atoms);

// The full match/identify/update loop: pivot selection, pivot reduction,
// greedy support growth with warm-started inner solves, lift, normalize.
RecoveryResult run_strmp(const Matrix& A, const Vector& y, const StrmpConfig& cfg);

double default_epsilon(Index m, double c0);

}  // namespace obcs

#endif
