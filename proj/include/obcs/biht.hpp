#ifndef OBCS_BIHT_HPP
#define OBCS_BIHT_HPP

#include "obcs/core.hpp"

namespace obcs {

struct BihtConfig {
    Index s = 1;
    double step_size = 0.0;  // <= 0 -> 1/m
    Index max_iter = 300;
    bool halt_on_consistency = true;
};

// Keep the s largest-magnitude entries (ties by smallest index), zero the rest.
Vector hard_threshold(const Vector& x, Index s);

// Binary iterative hard thresholding:
//   x <- hard_threshold_s(x + (tau/2) A^T (y - sign(Ax)))
// starting from hard_threshold_s(A^T y). Returns the iterate with the lowest
// Hamming mismatch count (ties broken by the later iteration), unit-normalized.
// Trace entries carry index -1 and the per-iteration mismatch count;
// final_residual is the returned iterate's mismatch count.
RecoveryResult run_biht(const Matrix& A, const Vector& y, const BihtConfig& cfg);

}  // namespace obcs

#endif
