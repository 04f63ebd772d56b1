#ifndef OBCS_REDUCTION_HPP
#define OBCS_REDUCTION_HPP

#include <vector>

#include "obcs/core.hpp"

namespace obcs {

// Verdict on whether x solves the one-bit problem: sign-consistency,
// sparsity count under the relative zero threshold, and the l1/linear
// normalization pair (for consistent x the two coincide).
struct SolutionCertificate {
    bool consistent = false;
    Index hamming_mismatches = 0;
    Index sparsity = 0;
    double l1_of_Ax = 0.0;
    double y_dot_Ax = 0.0;
    bool sparsity_ok = false;       // sparsity <= budget passed to certify_solution
    double normalization_gap = 0.0; // | ||Ax||_1 - c0 |
};

// Smallest index attaining max_i |A_i^T y|. Throws DegenerateMeasurementError
// when A^T y is identically zero.
Index select_first_index(const Matrix& A, const Vector& y);

// Indices of the k largest |A_i^T y|, descending magnitude, ties broken by
// ascending index. k = 1 agrees with select_first_index.
std::vector<Index> top_k_proxy_indices(const Matrix& A, const Vector& y, Index k);

// C = diag(y) (I - A_{j0} y^T / y^T A_{j0}) A_{[n]\{j0}}, d = (c0 / y^T A_{j0}) diag(y) A_{j0},
// computed column by column without the m x m outer product. Throws
// PivotDegenerateError when |y^T A_{j0}| <= 1e-12 * ||A_{j0}||_2 * sqrt(m).
ReducedProblem build_reduced_problem(const Matrix& A, const Vector& y, Index j0, double c0);

// Lift a reduced vector back to R^n: entries placed via col_map, the j0-th
// coordinate chosen so that y^T A x = c0 holds identically for any z.
Vector lift_solution(const Vector& z, const ReducedProblem& rp, const Matrix& A, const Vector& y);

SolutionCertificate certify_solution(const Vector& x, const Matrix& A, const Vector& y,
                                     Index s, double c0);

}  // namespace obcs

#endif
