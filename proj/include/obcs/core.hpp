#ifndef OBCS_CORE_HPP
#define OBCS_CORE_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace obcs {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
// Column-major by default; the algorithms are column-oriented (A_i^T y, C_i^T r).
using Matrix = Eigen::MatrixXd;

// Ground-truth s-sparse vector with known support.
struct SparseSignal {
    Vector values;               // length n, zero off support
    std::vector<Index> support;  // sorted, size s
    Index n = 0;
    Index s = 0;
};

// A Gaussian measurement matrix together with the observed signs
// y = sign(A x_hat) and the seed the instance was generated from.
struct MeasurementEnsemble {
    Matrix A;   // m x n
    Vector y;   // entries exactly +1 or -1
    Index m = 0;
    Index n = 0;
    std::uint64_t seed = 0;
};

// The pivot reduction of the sign-consistency program to n-1 variables:
// C = diag(y) P, d = diag(y) q, with the j0-th coordinate eliminated.
struct ReducedProblem {
    Matrix C;                    // m x (n-1)
    Vector d;                    // length m
    Index j0 = 0;                // pivot column in the original matrix
    double c0 = 1.0;
    std::vector<Index> col_map;  // reduced column -> original column
    double pivot = 0.0;          // y^T A_{j0}
};

struct TraceEntry {
    Index index;      // chosen original-coordinate index; -1 when no atom is selected
    double residual;  // squared truncated residual after the update
};

// Output of a recovery run. final_residual is the loop-guard quantity
// ||(C z + d)_-||_2^2 for the greedy algorithms and the best Hamming
// mismatch count for BIHT.
struct RecoveryResult {
    Vector x_raw;                // pre-normalization lift, length n
    Vector x_unit;               // x_raw / ||x_raw||_2
    std::vector<Index> support;  // sorted
    Index iterations = 0;
    double final_residual = 0.0;
    std::vector<TraceEntry> per_iteration_trace;
    double wall_time = 0.0;      // seconds around the recovery computation
    bool converged = false;
};

// i.i.d. standard normal entries from a deterministic stream; the same
// (m, n, seed) always yields a bit-identical matrix. Entries are filled in
// column-major storage order.
Matrix generate_gaussian_matrix(Index m, Index n, std::uint64_t seed);

// Support drawn uniformly among size-s subsets of [n], nonzeros i.i.d.
// standard normal, optionally scaled to unit l2 norm.
SparseSignal generate_sparse_signal(Index n, Index s, std::uint64_t seed, bool normalize = true);

// Componentwise sign with sign(0) = +1, so y stays in {-1,+1}^m.
Vector sign_measure(const Vector& v);
double sign_measure_scalar(double v);

// Componentwise min(v, 0).
Vector sign_truncate(const Vector& v);

// Full random instance used by the generator CLI and the benchmark harness:
// signal seed = derive_seed(seed, 1), matrix seed = derive_seed(seed, 2).
struct Instance {
    SparseSignal signal;
    MeasurementEnsemble ensemble;
};
Instance make_instance(Index m, Index n, Index s, std::uint64_t seed);

// Indices with |x_i| > 1e-12 * ||x||_inf, sorted ascending.
std::vector<Index> support_of(const Vector& x);

}  // namespace obcs

#endif
