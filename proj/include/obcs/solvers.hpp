#ifndef OBCS_SOLVERS_HPP
#define OBCS_SOLVERS_HPP

#include <vector>

#include "obcs/core.hpp"

namespace obcs {

enum class ObjectiveKind { L2, L1 };

// One support-restricted inner problem: minimize ||(C_A z + d)_-|| over the
// active columns, in the squared l2 or the l1 sense. C and d are held by
// reference and must outlive this struct.
struct SubproblemSpec {
    const Matrix& C;
    const Vector& d;
    std::vector<Index> active_set;  // sorted, distinct, within [0, C.cols())
    ObjectiveKind kind = ObjectiveKind::L2;
};

struct SolverReport {
    Vector z;                     // full reduced length, exactly zero off active_set
    double objective_value = 0.0;
    Index iterations = 0;
    bool converged = false;
    double grad_norm_final = 0.0;
};

// ||min(C_A z + d, 0)||_2^2 and its gradient 2 C_A^T (C_A z + d)_-.
// z_active holds the active coordinates only, in active_set order.
double objective_l2(const Vector& z_active, const SubproblemSpec& spec);
Vector gradient_l2(const Vector& z_active, const SubproblemSpec& spec);

// ||min(C_A z + d, 0)||_1 and the subgradient C_A^T sign((C_A z + d)_-),
// with sign(0) = 0.
double objective_l1(const Vector& z_active, const SubproblemSpec& spec);
Vector subgradient_l1(const Vector& z_active, const SubproblemSpec& spec);

// Scale-aware default tolerances: gradient-norm for L2, objective for L1.
double default_l2_tol(const Vector& d);
double default_l1_tol(const Vector& d);
inline constexpr Index kDefaultSolverMaxIter = 2000;

// Two-point step size (Barzilai-Borwein) gradient method on the smooth
// squared-l2 objective. The first step uses Armijo backtracking from
// alpha = 1; later steps use alpha = s^T y / ||y||^2, falling back to
// backtracking whenever s^T y <= 0 or y = 0. Stops when ||grad||_2 <= tol
// or after max_iter steps. z_init must be supported on active_set.
SolverReport bb_minimize(const SubproblemSpec& spec, const Vector& z_init,
                         double tol, Index max_iter);

// Subgradient method for the l1 objective. Each step moves along the
// negative subgradient to the exact minimizer of the piecewise-linear
// objective on that ray; when the ray does not descend (a kink), it takes
// the Polyak step f / ||g||^2 toward the known optimum value 0 instead.
// Tracks and returns the best iterate. Stops when the best objective drops
// to tol, when it improves by less than 1e-12 over 20 iterations, or after
// max_iter steps.
SolverReport l1_minimize(const SubproblemSpec& spec, const Vector& z_init,
                         double tol, Index max_iter);

// Row-scale margin used when nudging an epsilon-feasible point strictly
// inside the cone; proportional to d so the pipeline stays c0-equivariant.
double interior_margin(const Vector& d);

// Move z (on the active columns only) so that every row of C_A z + d clears
// `margin`: rows below it are lifted onto 2 * margin by minimum-norm
// least-squares corrections, repeated until no row is low. Afterwards a
// fresh recomputation of the residual cannot flip any sign. Returns false,
// leaving z untouched, when the corrections fail to clear the rows.
bool push_to_interior(const SubproblemSpec& spec, Vector& z, double margin);

}  // namespace obcs

#endif
