#include "obcs/oracle.hpp"

#include <algorithm>
#include <optional>

#include "obcs/errors.hpp"
#include "obcs/reduction.hpp"
#include "obcs/rng.hpp"
#include "obcs/solvers.hpp"

namespace obcs {

namespace {

constexpr double kFeasibleResidual = 1e-10;
constexpr double kInnerTol = 1e-12;
constexpr Index kInnerMaxIter = 10000;

// Reductions are shared across every support containing the same pivot;
// a degenerate pivot is remembered as "unusable" instead of re-thrown.
class ReductionCache {
public:
    ReductionCache(const Matrix& A, const Vector& y, double c0)
        : A_(A), y_(y), c0_(c0), slots_(static_cast<std::size_t>(A.cols())) {}

    const ReducedProblem* at(Index j0) {
        auto& slot = slots_[static_cast<std::size_t>(j0)];
        if (!slot.attempted) {
            slot.attempted = true;
            try {
                slot.rp = build_reduced_problem(A_, y_, j0, c0_);
            } catch (const PivotDegenerateError&) {
            }
        }
        return slot.rp ? &*slot.rp : nullptr;
    }

private:
    struct Slot {
        bool attempted = false;
        std::optional<ReducedProblem> rp;
    };
    const Matrix& A_;
    const Vector& y_;
    double c0_;
    std::vector<Slot> slots_;
};

// Tries every pivot in `support`; returns the certified lift on success.
std::optional<Vector> feasible_on_support(const std::vector<Index>& support,
                                          ReductionCache& cache, const Matrix& A,
                                          const Vector& y, double c0) {
    for (Index j0 : support) {
        const ReducedProblem* rp = cache.at(j0);
        if (!rp) continue;
        SubproblemSpec spec{rp->C, rp->d, {}, ObjectiveKind::L2};
        for (Index l : support) {
            if (l != j0) spec.active_set.push_back(l < j0 ? l : l - 1);
        }
        const SolverReport rep =
            bb_minimize(spec, Vector::Zero(rp->C.cols()), kInnerTol, kInnerMaxIter);
        if (rep.objective_value >= kFeasibleResidual) continue;
        // Best effort nudge off the cone boundary so the fresh sign
        // recomputation in certify_solution cannot flip a zero-margin row;
        // the certificate below stays the arbiter either way.
        Vector z = rep.z;
        push_to_interior(spec, z, interior_margin(rp->d));
        Vector x = lift_solution(z, *rp, A, y);
        const auto cert =
            certify_solution(x, A, y, static_cast<Index>(support.size()), c0);
        if (cert.consistent) return x;
    }
    return std::nullopt;
}

// Lexicographic successor of a k-combination of [0, n); false when exhausted.
bool next_combination(std::vector<Index>& c, Index n) {
    const Index k = static_cast<Index>(c.size());
    for (Index i = k - 1; i >= 0; --i) {
        if (c[static_cast<std::size_t>(i)] < n - k + i) {
            ++c[static_cast<std::size_t>(i)];
            for (Index l = i + 1; l < k; ++l) {
                c[static_cast<std::size_t>(l)] = c[static_cast<std::size_t>(l - 1)] + 1;
            }
            return true;
        }
    }
    return false;
}

}  // namespace

OracleResult brute_force_l0(const Matrix& A, const Vector& y, Index s_max, double c0) {
    const Index n = A.cols();
    if (A.rows() != y.size()) throw DimensionError("brute_force_l0: dimensions disagree");
    if (s_max < 1) throw std::invalid_argument("brute_force_l0: s_max must be >= 1");
    if (!(c0 > 0.0)) throw std::invalid_argument("brute_force_l0: c0 must be positive");
    if (n > 25 || s_max > 3) {
        throw ConfigError("brute_force_l0: instance too large (need n <= 25, s_max <= 3)");
    }

    ReductionCache cache(A, y, c0);
    OracleResult result;
    result.best_x = Vector::Zero(n);

    for (Index k = 1; k <= std::min(s_max, n); ++k) {
        std::vector<Index> support(static_cast<std::size_t>(k));
        for (Index i = 0; i < k; ++i) support[static_cast<std::size_t>(i)] = i;
        do {
            auto x = feasible_on_support(support, cache, A, y, c0);
            if (!x) continue;
            if (!result.feasible) {
                result.feasible = true;
                result.min_sparsity = k;
                result.best_support = support;
                result.best_x = *x;
            }
            result.all_minimal_supports.push_back(support);
        } while (next_combination(support, n));
        if (result.feasible) break;
    }
    return result;
}

double monte_carlo_expectation(const SparseSignal& x_true, Index j, Index trials,
                               std::uint64_t seed) {
    if (j < 0 || j >= x_true.n) {
        throw std::invalid_argument("monte_carlo_expectation: index out of range");
    }
    if (trials < 1) throw std::invalid_argument("monte_carlo_expectation: trials must be >= 1");

    std::vector<Index> coords = x_true.support;
    if (!std::binary_search(coords.begin(), coords.end(), j)) {
        coords.insert(std::upper_bound(coords.begin(), coords.end(), j), j);
    }
    const std::size_t width = coords.size();
    std::vector<double> weight(width);
    std::size_t j_pos = 0;
    for (std::size_t k = 0; k < width; ++k) {
        weight[k] = x_true.values[coords[k]];
        if (coords[k] == j) j_pos = k;
    }

    NormalSampler sampler(seed);
    double sum = 0.0;
    for (Index t = 0; t < trials; ++t) {
        double dot = 0.0;
        double a_j = 0.0;
        for (std::size_t k = 0; k < width; ++k) {
            const double a = sampler.next();
            dot += a * weight[k];
            if (k == j_pos) a_j = a;
        }
        sum += a_j * sign_measure_scalar(dot);
    }
    return sum / static_cast<double>(trials);
}

}  // namespace obcs
