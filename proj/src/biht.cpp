#include "obcs/biht.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "obcs/errors.hpp"

namespace obcs {

namespace {

Index mismatch_count(const Vector& Ax, const Vector& y) {
    Index count = 0;
    for (Index i = 0; i < Ax.size(); ++i) {
        if (sign_measure_scalar(Ax[i]) != y[i]) ++count;
    }
    return count;
}

}  // namespace

Vector hard_threshold(const Vector& x, Index s) {
    if (s < 1 || s > x.size()) {
        throw DimensionError("hard_threshold: need 1 <= s <= n");
    }
    if (s == x.size()) return x;
    std::vector<Index> order(static_cast<std::size_t>(x.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        return std::abs(x[a]) > std::abs(x[b]);
    });
    Vector out = Vector::Zero(x.size());
    for (Index k = 0; k < s; ++k) {
        out[order[static_cast<std::size_t>(k)]] = x[order[static_cast<std::size_t>(k)]];
    }
    return out;
}

RecoveryResult run_biht(const Matrix& A, const Vector& y, const BihtConfig& cfg) {
    if (A.rows() != y.size()) throw DimensionError("run_biht: dimensions disagree");
    if (cfg.max_iter < 1) throw std::invalid_argument("run_biht: max_iter must be >= 1");
    if (cfg.s < 1 || cfg.s > A.cols()) {
        throw std::invalid_argument("run_biht: need 1 <= s <= n");
    }
    const auto t0 = std::chrono::steady_clock::now();
    const double tau =
        cfg.step_size > 0.0 ? cfg.step_size : 1.0 / static_cast<double>(A.rows());

    RecoveryResult result;
    Vector x = hard_threshold(A.transpose() * y, cfg.s);
    Vector Ax = A * x;
    Index best_mismatch = mismatch_count(Ax, y);
    Vector best_x = x;
    result.per_iteration_trace.push_back({-1, static_cast<double>(best_mismatch)});

    Index iter = 0;
    while (iter < cfg.max_iter && !(cfg.halt_on_consistency && best_mismatch == 0)) {
        x = hard_threshold(x + 0.5 * tau * (A.transpose() * (y - sign_measure(Ax))), cfg.s);
        if (!x.allFinite()) {
            throw NumericError("run_biht: non-finite iterate", iter);
        }
        Ax = A * x;
        ++iter;
        const Index mismatch = mismatch_count(Ax, y);
        result.per_iteration_trace.push_back({-1, static_cast<double>(mismatch)});
        if (mismatch <= best_mismatch) {
            best_mismatch = mismatch;
            best_x = x;
        }
    }

    result.x_raw = best_x;
    const double norm = best_x.norm();
    result.x_unit = norm > 0.0 ? Vector(best_x / norm) : best_x;
    result.support = support_of(best_x);
    result.iterations = iter;
    result.final_residual = static_cast<double>(best_mismatch);
    result.converged = best_mismatch == 0;
    result.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

}  // namespace obcs
