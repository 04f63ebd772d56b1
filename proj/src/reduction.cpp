#include "obcs/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "obcs/errors.hpp"

namespace obcs {

namespace {

void check_dims(const Matrix& A, const Vector& y) {
    if (A.rows() != y.size()) {
        throw DimensionError("matrix rows and sign vector length disagree");
    }
}

}  // namespace

Index select_first_index(const Matrix& A, const Vector& y) {
    check_dims(A, y);
    const Vector proxy = A.transpose() * y;
    Index best = 0;
    double best_mag = -1.0;
    for (Index i = 0; i < proxy.size(); ++i) {
        const double mag = std::abs(proxy[i]);
        if (mag > best_mag) {
            best_mag = mag;
            best = i;
        }
    }
    if (best_mag == 0.0) {
        throw DegenerateMeasurementError("A^T y is identically zero");
    }
    return best;
}

std::vector<Index> top_k_proxy_indices(const Matrix& A, const Vector& y, Index k) {
    check_dims(A, y);
    if (k < 1 || k > A.cols()) {
        throw DimensionError("top_k_proxy_indices: need 1 <= k <= n");
    }
    const Vector mag = (A.transpose() * y).cwiseAbs();
    std::vector<Index> order(static_cast<std::size_t>(A.cols()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return mag[a] > mag[b]; });
    order.resize(static_cast<std::size_t>(k));
    return order;
}

ReducedProblem build_reduced_problem(const Matrix& A, const Vector& y, Index j0, double c0) {
    check_dims(A, y);
    const Index m = A.rows();
    const Index n = A.cols();
    if (j0 < 0 || j0 >= n) {
        throw DimensionError("build_reduced_problem: j0 out of range");
    }
    if (!(c0 > 0.0)) {
        throw std::invalid_argument("build_reduced_problem: c0 must be positive");
    }

    const Vector pivot_col = A.col(j0);
    const double pivot = y.dot(pivot_col);
    if (std::abs(pivot) <= 1e-12 * pivot_col.norm() * std::sqrt(static_cast<double>(m))) {
        throw PivotDegenerateError("y^T A_{j0} is numerically zero");
    }

    ReducedProblem rp;
    rp.j0 = j0;
    rp.c0 = c0;
    rp.pivot = pivot;
    rp.C.resize(m, n - 1);
    rp.col_map.reserve(static_cast<std::size_t>(n - 1));

    // w = diag(y) A_{j0}; each reduced column is diag(y) A_l - (y^T A_l / pivot) w.
    const Vector w = y.cwiseProduct(pivot_col);
    Index r = 0;
    for (Index l = 0; l < n; ++l) {
        if (l == j0) continue;
        const Vector col = A.col(l);
        rp.C.col(r) = y.cwiseProduct(col) - (y.dot(col) / pivot) * w;
        rp.col_map.push_back(l);
        ++r;
    }
    rp.d = (c0 / pivot) * w;
    return rp;
}

Vector lift_solution(const Vector& z, const ReducedProblem& rp, const Matrix& A, const Vector& y) {
    check_dims(A, y);
    const Index n = A.cols();
    if (z.size() != n - 1) {
        throw DimensionError("lift_solution: reduced vector must have length n-1");
    }
    Vector x = Vector::Zero(n);
    double rest = 0.0;  // y^T A_{[n]\{j0}} z, summed over the nonzeros of z only
    for (Index r = 0; r < z.size(); ++r) {
        if (z[r] == 0.0) continue;
        const Index l = rp.col_map[static_cast<std::size_t>(r)];
        x[l] = z[r];
        rest += z[r] * y.dot(A.col(l));
    }
    x[rp.j0] = (rp.c0 - rest) / rp.pivot;
    return x;
}

SolutionCertificate certify_solution(const Vector& x, const Matrix& A, const Vector& y,
                                     Index s, double c0) {
    check_dims(A, y);
    const Vector Ax = A * x;
    SolutionCertificate cert;
    for (Index i = 0; i < Ax.size(); ++i) {
        if (sign_measure_scalar(Ax[i]) != y[i]) ++cert.hamming_mismatches;
    }
    cert.consistent = cert.hamming_mismatches == 0;
    cert.sparsity = static_cast<Index>(support_of(x).size());
    cert.l1_of_Ax = Ax.cwiseAbs().sum();
    cert.y_dot_Ax = y.dot(Ax);
    cert.sparsity_ok = cert.sparsity <= s;
    cert.normalization_gap = std::abs(cert.l1_of_Ax - c0);
    return cert;
}

}  // namespace obcs
