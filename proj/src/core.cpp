#include "obcs/core.hpp"

#include <algorithm>
#include <cmath>

#include "obcs/errors.hpp"
#include "obcs/rng.hpp"

namespace obcs {

Matrix generate_gaussian_matrix(Index m, Index n, std::uint64_t seed) {
    if (m < 1 || n < 1) {
        throw DimensionError("generate_gaussian_matrix: m and n must be positive");
    }
    Matrix A(m, n);
    NormalSampler rng(seed);
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < m; ++i) {
            A(i, j) = rng.next();
        }
    }
    return A;
}

SparseSignal generate_sparse_signal(Index n, Index s, std::uint64_t seed, bool normalize) {
    if (s < 1 || s > n) {
        throw DimensionError("generate_sparse_signal: need 1 <= s <= n");
    }
    NormalSampler rng(seed);

    // Partial Fisher-Yates: the first s entries are a uniform size-s subset.
    std::vector<Index> perm(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    for (Index i = 0; i < s; ++i) {
        const Index j = i + static_cast<Index>(rng.next_below(static_cast<std::uint64_t>(n - i)));
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }
    std::vector<Index> support(perm.begin(), perm.begin() + s);
    std::sort(support.begin(), support.end());

    SparseSignal sig;
    sig.n = n;
    sig.s = s;
    sig.support = std::move(support);
    sig.values = Vector::Zero(n);
    for (Index i : sig.support) {
        sig.values[i] = rng.next();
    }
    if (normalize) {
        sig.values /= sig.values.norm();
    }
    return sig;
}

double sign_measure_scalar(double v) {
    return v >= 0.0 ? 1.0 : -1.0;
}

Vector sign_measure(const Vector& v) {
    Vector out(v.size());
    for (Index i = 0; i < v.size(); ++i) {
        out[i] = sign_measure_scalar(v[i]);
    }
    return out;
}

Vector sign_truncate(const Vector& v) {
    return v.cwiseMin(0.0);
}

Instance make_instance(Index m, Index n, Index s, std::uint64_t seed) {
    Instance inst;
    inst.signal = generate_sparse_signal(n, s, derive_seed(seed, 1), true);
    inst.ensemble.A = generate_gaussian_matrix(m, n, derive_seed(seed, 2));
    inst.ensemble.y = sign_measure(inst.ensemble.A * inst.signal.values);
    inst.ensemble.m = m;
    inst.ensemble.n = n;
    inst.ensemble.seed = seed;
    return inst;
}

std::vector<Index> support_of(const Vector& x) {
    std::vector<Index> out;
    const double scale = x.size() > 0 ? x.cwiseAbs().maxCoeff() : 0.0;
    const double threshold = 1e-12 * scale;
    for (Index i = 0; i < x.size(); ++i) {
        if (std::abs(x[i]) > threshold) out.push_back(i);
    }
    return out;
}

}  // namespace obcs
