#ifndef OBCS_METRICS_HPP
#define OBCS_METRICS_HPP

#include <cstdint>
#include <string>

#include "obcs/core.hpp"

namespace obcs {

// One recovery trial flattened into the fixed CSV schema.
struct MetricsRecord {
    std::string algorithm;
    Index m = 0;
    Index n = 0;
    Index s = 0;
    std::uint64_t trial_seed = 0;
    double snr_db = 0.0;
    Index missed = 0;
    Index misidentified = 0;
    double hamming_error = 0.0;
    double l2_error_unit = 0.0;
    double wall_time = 0.0;
};

// 10 log10(||x_est||^2 / ||x_est - x_true||^2).
// Zero error -> +inf; zero estimate with nonzero error -> -inf.
double snr(const Vector& x_est, const Vector& x_true);

// True-support coordinates the estimate zeroed out (<= s).
Index missed_count(const Vector& x_est, const Vector& x_true);

// Zero coordinates of the truth the estimate made nonzero (<= n - s).
Index misidentified_count(const Vector& x_est, const Vector& x_true);

// Fraction of rows where sign(A x_est) disagrees with y, sign(0) = +1.
double hamming_error(const Vector& x_est, const Matrix& A, const Vector& y);

// l2 distance between the unit normalizations of the two vectors; a zero
// vector is left as-is.
double unit_l2_error(const Vector& x_est, const Vector& x_true);

// Fills every quality column from one recovery against ground truth.
// SNR is computed on unit-normalized estimate and truth.
MetricsRecord evaluate_recovery(const std::string& algorithm, const SparseSignal& truth,
                                const Matrix& A, const Vector& y, std::uint64_t trial_seed,
                                const RecoveryResult& recovery);

std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsRecord& r);

}  // namespace obcs

#endif
