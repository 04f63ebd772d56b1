#include "obcs/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "obcs/errors.hpp"
#include "obcs/io.hpp"

namespace obcs {

double snr(const Vector& x_est, const Vector& x_true) {
    if (x_est.size() != x_true.size()) {
        throw DimensionError("snr: vectors must have equal length");
    }
    const double err_sq = (x_est - x_true).squaredNorm();
    if (err_sq == 0.0) return std::numeric_limits<double>::infinity();
    const double sig_sq = x_est.squaredNorm();
    if (sig_sq == 0.0) return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(sig_sq / err_sq);
}

Index missed_count(const Vector& x_est, const Vector& x_true) {
    if (x_est.size() != x_true.size()) {
        throw DimensionError("missed_count: vectors must have equal length");
    }
    const auto est = support_of(x_est);
    Index count = 0;
    for (Index j : support_of(x_true)) {
        if (!std::binary_search(est.begin(), est.end(), j)) ++count;
    }
    return count;
}

Index misidentified_count(const Vector& x_est, const Vector& x_true) {
    if (x_est.size() != x_true.size()) {
        throw DimensionError("misidentified_count: vectors must have equal length");
    }
    const auto truth = support_of(x_true);
    Index count = 0;
    for (Index j : support_of(x_est)) {
        if (!std::binary_search(truth.begin(), truth.end(), j)) ++count;
    }
    return count;
}

double hamming_error(const Vector& x_est, const Matrix& A, const Vector& y) {
    if (A.cols() != x_est.size() || A.rows() != y.size()) {
        throw DimensionError("hamming_error: dimensions disagree");
    }
    const Vector signs = sign_measure(A * x_est);
    Index mismatches = 0;
    for (Index i = 0; i < y.size(); ++i) {
        if (signs[i] != y[i]) ++mismatches;
    }
    return static_cast<double>(mismatches) / static_cast<double>(y.size());
}

double unit_l2_error(const Vector& x_est, const Vector& x_true) {
    if (x_est.size() != x_true.size()) {
        throw DimensionError("unit_l2_error: vectors must have equal length");
    }
    const double ne = x_est.norm();
    const double nt = x_true.norm();
    const Vector ue = ne > 0.0 ? Vector(x_est / ne) : x_est;
    const Vector ut = nt > 0.0 ? Vector(x_true / nt) : x_true;
    return (ue - ut).norm();
}

MetricsRecord evaluate_recovery(const std::string& algorithm, const SparseSignal& truth,
                                const Matrix& A, const Vector& y, std::uint64_t trial_seed,
                                const RecoveryResult& recovery) {
    MetricsRecord r;
    r.algorithm = algorithm;
    r.m = A.rows();
    r.n = A.cols();
    r.s = truth.s;
    r.trial_seed = trial_seed;
    const double tn = truth.values.norm();
    const Vector truth_unit = tn > 0.0 ? Vector(truth.values / tn) : truth.values;
    r.snr_db = snr(recovery.x_unit, truth_unit);
    r.missed = missed_count(recovery.x_unit, truth.values);
    r.misidentified = misidentified_count(recovery.x_unit, truth.values);
    r.hamming_error = hamming_error(recovery.x_unit, A, y);
    r.l2_error_unit = unit_l2_error(recovery.x_unit, truth.values);
    r.wall_time = recovery.wall_time;
    return r;
}

std::string metrics_csv_header() {
    return "algorithm,m,n,s,trial_seed,snr_db,missed,misidentified,"
           "hamming_error,l2_error_unit,wall_time";
}

std::string metrics_csv_row(const MetricsRecord& r) {
    std::ostringstream out;
    out << r.algorithm << ',' << r.m << ',' << r.n << ',' << r.s << ',' << r.trial_seed << ','
        << fmt_double(r.snr_db) << ',' << r.missed << ',' << r.misidentified << ','
        << fmt_double(r.hamming_error) << ',' << fmt_double(r.l2_error_unit) << ','
        << fmt_double(r.wall_time);
    return out.str();
}

}  // namespace obcs
