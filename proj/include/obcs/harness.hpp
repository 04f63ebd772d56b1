#ifndef OBCS_HARNESS_HPP
#define OBCS_HARNESS_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "obcs/metrics.hpp"
#include "obcs/solvers.hpp"

namespace obcs {

enum class SweepKind { MOverN, Sparsity };
enum class BenchKind { Accuracy, Consistency, Speed };

// Flat key=value experiment description. sweep_values are m/n ratios for
// MOverN sweeps and integer sparsity levels for Sparsity sweeps.
struct ExperimentConfig {
    Index n = 200;
    SweepKind sweep = SweepKind::MOverN;
    std::vector<double> sweep_values = {0.25, 0.5, 1.0, 2.0};
    Index s = 10;       // fixed sparsity for MOverN sweeps
    Index m = 0;        // fixed measurement count for Sparsity sweeps; 0 -> n
    Index trials = 25;
    std::uint64_t base_seed = 1;
    std::vector<std::string> algorithms = {"strmp", "strmp-l1", "biht"};
    std::string output_path = "bench.csv";
    Index workers = 1;

    double c0 = 1.0;
    double epsilon = 0.0;       // 0 -> per-instance default
    Index atoms_per_iteration = 1;
    double solver_tol = 0.0;    // 0 -> scale-aware default
    Index solver_max_iter = kDefaultSolverMaxIter;
    double biht_step_size = 0.0;  // 0 -> 1/m
    Index biht_max_iter = 300;
};

// Parses "key = value" lines ('#' comments, blank lines allowed) and
// validates; unknown keys and malformed values raise ConfigError.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);
void validate_config(const ExperimentConfig& cfg);

// (m, s) of one sweep point.
struct SweepPoint {
    Index m = 0;
    Index s = 0;
    double value = 0.0;
};
SweepPoint resolve_sweep_point(const ExperimentConfig& cfg, std::size_t point_idx);

// Seed of trial `trial` at sweep point `point_idx`; the CSV carries it so
// any row can be replayed through `obcs recover`.
std::uint64_t trial_seed_for(std::uint64_t base_seed, std::size_t point_idx, Index trial);

// Runs one algorithm on the instance derived from trial_seed. kind controls
// only the wall_time column: Speed keeps the measured time, the other two
// zero it so reruns are byte-identical.
MetricsRecord run_single_trial(const std::string& algorithm, const SweepPoint& point,
                               std::uint64_t trial_seed, const ExperimentConfig& cfg,
                               BenchKind kind);

// Full sweep: every (point, trial, algorithm) row, canonically sorted by
// (point, trial, algorithm name). When output_path is nonempty, writes the
// row CSV plus <stem>.agg.csv (per-point means) and <stem>.meta.json.
std::vector<MetricsRecord> run_accuracy_sweep(const ExperimentConfig& cfg);
std::vector<MetricsRecord> run_consistency_sweep(const ExperimentConfig& cfg);
// Speed sweeps force workers = 1 so timings are not polluted by contention.
std::vector<MetricsRecord> run_speed_sweep(const ExperimentConfig& cfg);

void write_rows_csv(std::ostream& out, const std::vector<MetricsRecord>& rows);

// Per (sweep point, algorithm) aggregate. Infinite SNRs (exact recoveries)
// are excluded from both means and counted in n_exact; the _consistent mean
// additionally drops trials with nonzero Hamming error.
struct AggregateRow {
    std::string algorithm;
    double sweep_value = 0.0;
    Index m = 0;
    Index n = 0;
    Index s = 0;
    Index trials = 0;
    Index n_exact = 0;
    Index n_inconsistent = 0;
    double snr_db_mean = 0.0;
    double snr_db_mean_consistent = 0.0;
    double missed_mean = 0.0;
    double misidentified_mean = 0.0;
    double hamming_error_mean = 0.0;
    double l2_error_unit_mean = 0.0;
    double wall_time_mean = 0.0;
    double wall_time_std = 0.0;
};
std::vector<AggregateRow> aggregate_rows(const ExperimentConfig& cfg,
                                         const std::vector<MetricsRecord>& rows);
void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows);

// Success rate of the first-index pick over seeded trials, one row per m.
struct FirstIndexPoint {
    Index m = 0;
    Index trials = 0;
    Index successes = 0;
    double rate = 0.0;
};
std::vector<FirstIndexPoint> run_first_index_study(Index n, Index s,
                                                   const std::vector<Index>& m_values,
                                                   Index trials, std::uint64_t base_seed);
void write_first_index_csv(std::ostream& out, const std::vector<FirstIndexPoint>& points);

}  // namespace obcs

#endif
