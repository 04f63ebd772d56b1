#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "obcs/errors.hpp"
#include "obcs/harness.hpp"
#include "obcs/metrics.hpp"
#include "obcs/rng.hpp"

using namespace obcs;

namespace {

std::vector<std::string> row_strings(const std::vector<MetricsRecord>& rows) {
    std::vector<std::string> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(metrics_csv_row(r));
    return out;
}

// Spearman rank correlation with average ranks for ties.
std::vector<double> average_ranks(const std::vector<double>& xs) {
    const std::size_t n = xs.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
        const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    const auto rx = average_ranks(xs);
    const auto ry = average_ranks(ys);
    const std::size_t n = xs.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double num = 0.0, dx = 0.0, dy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (rx[i] - mx) * (ry[i] - my);
        dx += (rx[i] - mx) * (rx[i] - mx);
        dy += (ry[i] - my) * (ry[i] - my);
    }
    return num / std::sqrt(dx * dy);
}

ExperimentConfig tiny_config() {
    ExperimentConfig cfg;
    cfg.n = 40;
    cfg.sweep = SweepKind::MOverN;
    cfg.sweep_values = {0.5, 1.5};
    cfg.s = 3;
    cfg.trials = 6;
    cfg.base_seed = 77;
    cfg.algorithms = {"strmp", "biht"};
    cfg.output_path = "";
    return cfg;
}

}  // namespace

TEST_CASE("config text parses every key") {
    const std::string text =
        "# benchmark setup\n"
        "n = 120\n"
        "sweep = sparsity\n"
        "sweep_values = 2, 4, 8\n"
        "m = 90\n"
        "s = 5\n"
        "trials = 7   # per point\n"
        "base_seed = 99\n"
        "algorithms = biht, strmp\n"
        "output = out.csv\n"
        "workers = 3\n"
        "c0 = 2.5\n"
        "epsilon = 1e-9\n"
        "atoms_per_iteration = 2\n"
        "solver_tol = 1e-8\n"
        "solver_max_iter = 500\n"
        "biht_step_size = 0.01\n"
        "biht_max_iter = 150\n";
    const ExperimentConfig cfg = parse_config_text(text);
    CHECK(cfg.n == 120);
    CHECK(cfg.sweep == SweepKind::Sparsity);
    CHECK(cfg.sweep_values == std::vector<double>{2.0, 4.0, 8.0});
    CHECK(cfg.m == 90);
    CHECK(cfg.s == 5);
    CHECK(cfg.trials == 7);
    CHECK(cfg.base_seed == 99);
    CHECK(cfg.algorithms == std::vector<std::string>{"biht", "strmp"});
    CHECK(cfg.output_path == "out.csv");
    CHECK(cfg.workers == 3);
    CHECK(cfg.c0 == 2.5);
    CHECK(cfg.epsilon == 1e-9);
    CHECK(cfg.atoms_per_iteration == 2);
    CHECK(cfg.solver_tol == 1e-8);
    CHECK(cfg.solver_max_iter == 500);
    CHECK(cfg.biht_step_size == 0.01);
    CHECK(cfg.biht_max_iter == 150);
}

TEST_CASE("config parse errors") {
    CHECK_THROWS_AS(parse_config_text("bogus_key = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("sweep = quadratic\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("sweep_values = 1.0, 0.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("algorithms = strmp, omp\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("n 200\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("n = \n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("trials = -3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("n = 10\ns = 11\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("sweep = sparsity\nsweep_values = 1.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("sweep = sparsity\nsweep_values = 300\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("n = abc\n"), ConfigError);
}

TEST_CASE("sweep points resolve m and s") {
    ExperimentConfig cfg = tiny_config();
    const SweepPoint p0 = resolve_sweep_point(cfg, 0);
    CHECK(p0.m == 20);  // 0.5 * 40
    CHECK(p0.s == 3);
    const SweepPoint p1 = resolve_sweep_point(cfg, 1);
    CHECK(p1.m == 60);
    CHECK_THROWS_AS(resolve_sweep_point(cfg, 2), std::invalid_argument);

    ExperimentConfig sp = tiny_config();
    sp.sweep = SweepKind::Sparsity;
    sp.sweep_values = {2.0, 5.0};
    sp.m = 0;  // falls back to n
    const SweepPoint q = resolve_sweep_point(sp, 1);
    CHECK(q.m == 40);
    CHECK(q.s == 5);
}

TEST_CASE("trial seeds are distinct across points and trials") {
    std::vector<std::uint64_t> seeds;
    for (std::size_t p = 0; p < 4; ++p) {
        for (Index t = 0; t < 25; ++t) seeds.push_back(trial_seed_for(1, p, t));
    }
    std::sort(seeds.begin(), seeds.end());
    CHECK(std::adjacent_find(seeds.begin(), seeds.end()) == seeds.end());
    CHECK(trial_seed_for(1, 0, 0) != trial_seed_for(2, 0, 0));
}

TEST_CASE("rows replay bit-identically from their recorded seed") {
    ExperimentConfig cfg = tiny_config();
    const auto rows = run_accuracy_sweep(cfg);
    REQUIRE(rows.size() == 2 * 6 * 2);

    // row layout: slot (point, trial), algorithms in sorted order inside
    const SweepPoint point = resolve_sweep_point(cfg, 1);
    const MetricsRecord& sample = rows[1 * 6 * 2 + 3 * 2 + 1];  // point 1, trial 3, strmp
    CHECK(sample.algorithm == "strmp");
    const MetricsRecord replayed =
        run_single_trial("strmp", point, sample.trial_seed, cfg, BenchKind::Accuracy);
    CHECK(metrics_csv_row(replayed) == metrics_csv_row(sample));
}

TEST_CASE("worker count does not change the rows") {
    ExperimentConfig cfg = tiny_config();
    cfg.workers = 1;
    const auto rows1 = run_accuracy_sweep(cfg);
    cfg.workers = 4;
    const auto rows4 = run_accuracy_sweep(cfg);
    CHECK(row_strings(rows1) == row_strings(rows4));

    // wall_time is zeroed outside speed mode, a precondition for the above
    for (const auto& r : rows1) CHECK(r.wall_time == 0.0);
}

TEST_CASE("speed sweeps keep timings and single-thread execution") {
    ExperimentConfig cfg = tiny_config();
    cfg.trials = 2;
    cfg.workers = 8;  // forced down to 1 internally
    const auto rows = run_speed_sweep(cfg);
    REQUIRE(rows.size() == 2 * 2 * 2);
    double total = 0.0;
    for (const auto& r : rows) {
        CHECK(r.wall_time >= 0.0);
        total += r.wall_time;
    }
    CHECK(total > 0.0);
}

TEST_CASE("aggregation averages per point and algorithm") {
    ExperimentConfig cfg = tiny_config();
    const auto rows = run_accuracy_sweep(cfg);
    const auto aggs = aggregate_rows(cfg, rows);
    REQUIRE(aggs.size() == 2 * 2);  // 2 points x 2 algorithms

    CHECK(aggs[0].algorithm == "biht");  // canonical sort
    CHECK(aggs[1].algorithm == "strmp");
    CHECK(aggs[0].sweep_value == 0.5);
    CHECK(aggs[2].sweep_value == 1.5);
    CHECK(aggs[0].m == 20);
    CHECK(aggs[2].m == 60);

    // manual recomputation of one cell (point 1, strmp)
    double missed_sum = 0.0;
    Index n_exact = 0;
    int count = 0;
    for (const auto& r : rows) {
        if (r.algorithm == "strmp" && r.m == 60) {
            missed_sum += static_cast<double>(r.missed);
            if (std::isinf(r.snr_db) && r.snr_db > 0) ++n_exact;
            ++count;
        }
    }
    REQUIRE(count == 6);
    const AggregateRow& cell = aggs[3];
    CHECK(cell.algorithm == "strmp");
    CHECK(cell.missed_mean == doctest::Approx(missed_sum / 6.0));
    CHECK(cell.n_exact == n_exact);
    CHECK(cell.trials == 6);

    auto bad_rows = rows;
    bad_rows.pop_back();
    CHECK_THROWS_AS(aggregate_rows(cfg, bad_rows), std::invalid_argument);
}

TEST_CASE("sweep outputs rows, aggregate, and metadata files") {
    const std::string dir = "harness_scratch";
    std::filesystem::create_directories(dir);
    ExperimentConfig cfg = tiny_config();
    cfg.output_path = dir + "/bench.csv";

    const auto rows = run_consistency_sweep(cfg);

    std::ifstream rows_in(dir + "/bench.csv");
    REQUIRE(rows_in.good());
    std::string header;
    std::getline(rows_in, header);
    CHECK(header == metrics_csv_header());
    std::size_t body_lines = 0;
    std::string line;
    while (std::getline(rows_in, line)) {
        if (!line.empty()) ++body_lines;
    }
    CHECK(body_lines == rows.size());

    std::ifstream agg_in(dir + "/bench.agg.csv");
    REQUIRE(agg_in.good());
    std::getline(agg_in, header);
    CHECK(header ==
          "algorithm,sweep_value,m,n,s,trials,n_exact,n_inconsistent,snr_db_mean,"
          "snr_db_mean_consistent,missed_mean,misidentified_mean,hamming_error_mean,"
          "l2_error_unit_mean,wall_time_mean,wall_time_std");

    std::ifstream meta_in(dir + "/bench.meta.json");
    REQUIRE(meta_in.good());
    nlohmann::json meta;
    meta_in >> meta;
    CHECK(meta["kind"] == "consistency");
    CHECK(meta["rng"] == kRngIdentity);
    CHECK(meta["n"] == 40);
    CHECK(meta["sweep"] == "m_over_n");
    CHECK(meta["base_seed"] == 77);
    CHECK(!meta.contains("workers"));

    std::filesystem::remove_all(dir);
}

TEST_CASE("first-index hit rate grows with m") {
    const std::vector<Index> m_values{10, 30, 60, 120, 240, 480};
    const auto points = run_first_index_study(200, 8, m_values, 60, 11);
    REQUIRE(points.size() == m_values.size());

    std::vector<double> ms, rates;
    for (const auto& p : points) {
        CHECK(p.trials == 60);
        CHECK(p.successes >= 0);
        CHECK(p.successes <= 60);
        CHECK(p.rate == doctest::Approx(double(p.successes) / 60.0));
        ms.push_back(static_cast<double>(p.m));
        rates.push_back(p.rate);
    }
    MESSAGE("rates: ", rates[0], " ", rates[1], " ", rates[2], " ", rates[3], " ", rates[4],
            " ", rates[5]);
    CHECK(spearman(ms, rates) > 0.9);
    CHECK(rates.back() > rates.front());

    // deterministic given the same base seed
    const auto again = run_first_index_study(200, 8, m_values, 60, 11);
    for (std::size_t i = 0; i < points.size(); ++i) {
        CHECK(points[i].successes == again[i].successes);
    }

    std::ostringstream csv;
    write_first_index_csv(csv, points);
    CHECK(csv.str().rfind("m,trials,successes,rate\n", 0) == 0);

    CHECK_THROWS_AS(run_first_index_study(10, 11, m_values, 5, 1), ConfigError);
    CHECK_THROWS_AS(run_first_index_study(10, 2, {}, 5, 1), ConfigError);
}
