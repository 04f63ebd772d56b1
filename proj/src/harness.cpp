#include "obcs/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "obcs/biht.hpp"
#include "obcs/errors.hpp"
#include "obcs/io.hpp"
#include "obcs/reduction.hpp"
#include "obcs/rng.hpp"
#include "obcs/strmp.hpp"

namespace obcs {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) parts.push_back(cur);
    return parts;
}

double parse_double(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end != value.c_str() + value.size() || value.empty()) {
        throw ConfigError("config key '" + key + "': bad number '" + value + "'");
    }
    return v;
}

Index parse_index(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const long long v = std::strtoll(value.c_str(), &end, 10);
    if (end != value.c_str() + value.size() || value.empty()) {
        throw ConfigError("config key '" + key + "': bad integer '" + value + "'");
    }
    return static_cast<Index>(v);
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
    if (end != value.c_str() + value.size() || value.empty()) {
        throw ConfigError("config key '" + key + "': bad seed '" + value + "'");
    }
    return static_cast<std::uint64_t>(v);
}

std::string sweep_name(SweepKind k) {
    return k == SweepKind::MOverN ? "m_over_n" : "sparsity";
}

std::string bench_name(BenchKind k) {
    switch (k) {
        case BenchKind::Accuracy: return "accuracy";
        case BenchKind::Consistency: return "consistency";
        default: return "speed";
    }
}

std::vector<std::string> canonical_algorithms(const ExperimentConfig& cfg) {
    std::vector<std::string> algos = cfg.algorithms;
    std::sort(algos.begin(), algos.end());
    algos.erase(std::unique(algos.begin(), algos.end()), algos.end());
    return algos;
}

// Mean over the finite entries; inf and nan are skipped. Empty -> nan.
double finite_mean(const std::vector<double>& xs) {
    double sum = 0.0;
    Index count = 0;
    for (double x : xs) {
        if (std::isfinite(x)) {
            sum += x;
            ++count;
        }
    }
    if (count == 0) return std::numeric_limits<double>::quiet_NaN();
    return sum / static_cast<double>(count);
}

double finite_std(const std::vector<double>& xs) {
    const double mean = finite_mean(xs);
    if (!std::isfinite(mean)) return std::numeric_limits<double>::quiet_NaN();
    double acc = 0.0;
    Index count = 0;
    for (double x : xs) {
        if (std::isfinite(x)) {
            acc += (x - mean) * (x - mean);
            ++count;
        }
    }
    if (count < 2) return 0.0;
    return std::sqrt(acc / static_cast<double>(count - 1));
}

std::string output_stem(const std::string& path) {
    if (path.size() > 4 && path.substr(path.size() - 4) == ".csv") {
        return path.substr(0, path.size() - 4);
    }
    return path;
}

void write_meta_json(const std::string& path, const ExperimentConfig& cfg, BenchKind kind) {
    nlohmann::json j;
    j["kind"] = bench_name(kind);
    j["rng"] = kRngIdentity;
    j["n"] = cfg.n;
    j["sweep"] = sweep_name(cfg.sweep);
    j["sweep_values"] = cfg.sweep_values;
    j["s"] = cfg.s;
    j["m"] = cfg.m;
    j["trials"] = cfg.trials;
    j["base_seed"] = cfg.base_seed;
    j["algorithms"] = canonical_algorithms(cfg);
    j["c0"] = cfg.c0;
    j["epsilon"] = cfg.epsilon;
    j["atoms_per_iteration"] = cfg.atoms_per_iteration;
    j["solver_tol"] = cfg.solver_tol;
    j["solver_max_iter"] = cfg.solver_max_iter;
    j["biht_step_size"] = cfg.biht_step_size;
    j["biht_max_iter"] = cfg.biht_max_iter;
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
}

std::vector<MetricsRecord> run_sweep(const ExperimentConfig& cfg, BenchKind kind) {
    validate_config(cfg);
    const std::vector<std::string> algos = canonical_algorithms(cfg);
    const std::size_t n_points = cfg.sweep_values.size();
    const std::size_t n_tasks = n_points * static_cast<std::size_t>(cfg.trials);

    std::vector<std::vector<MetricsRecord>> slots(n_tasks);
    std::atomic<std::size_t> cursor{0};
    auto work = [&]() {
        while (true) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= n_tasks) break;
            const std::size_t point_idx = i / static_cast<std::size_t>(cfg.trials);
            const Index trial = static_cast<Index>(i % static_cast<std::size_t>(cfg.trials));
            const SweepPoint point = resolve_sweep_point(cfg, point_idx);
            const std::uint64_t seed = trial_seed_for(cfg.base_seed, point_idx, trial);
            slots[i].reserve(algos.size());
            for (const auto& algo : algos) {
                slots[i].push_back(run_single_trial(algo, point, seed, cfg, kind));
            }
        }
    };

    const Index workers = kind == BenchKind::Speed ? 1 : std::max<Index>(1, cfg.workers);
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (Index w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    std::vector<MetricsRecord> rows;
    rows.reserve(n_tasks * algos.size());
    for (auto& slot : slots) {
        for (auto& r : slot) rows.push_back(std::move(r));
    }

    if (!cfg.output_path.empty()) {
        std::ofstream out(cfg.output_path);
        if (!out) throw ConfigError("cannot open for writing: " + cfg.output_path);
        write_rows_csv(out, rows);

        const std::string stem = output_stem(cfg.output_path);
        std::ofstream agg_out(stem + ".agg.csv");
        if (!agg_out) throw ConfigError("cannot open for writing: " + stem + ".agg.csv");
        write_aggregate_csv(agg_out, aggregate_rows(cfg, rows));

        write_meta_json(stem + ".meta.json", cfg, kind);
    }
    return rows;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(line.substr(0, line.find('#')));
        if (stripped.empty()) continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
        }

        if (key == "n") {
            cfg.n = parse_index(key, value);
        } else if (key == "sweep") {
            if (value == "m_over_n") {
                cfg.sweep = SweepKind::MOverN;
            } else if (value == "sparsity") {
                cfg.sweep = SweepKind::Sparsity;
            } else {
                throw ConfigError("config key 'sweep': expected m_over_n or sparsity");
            }
        } else if (key == "sweep_values") {
            cfg.sweep_values.clear();
            for (const auto& part : split_list(value)) {
                cfg.sweep_values.push_back(parse_double(key, part));
            }
        } else if (key == "s") {
            cfg.s = parse_index(key, value);
        } else if (key == "m") {
            cfg.m = parse_index(key, value);
        } else if (key == "trials") {
            cfg.trials = parse_index(key, value);
        } else if (key == "base_seed") {
            cfg.base_seed = parse_u64(key, value);
        } else if (key == "algorithms") {
            cfg.algorithms = split_list(value);
        } else if (key == "output") {
            cfg.output_path = value;
        } else if (key == "workers") {
            cfg.workers = parse_index(key, value);
        } else if (key == "c0") {
            cfg.c0 = parse_double(key, value);
        } else if (key == "epsilon") {
            cfg.epsilon = parse_double(key, value);
        } else if (key == "atoms_per_iteration") {
            cfg.atoms_per_iteration = parse_index(key, value);
        } else if (key == "solver_tol") {
            cfg.solver_tol = parse_double(key, value);
        } else if (key == "solver_max_iter") {
            cfg.solver_max_iter = parse_index(key, value);
        } else if (key == "biht_step_size") {
            cfg.biht_step_size = parse_double(key, value);
        } else if (key == "biht_max_iter") {
            cfg.biht_max_iter = parse_index(key, value);
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    validate_config(cfg);
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.n < 1) throw ConfigError("n must be >= 1");
    if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
    if (cfg.workers < 1) throw ConfigError("workers must be >= 1");
    if (cfg.s < 1) throw ConfigError("s must be >= 1");
    if (cfg.m < 0) throw ConfigError("m must be >= 0");
    if (!(cfg.c0 > 0.0)) throw ConfigError("c0 must be positive");
    if (cfg.epsilon < 0.0) throw ConfigError("epsilon must be >= 0");
    if (cfg.solver_tol < 0.0) throw ConfigError("solver_tol must be >= 0");
    if (cfg.biht_step_size < 0.0) throw ConfigError("biht_step_size must be >= 0");
    if (cfg.atoms_per_iteration < 1) throw ConfigError("atoms_per_iteration must be >= 1");
    if (cfg.solver_max_iter < 1) throw ConfigError("solver_max_iter must be >= 1");
    if (cfg.biht_max_iter < 1) throw ConfigError("biht_max_iter must be >= 1");

    if (cfg.sweep_values.empty()) throw ConfigError("sweep_values must be nonempty");
    for (std::size_t i = 1; i < cfg.sweep_values.size(); ++i) {
        if (!(cfg.sweep_values[i] > cfg.sweep_values[i - 1])) {
            throw ConfigError("sweep_values must be strictly increasing");
        }
    }

    if (cfg.algorithms.empty()) throw ConfigError("algorithms must be nonempty");
    for (const auto& a : cfg.algorithms) {
        if (a != "strmp" && a != "strmp-l1" && a != "biht") {
            throw ConfigError("unknown algorithm '" + a + "'");
        }
    }

    if (cfg.sweep == SweepKind::MOverN) {
        if (cfg.s > cfg.n) throw ConfigError("s must be <= n");
        for (double v : cfg.sweep_values) {
            if (!(v > 0.0)) throw ConfigError("m/n sweep values must be positive");
            if (std::llround(v * static_cast<double>(cfg.n)) < 1) {
                throw ConfigError("m/n sweep value too small: m rounds to zero");
            }
        }
    } else {
        const Index m = cfg.m > 0 ? cfg.m : cfg.n;
        if (m < 1) throw ConfigError("fixed m must be >= 1 for sparsity sweeps");
        for (double v : cfg.sweep_values) {
            if (std::abs(v - std::llround(v)) > 1e-9) {
                throw ConfigError("sparsity sweep values must be integers");
            }
            const long long s = std::llround(v);
            if (s < 1 || s > cfg.n) throw ConfigError("sparsity sweep value out of [1, n]");
        }
    }
}

SweepPoint resolve_sweep_point(const ExperimentConfig& cfg, std::size_t point_idx) {
    if (point_idx >= cfg.sweep_values.size()) {
        throw std::invalid_argument("resolve_sweep_point: point index out of range");
    }
    SweepPoint p;
    p.value = cfg.sweep_values[point_idx];
    if (cfg.sweep == SweepKind::MOverN) {
        p.m = static_cast<Index>(std::llround(p.value * static_cast<double>(cfg.n)));
        p.s = cfg.s;
    } else {
        p.m = cfg.m > 0 ? cfg.m : cfg.n;
        p.s = static_cast<Index>(std::llround(p.value));
    }
    return p;
}

std::uint64_t trial_seed_for(std::uint64_t base_seed, std::size_t point_idx, Index trial) {
    return derive_seed(derive_seed(base_seed, static_cast<std::uint64_t>(point_idx)),
                       static_cast<std::uint64_t>(trial));
}

MetricsRecord run_single_trial(const std::string& algorithm, const SweepPoint& point,
                               std::uint64_t trial_seed, const ExperimentConfig& cfg,
                               BenchKind kind) {
    const Instance inst = make_instance(point.m, cfg.n, point.s, trial_seed);
    MetricsRecord rec;
    try {
        RecoveryResult rr;
        if (algorithm == "strmp" || algorithm == "strmp-l1") {
            StrmpConfig sc;
            sc.s = point.s;
            sc.c0 = cfg.c0;
            sc.epsilon = cfg.epsilon;
            sc.variant = algorithm == "strmp" ? Variant::L2 : Variant::L1;
            sc.atoms_per_iteration = cfg.atoms_per_iteration;
            sc.solver_tol = cfg.solver_tol;
            sc.solver_max_iter = cfg.solver_max_iter;
            rr = run_strmp(inst.ensemble.A, inst.ensemble.y, sc);
        } else if (algorithm == "biht") {
            BihtConfig bc;
            bc.s = point.s;
            bc.step_size = cfg.biht_step_size;
            bc.max_iter = cfg.biht_max_iter;
            rr = run_biht(inst.ensemble.A, inst.ensemble.y, bc);
        } else {
            throw ConfigError("unknown algorithm '" + algorithm + "'");
        }
        rec = evaluate_recovery(algorithm, inst.signal, inst.ensemble.A, inst.ensemble.y,
                                trial_seed, rr);
    } catch (const Error&) {
        // A failed trial keeps its row; quality columns become nan so the
        // aggregation skips them.
        rec.algorithm = algorithm;
        rec.m = point.m;
        rec.n = cfg.n;
        rec.s = point.s;
        rec.trial_seed = trial_seed;
        rec.snr_db = std::numeric_limits<double>::quiet_NaN();
        rec.missed = point.s;
        rec.misidentified = 0;
        rec.hamming_error = std::numeric_limits<double>::quiet_NaN();
        rec.l2_error_unit = std::numeric_limits<double>::quiet_NaN();
        rec.wall_time = 0.0;
    }
    if (kind != BenchKind::Speed) rec.wall_time = 0.0;
    return rec;
}

std::vector<MetricsRecord> run_accuracy_sweep(const ExperimentConfig& cfg) {
    return run_sweep(cfg, BenchKind::Accuracy);
}

std::vector<MetricsRecord> run_consistency_sweep(const ExperimentConfig& cfg) {
    return run_sweep(cfg, BenchKind::Consistency);
}

std::vector<MetricsRecord> run_speed_sweep(const ExperimentConfig& cfg) {
    return run_sweep(cfg, BenchKind::Speed);
}

void write_rows_csv(std::ostream& out, const std::vector<MetricsRecord>& rows) {
    out << metrics_csv_header() << '\n';
    for (const auto& r : rows) out << metrics_csv_row(r) << '\n';
}

std::vector<AggregateRow> aggregate_rows(const ExperimentConfig& cfg,
                                         const std::vector<MetricsRecord>& rows) {
    const std::vector<std::string> algos = canonical_algorithms(cfg);
    const std::size_t n_points = cfg.sweep_values.size();
    const std::size_t per_point = static_cast<std::size_t>(cfg.trials) * algos.size();
    if (rows.size() != n_points * per_point) {
        throw std::invalid_argument("aggregate_rows: rows do not match the config layout");
    }

    std::vector<AggregateRow> out;
    out.reserve(n_points * algos.size());
    for (std::size_t p = 0; p < n_points; ++p) {
        const SweepPoint point = resolve_sweep_point(cfg, p);
        for (std::size_t a = 0; a < algos.size(); ++a) {
            AggregateRow agg;
            agg.algorithm = algos[a];
            agg.sweep_value = point.value;
            agg.m = point.m;
            agg.n = cfg.n;
            agg.s = point.s;
            agg.trials = cfg.trials;

            std::vector<double> snr_all, snr_consistent, missed, misident, hamming, l2err, wall;
            for (Index t = 0; t < cfg.trials; ++t) {
                const std::size_t i =
                    p * per_point + static_cast<std::size_t>(t) * algos.size() + a;
                const MetricsRecord& r = rows[i];
                if (std::isinf(r.snr_db) && r.snr_db > 0) ++agg.n_exact;
                if (r.hamming_error > 0) ++agg.n_inconsistent;
                snr_all.push_back(r.snr_db);
                if (r.hamming_error == 0.0) snr_consistent.push_back(r.snr_db);
                missed.push_back(static_cast<double>(r.missed));
                misident.push_back(static_cast<double>(r.misidentified));
                hamming.push_back(r.hamming_error);
                l2err.push_back(r.l2_error_unit);
                wall.push_back(r.wall_time);
            }
            agg.snr_db_mean = finite_mean(snr_all);
            agg.snr_db_mean_consistent = finite_mean(snr_consistent);
            agg.missed_mean = finite_mean(missed);
            agg.misidentified_mean = finite_mean(misident);
            agg.hamming_error_mean = finite_mean(hamming);
            agg.l2_error_unit_mean = finite_mean(l2err);
            agg.wall_time_mean = finite_mean(wall);
            agg.wall_time_std = finite_std(wall);
            out.push_back(std::move(agg));
        }
    }
    return out;
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
    out << "algorithm,sweep_value,m,n,s,trials,n_exact,n_inconsistent,snr_db_mean,"
           "snr_db_mean_consistent,missed_mean,misidentified_mean,hamming_error_mean,"
           "l2_error_unit_mean,wall_time_mean,wall_time_std\n";
    for (const auto& r : rows) {
        out << r.algorithm << ',' << fmt_double(r.sweep_value) << ',' << r.m << ',' << r.n
            << ',' << r.s << ',' << r.trials << ',' << r.n_exact << ',' << r.n_inconsistent
            << ',' << fmt_double(r.snr_db_mean) << ',' << fmt_double(r.snr_db_mean_consistent)
            << ',' << fmt_double(r.missed_mean) << ',' << fmt_double(r.misidentified_mean)
            << ',' << fmt_double(r.hamming_error_mean) << ',' << fmt_double(r.l2_error_unit_mean)
            << ',' << fmt_double(r.wall_time_mean) << ',' << fmt_double(r.wall_time_std) << '\n';
    }
}

std::vector<FirstIndexPoint> run_first_index_study(Index n, Index s,
                                                   const std::vector<Index>& m_values,
                                                   Index trials, std::uint64_t base_seed) {
    if (n < 1 || s < 1 || s > n) throw ConfigError("first-index study: need 1 <= s <= n");
    if (trials < 1) throw ConfigError("first-index study: trials must be >= 1");
    if (m_values.empty()) throw ConfigError("first-index study: m list must be nonempty");
    for (Index m : m_values) {
        if (m < 1) throw ConfigError("first-index study: m values must be >= 1");
    }

    std::vector<FirstIndexPoint> points;
    points.reserve(m_values.size());
    for (std::size_t p = 0; p < m_values.size(); ++p) {
        FirstIndexPoint fp;
        fp.m = m_values[p];
        fp.trials = trials;
        for (Index t = 0; t < trials; ++t) {
            const std::uint64_t seed = trial_seed_for(base_seed, p, t);
            const Instance inst = make_instance(fp.m, n, s, seed);
            const Index j0 = select_first_index(inst.ensemble.A, inst.ensemble.y);
            if (std::binary_search(inst.signal.support.begin(), inst.signal.support.end(), j0)) {
                ++fp.successes;
            }
        }
        fp.rate = static_cast<double>(fp.successes) / static_cast<double>(trials);
        points.push_back(fp);
    }
    return points;
}

void write_first_index_csv(std::ostream& out, const std::vector<FirstIndexPoint>& points) {
    out << "m,trials,successes,rate\n";
    for (const auto& p : points) {
        out << p.m << ',' << p.trials << ',' << p.successes << ',' << fmt_double(p.rate) << '\n';
    }
}

}  // namespace obcs
