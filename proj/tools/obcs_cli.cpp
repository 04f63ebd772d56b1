// Command-line front end: instance generation, single recoveries, benchmark
// sweeps, and the two small Monte-Carlo studies.
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "obcs/biht.hpp"
#include "obcs/errors.hpp"
#include "obcs/harness.hpp"
#include "obcs/io.hpp"
#include "obcs/metrics.hpp"
#include "obcs/oracle.hpp"
#include "obcs/reduction.hpp"
#include "obcs/rng.hpp"
#include "obcs/strmp.hpp"

namespace {

using nlohmann::json;

struct GenOptions {
    obcs::Index m = 0;
    obcs::Index n = 0;
    obcs::Index s = 0;
    std::uint64_t seed = 1;
    std::string prefix = "instance";
};

struct RecoverOptions {
    std::string algo;
    std::string matrix_path;
    std::string signs_path;
    std::string truth_path;
    std::string format = "jsonl";
    std::string out_path = "-";
    obcs::Index s = 10;
    double c0 = 1.0;
    double eps = 0.0;
    obcs::Index atoms = 1;
    double solver_tol = 0.0;
    obcs::Index solver_max_iter = obcs::kDefaultSolverMaxIter;
    double biht_step = 0.0;
    obcs::Index biht_max_iter = 300;
    std::uint64_t seed = 0;  // label only, copied into the CSV row
};

struct BenchOptions {
    std::string kind;
    std::string config_path;
    bool paper_scale = false;
};

struct FirstIndexOptions {
    obcs::Index n = 1000;
    obcs::Index s = 15;
    std::vector<obcs::Index> m_list = {30, 60, 100, 150, 200};
    obcs::Index trials = 100;
    std::uint64_t seed = 1;
    std::string out_path = "-";
};

struct ExpectationOptions {
    obcs::Index trials = 1000000;
    obcs::Index n = 8;
    obcs::Index s = 3;
    std::uint64_t seed = 1;
};

void run_gen(const GenOptions& opt) {
    const obcs::Instance inst = obcs::make_instance(opt.m, opt.n, opt.s, opt.seed);
    const std::string mp = opt.prefix + ".matrix.txt";
    const std::string yp = opt.prefix + ".signs.txt";
    const std::string xp = opt.prefix + ".signal.txt";
    obcs::write_matrix_file(mp, inst.ensemble.A);
    obcs::write_signs_file(yp, inst.ensemble.y);
    obcs::write_signal_file(xp, inst.signal);

    json meta;
    meta["rng"] = obcs::kRngIdentity;
    meta["m"] = opt.m;
    meta["n"] = opt.n;
    meta["s"] = opt.s;
    meta["seed"] = opt.seed;
    const std::string metap = opt.prefix + ".meta.json";
    std::ofstream metaf(metap);
    if (!metaf) throw obcs::ConfigError("cannot open for writing: " + metap);
    metaf << meta.dump(2) << '\n';

    std::cout << "wrote " << mp << '\n'
              << "wrote " << yp << '\n'
              << "wrote " << xp << '\n'
              << "wrote " << metap << '\n';
}

json result_to_json(const obcs::RecoveryResult& rr) {
    json j;
    j["type"] = "result";
    std::vector<obcs::Index> support_1based;
    std::vector<double> unit_values, raw_values;
    for (obcs::Index i : rr.support) {
        support_1based.push_back(i + 1);
        unit_values.push_back(rr.x_unit[i]);
        raw_values.push_back(rr.x_raw[i]);
    }
    j["support"] = support_1based;
    j["x_unit"] = unit_values;
    j["x_raw"] = raw_values;
    j["iterations"] = rr.iterations;
    j["final_residual"] = rr.final_residual;
    j["converged"] = rr.converged;
    j["wall_time"] = rr.wall_time;
    json trace = json::array();
    for (const auto& e : rr.per_iteration_trace) {
        trace.push_back({{"index", e.index >= 0 ? e.index + 1 : -1},
                         {"residual", e.residual}});
    }
    j["trace"] = trace;
    return j;
}

void run_recover(const RecoverOptions& opt) {
    const obcs::Matrix A = obcs::read_matrix_file(opt.matrix_path);
    const obcs::Vector y = obcs::read_signs_file(opt.signs_path);
    if (y.size() != A.rows()) {
        throw obcs::ConfigError("signs length does not match matrix rows");
    }
    if (opt.s < 1 || opt.s > A.cols()) throw obcs::ConfigError("need 1 <= s <= n");
    if (opt.format == "csv" && opt.truth_path.empty()) {
        throw obcs::ConfigError("--format csv requires --truth");
    }

    obcs::RecoveryResult rr;
    if (opt.algo == "biht") {
        obcs::BihtConfig bc;
        bc.s = opt.s;
        bc.step_size = opt.biht_step;
        bc.max_iter = opt.biht_max_iter;
        rr = obcs::run_biht(A, y, bc);
    } else {
        obcs::StrmpConfig sc;
        sc.s = opt.s;
        sc.c0 = opt.c0;
        sc.epsilon = opt.eps;
        sc.variant = opt.algo == "strmp" ? obcs::Variant::L2 : obcs::Variant::L1;
        sc.atoms_per_iteration = opt.atoms;
        sc.solver_tol = opt.solver_tol;
        sc.solver_max_iter = opt.solver_max_iter;
        rr = obcs::run_strmp(A, y, sc);
    }
    const auto cert = obcs::certify_solution(rr.x_raw, A, y, opt.s, opt.c0);

    std::ofstream file;
    if (opt.out_path != "-") {
        file.open(opt.out_path);
        if (!file) throw obcs::ConfigError("cannot open for writing: " + opt.out_path);
    }
    std::ostream& out = opt.out_path == "-" ? std::cout : file;

    if (opt.format == "csv") {
        const obcs::SparseSignal truth = obcs::read_signal_file(opt.truth_path);
        if (truth.n != A.cols()) throw obcs::ConfigError("truth dimension mismatch");
        const auto rec = obcs::evaluate_recovery(opt.algo, truth, A, y, opt.seed, rr);
        out << obcs::metrics_csv_header() << '\n' << obcs::metrics_csv_row(rec) << '\n';
        return;
    }

    json meta;
    meta["type"] = "meta";
    meta["algorithm"] = opt.algo;
    meta["m"] = A.rows();
    meta["n"] = A.cols();
    meta["s"] = opt.s;
    meta["c0"] = opt.c0;
    meta["epsilon"] = opt.eps;
    meta["rng"] = obcs::kRngIdentity;
    out << meta.dump() << '\n';
    out << result_to_json(rr).dump() << '\n';

    json jc;
    jc["type"] = "certificate";
    jc["consistent"] = cert.consistent;
    jc["hamming_mismatches"] = cert.hamming_mismatches;
    jc["sparsity"] = cert.sparsity;
    jc["sparsity_ok"] = cert.sparsity_ok;
    jc["l1_of_Ax"] = cert.l1_of_Ax;
    jc["y_dot_Ax"] = cert.y_dot_Ax;
    jc["normalization_gap"] = cert.normalization_gap;
    out << jc.dump() << '\n';

    if (!opt.truth_path.empty()) {
        const obcs::SparseSignal truth = obcs::read_signal_file(opt.truth_path);
        if (truth.n != A.cols()) throw obcs::ConfigError("truth dimension mismatch");
        const auto rec = obcs::evaluate_recovery(opt.algo, truth, A, y, opt.seed, rr);
        json jm;
        jm["type"] = "metrics";
        jm["snr_db"] = obcs::fmt_double(rec.snr_db);
        jm["missed"] = rec.missed;
        jm["misidentified"] = rec.misidentified;
        jm["hamming_error"] = rec.hamming_error;
        jm["l2_error_unit"] = rec.l2_error_unit;
        out << jm.dump() << '\n';
    }
}

void run_bench(const BenchOptions& opt) {
    obcs::ExperimentConfig cfg = obcs::load_config_file(opt.config_path);
    if (opt.paper_scale) {
        cfg.n = 1000;
        cfg.trials = 100;
        obcs::validate_config(cfg);
    }
    std::vector<obcs::MetricsRecord> rows;
    if (opt.kind == "accuracy") {
        rows = obcs::run_accuracy_sweep(cfg);
    } else if (opt.kind == "consistency") {
        rows = obcs::run_consistency_sweep(cfg);
    } else {
        rows = obcs::run_speed_sweep(cfg);
    }
    std::cout << "wrote " << rows.size() << " rows to " << cfg.output_path << '\n';
}

void run_first_index(const FirstIndexOptions& opt) {
    const auto points =
        obcs::run_first_index_study(opt.n, opt.s, opt.m_list, opt.trials, opt.seed);
    std::ofstream file;
    if (opt.out_path != "-") {
        file.open(opt.out_path);
        if (!file) throw obcs::ConfigError("cannot open for writing: " + opt.out_path);
    }
    std::ostream& out = opt.out_path == "-" ? std::cout : file;
    obcs::write_first_index_csv(out, points);
}

void run_expectation_check(const ExpectationOptions& opt) {
    if (opt.s < 1 || opt.s > opt.n) throw obcs::ConfigError("need 1 <= s <= n");
    const obcs::SparseSignal x =
        obcs::generate_sparse_signal(opt.n, opt.s, obcs::derive_seed(opt.seed, 1), true);
    const double scale = 2.0 / std::sqrt(2.0 * M_PI);

    // Every support coordinate plus the first off-support one (expected 0).
    std::vector<obcs::Index> probes = x.support;
    for (obcs::Index j = 0; j < x.n; ++j) {
        if (x.values[j] == 0.0) {
            probes.push_back(j);
            break;
        }
    }
    std::cout << "j,x_j,expected,estimate,abs_error\n";
    for (std::size_t k = 0; k < probes.size(); ++k) {
        const obcs::Index j = probes[k];
        const double est = obcs::monte_carlo_expectation(
            x, j, opt.trials, obcs::derive_seed(opt.seed, 100 + k));
        const double expected = scale * x.values[j];
        std::cout << (j + 1) << ',' << obcs::fmt_double(x.values[j]) << ','
                  << obcs::fmt_double(expected) << ',' << obcs::fmt_double(est) << ','
                  << obcs::fmt_double(std::abs(est - expected)) << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"One-bit compressed sensing: STrMP / STrMP-l1 / BIHT"};
    app.require_subcommand(1);

    GenOptions gen_opt;
    auto* gen = app.add_subcommand("gen", "Generate a seeded instance (A, signs, signal)");
    gen->add_option("--m", gen_opt.m, "measurement count")->required();
    gen->add_option("--n", gen_opt.n, "signal dimension")->required();
    gen->add_option("--s", gen_opt.s, "sparsity")->required();
    gen->add_option("--seed", gen_opt.seed, "instance seed");
    gen->add_option("--prefix", gen_opt.prefix, "output path prefix");
    gen->callback([&] { run_gen(gen_opt); });

    RecoverOptions rec_opt;
    auto* rec = app.add_subcommand("recover", "Run one recovery on files from gen");
    rec->add_option("--algo", rec_opt.algo, "algorithm")
        ->required()
        ->check(CLI::IsMember({"strmp", "strmp-l1", "biht"}));
    rec->add_option("--matrix", rec_opt.matrix_path, "obcs-matrix file")->required();
    rec->add_option("--signs", rec_opt.signs_path, "obcs-signs file")->required();
    rec->add_option("--truth", rec_opt.truth_path, "obcs-signal file for metrics");
    rec->add_option("--format", rec_opt.format, "output format")
        ->check(CLI::IsMember({"jsonl", "csv"}));
    rec->add_option("--out", rec_opt.out_path, "output path, - for stdout");
    rec->add_option("--s", rec_opt.s, "sparsity budget");
    rec->add_option("--c0", rec_opt.c0, "normalization target");
    rec->add_option("--eps", rec_opt.eps, "residual halt threshold, 0 = auto");
    rec->add_option("--atoms", rec_opt.atoms, "atoms per greedy iteration");
    rec->add_option("--solver-tol", rec_opt.solver_tol, "inner solver tolerance, 0 = auto");
    rec->add_option("--solver-max-iter", rec_opt.solver_max_iter, "inner solver iteration cap");
    rec->add_option("--biht-step", rec_opt.biht_step, "BIHT step size, 0 = 1/m");
    rec->add_option("--biht-max-iter", rec_opt.biht_max_iter, "BIHT iteration cap");
    rec->add_option("--seed", rec_opt.seed, "seed label copied into CSV output");
    rec->callback([&] { run_recover(rec_opt); });

    BenchOptions bench_opt;
    auto* bench = app.add_subcommand("bench", "Run a benchmark sweep from a config file");
    bench->add_option("kind", bench_opt.kind, "sweep kind")
        ->required()
        ->check(CLI::IsMember({"accuracy", "consistency", "speed"}));
    bench->add_option("--config", bench_opt.config_path, "key=value config file")->required();
    bench->add_flag("--paper-scale", bench_opt.paper_scale,
                    "override to n=1000, trials=100");
    bench->callback([&] { run_bench(bench_opt); });

    FirstIndexOptions fi_opt;
    auto* fi = app.add_subcommand("first-index",
                                  "Success rate of the first-index pick vs m");
    fi->add_option("--n", fi_opt.n, "signal dimension");
    fi->add_option("--s", fi_opt.s, "sparsity");
    fi->add_option("--m-list", fi_opt.m_list, "measurement counts")->delimiter(',');
    fi->add_option("--trials", fi_opt.trials, "trials per m");
    fi->add_option("--seed", fi_opt.seed, "base seed");
    fi->add_option("--out", fi_opt.out_path, "output path, - for stdout");
    fi->callback([&] { run_first_index(fi_opt); });

    ExpectationOptions exp_opt;
    auto* exp = app.add_subcommand("expectation-check",
                                   "Monte-Carlo check of E[a_j sign(a^T x)]");
    exp->add_option("--trials", exp_opt.trials, "Monte-Carlo trials");
    exp->add_option("--n", exp_opt.n, "signal dimension");
    exp->add_option("--s", exp_opt.s, "sparsity");
    exp->add_option("--seed", exp_opt.seed, "base seed");
    exp->callback([&] { run_expectation_check(exp_opt); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const obcs::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const obcs::DimensionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const obcs::Error& e) {
        // Numeric failures: degenerate pivot, non-finite solver state.
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
