#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "obcs/core.hpp"
#include "obcs/errors.hpp"
#include "obcs/reduction.hpp"
#include "obcs/rng.hpp"
#include "obcs/solvers.hpp"
#include "obcs/strmp.hpp"

using namespace obcs;

TEST_CASE("match_step equals C^T (Cz+d)_- and half the l2 gradient") {
    const Instance inst = make_instance(60, 25, 4, 17);
    const Index j0 = select_first_index(inst.ensemble.A, inst.ensemble.y);
    const ReducedProblem rp = build_reduced_problem(inst.ensemble.A, inst.ensemble.y, j0, 1.0);

    const Vector h0 = match_step(Vector::Zero(24), rp, Variant::L2);
    const Vector expected0 = rp.C.transpose() * Vector(rp.d.cwiseMin(0.0));
    CHECK((h0 - expected0).norm() <= 1e-12 * (1.0 + expected0.norm()));

    NormalSampler rng(18);
    Vector z(24);
    for (Index i = 0; i < 24; ++i) z[i] = 0.3 * rng.next();

    std::vector<Index> all(24);
    for (Index i = 0; i < 24; ++i) all[static_cast<std::size_t>(i)] = i;
    SubproblemSpec spec{rp.C, rp.d, all, ObjectiveKind::L2};
    const Vector g = gradient_l2(z, spec);
    const Vector h = match_step(z, rp, Variant::L2);
    CHECK((h - 0.5 * g).norm() <= 1e-12 * (1.0 + g.norm()));

    // L1 proxy: C^T sign((Cz+d)_-) with sign(0) = 0
    const Vector r = rp.C * z + rp.d;
    Vector sgn = Vector::Zero(r.size());
    for (Index i = 0; i < r.size(); ++i) {
        if (r[i] < 0.0) sgn[i] = -1.0;
    }
    const Vector h1 = match_step(z, rp, Variant::L1);
    const Vector expected1 = rp.C.transpose() * sgn;
    CHECK((h1 - expected1).norm() <= 1e-12 * (1.0 + expected1.norm()));

    CHECK_THROWS_AS(match_step(Vector::Zero(5), rp, Variant::L2), DimensionError);
}

TEST_CASE("match_step vanishes at a feasible point") {
    const Instance inst = make_instance(60, 18, 4, 33);
    const Matrix& A = inst.ensemble.A;
    const Vector& y = inst.ensemble.y;
    const Index j0 = inst.signal.support[0];
    const ReducedProblem rp = build_reduced_problem(A, y, j0, 1.0);

    const double t = 1.0 / y.dot(A * inst.signal.values);
    Vector z = Vector::Zero(17);
    for (Index r = 0; r < 17; ++r) {
        z[r] = t * inst.signal.values[rp.col_map[static_cast<std::size_t>(r)]];
    }
    CHECK(match_step(z, rp, Variant::L2).norm() <= 1e-9);
    CHECK(match_step(z, rp, Variant::L1).norm() <= 1e-9);
}

TEST_CASE("identify_step ordering, ties, exclusions") {
    Vector h(3);
    h << 0.1, -5.0, 2.0;
    CHECK(identify_step(h, {}, 1) == std::vector<Index>{1});
    CHECK(identify_step(h, {}, 2) == std::vector<Index>{1, 2});
    CHECK(identify_step(h, {}, 3) == std::vector<Index>{1, 2, 0});

    Vector tie(2);
    tie << 3.0, 3.0;
    CHECK(identify_step(tie, {}, 1) == std::vector<Index>{0});

    Vector h3(3);
    h3 << 1.0, 2.0, 3.0;
    CHECK(identify_step(h3, {2}, 1) == std::vector<Index>{1});

    Vector hz(3);
    hz << 0.0, 0.0, 5.0;
    CHECK(identify_step(hz, {}, 2) == std::vector<Index>{2});
    CHECK(identify_step(Vector(Vector::Zero(3)), {}, 2).empty());

    CHECK_THROWS_AS(identify_step(h3, {}, 0), DimensionError);
    CHECK_THROWS_AS(identify_step(h3, {0, 1}, 2), DimensionError);
}

TEST_CASE("a planted 1-sparse signal converges before any greedy step") {
    const Instance inst = make_instance(200, 50, 1, 7);
    StrmpConfig cfg;
    cfg.s = 3;
    const RecoveryResult res = run_strmp(inst.ensemble.A, inst.ensemble.y, cfg);
    CHECK(res.converged);
    CHECK(res.iterations == 0);
    REQUIRE(res.per_iteration_trace.size() == 1);
    CHECK(res.per_iteration_trace[0].index == inst.signal.support[0]);
    CHECK(res.support == inst.signal.support);
    CHECK(res.final_residual < default_epsilon(200, 1.0));

    const auto cert = certify_solution(res.x_raw, inst.ensemble.A, inst.ensemble.y, 3, 1.0);
    CHECK(cert.consistent);
    CHECK(cert.normalization_gap <= 1e-9);
}

TEST_CASE("a rank-deficient two-column instance stagnates honestly") {
    Matrix A(3, 2);
    A << 1.0, 2.0, 2.0, 4.0, -1.0, -2.0;  // second column is 2x the first
    Vector y(3);
    y << 1.0, 1.0, 1.0;
    StrmpConfig cfg;
    cfg.s = 2;
    cfg.c0 = 1.0;
    const RecoveryResult res = run_strmp(A, y, cfg);
    CHECK_FALSE(res.converged);
    CHECK(res.iterations == 0);
    CHECK(res.final_residual == doctest::Approx(0.25));  // c0^2 / 4
    REQUIRE(res.per_iteration_trace.size() == 1);
    CHECK(res.per_iteration_trace[0].index == 1);
    CHECK(res.support == std::vector<Index>{1});
    CHECK(res.x_unit[1] == doctest::Approx(1.0));
}

TEST_CASE("run_strmp recovers planted supports and certifies consistency") {
    for (std::uint64_t seed : {401u, 402u, 403u}) {
        const Instance inst = make_instance(400, 100, 5, seed);
        StrmpConfig cfg;
        cfg.s = 5;
        const RecoveryResult res = run_strmp(inst.ensemble.A, inst.ensemble.y, cfg);
        CHECK(res.converged);
        CHECK(res.support.size() <= 5);
        CHECK(std::abs(res.x_unit.norm() - 1.0) <= 1e-12);
        CHECK(res.support == support_of(res.x_unit));

        const auto cert = certify_solution(res.x_raw, inst.ensemble.A, inst.ensemble.y, 5, 1.0);
        CHECK(cert.consistent);
        CHECK(cert.sparsity_ok);
        CHECK(cert.normalization_gap <= 1e-9);
    }
}

TEST_CASE("trace starts at the pivot and the residual never increases") {
    const Instance inst = make_instance(300, 80, 6, 55);
    StrmpConfig cfg;
    cfg.s = 6;
    const RecoveryResult res = run_strmp(inst.ensemble.A, inst.ensemble.y, cfg);

    REQUIRE(!res.per_iteration_trace.empty());
    CHECK(res.per_iteration_trace[0].index ==
          select_first_index(inst.ensemble.A, inst.ensemble.y));

    for (std::size_t k = 1; k < res.per_iteration_trace.size(); ++k) {
        const double prev = res.per_iteration_trace[k - 1].residual;
        const double cur = res.per_iteration_trace[k].residual;
        CHECK(cur <= prev + 1e-8 * (1.0 + prev));
    }

    // every post-pivot trace index is a distinct original coordinate != j0
    std::vector<Index> seen;
    for (std::size_t k = 1; k < res.per_iteration_trace.size(); ++k) {
        const Index idx = res.per_iteration_trace[k].index;
        CHECK(idx != res.per_iteration_trace[0].index);
        CHECK(std::find(seen.begin(), seen.end(), idx) == seen.end());
        seen.push_back(idx);
    }
}

TEST_CASE("multi-atom identification respects the sparsity budget") {
    const Instance inst = make_instance(250, 70, 8, 66);
    StrmpConfig cfg;
    cfg.s = 4;
    cfg.atoms_per_iteration = 2;
    const RecoveryResult res = run_strmp(inst.ensemble.A, inst.ensemble.y, cfg);
    CHECK(res.support.size() <= 4);
    CHECK(res.per_iteration_trace.size() <= 4);  // pivot + at most s-1 additions

    StrmpConfig cfg1;
    cfg1.s = 1;
    const RecoveryResult res1 = run_strmp(inst.ensemble.A, inst.ensemble.y, cfg1);
    CHECK(res1.iterations == 0);
    CHECK(res1.support ==
          std::vector<Index>{select_first_index(inst.ensemble.A, inst.ensemble.y)});
}

TEST_CASE("unit-normalized output is invariant to c0 when the solver tolerance is pinned") {
    for (int t = 0; t < 10; ++t) {
        const Instance inst = make_instance(120, 60, 4, derive_seed(500, t));
        StrmpConfig cfg1;
        cfg1.s = 4;
        cfg1.c0 = 1.0;
        cfg1.solver_tol = 1e-10;
        StrmpConfig cfg10 = cfg1;
        cfg10.c0 = 10.0;

        const RecoveryResult r1 = run_strmp(inst.ensemble.A, inst.ensemble.y, cfg1);
        const RecoveryResult r10 = run_strmp(inst.ensemble.A, inst.ensemble.y, cfg10);

        REQUIRE(r1.per_iteration_trace.size() == r10.per_iteration_trace.size());
        for (std::size_t k = 0; k < r1.per_iteration_trace.size(); ++k) {
            CHECK(r1.per_iteration_trace[k].index == r10.per_iteration_trace[k].index);
            const double scaled = 100.0 * r1.per_iteration_trace[k].residual;
            CHECK(std::abs(r10.per_iteration_trace[k].residual - scaled) <=
                  1e-6 * (1.0 + scaled));
        }
        CHECK((r1.x_unit - r10.x_unit).norm() <= 1e-8);
        CHECK(r1.support == r10.support);
    }
}

TEST_CASE("the l1 variant also reaches consistent recoveries") {
    const Instance inst = make_instance(300, 60, 4, 89);
    StrmpConfig cfg;
    cfg.s = 4;
    cfg.variant = Variant::L1;
    const RecoveryResult res = run_strmp(inst.ensemble.A, inst.ensemble.y, cfg);
    CHECK(res.support.size() <= 4);
    CHECK(std::abs(res.x_unit.norm() - 1.0) <= 1e-12);

    const auto cert = certify_solution(res.x_raw, inst.ensemble.A, inst.ensemble.y, 4, 1.0);
    CHECK(cert.hamming_mismatches <= 1);
}

TEST_CASE("input validation") {
    const Instance inst = make_instance(30, 10, 2, 3);
    StrmpConfig cfg;
    cfg.s = 2;

    Vector bad_y = inst.ensemble.y;
    bad_y[0] = 0.5;
    CHECK_THROWS_AS(run_strmp(inst.ensemble.A, bad_y, cfg), std::invalid_argument);

    StrmpConfig bad = cfg;
    bad.s = 0;
    CHECK_THROWS_AS(run_strmp(inst.ensemble.A, inst.ensemble.y, bad), std::invalid_argument);
    bad = cfg;
    bad.s = 11;
    CHECK_THROWS_AS(run_strmp(inst.ensemble.A, inst.ensemble.y, bad), std::invalid_argument);
    bad = cfg;
    bad.atoms_per_iteration = 0;
    CHECK_THROWS_AS(run_strmp(inst.ensemble.A, inst.ensemble.y, bad), std::invalid_argument);
    bad = cfg;
    bad.c0 = 0.0;
    CHECK_THROWS_AS(run_strmp(inst.ensemble.A, inst.ensemble.y, bad), std::invalid_argument);
}

TEST_CASE("default_epsilon formula") {
    CHECK(default_epsilon(100, 1.0) == doctest::Approx(1e-10));
    CHECK(default_epsilon(100, 10.0) == doctest::Approx(1e-8));
}
