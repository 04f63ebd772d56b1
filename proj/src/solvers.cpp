#include "obcs/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <utility>

#include "obcs/errors.hpp"

namespace obcs {

namespace {

constexpr double kArmijoC = 1e-4;
constexpr int kMaxHalvings = 60;

Matrix gather_columns(const SubproblemSpec& spec) {
    Matrix Cact(spec.C.rows(), static_cast<Index>(spec.active_set.size()));
    for (std::size_t k = 0; k < spec.active_set.size(); ++k) {
        Cact.col(static_cast<Index>(k)) = spec.C.col(spec.active_set[k]);
    }
    return Cact;
}

Vector gather_active(const Vector& z_full, const std::vector<Index>& active) {
    Vector za(static_cast<Index>(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k) {
        za[static_cast<Index>(k)] = z_full[active[k]];
    }
    return za;
}

Vector scatter_active(const Vector& za, const std::vector<Index>& active, Index full_len) {
    Vector z = Vector::Zero(full_len);
    for (std::size_t k = 0; k < active.size(); ++k) {
        z[active[k]] = za[static_cast<Index>(k)];
    }
    return z;
}

Vector residual_at(const Vector& z_active, const SubproblemSpec& spec) {
    Vector r = spec.d;
    for (std::size_t k = 0; k < spec.active_set.size(); ++k) {
        const double zk = z_active[static_cast<Index>(k)];
        if (zk != 0.0) r += zk * spec.C.col(spec.active_set[k]);
    }
    return r;
}

double l2_of_truncated(const Vector& r) { return r.cwiseMin(0.0).squaredNorm(); }

double l1_of_truncated(const Vector& r) {
    double f = 0.0;
    for (Index i = 0; i < r.size(); ++i) {
        if (r[i] < 0.0) f -= r[i];
    }
    return f;
}

// sign((r)_-) with sign(0) = 0: -1 on strictly violated rows, 0 elsewhere.
Vector violation_signs(const Vector& r) {
    Vector s = Vector::Zero(r.size());
    for (Index i = 0; i < r.size(); ++i) {
        if (r[i] < 0.0) s[i] = -1.0;
    }
    return s;
}

// Exact minimizer over alpha >= 0 of sum_i max(0, -(r_i + alpha w_i)), a
// convex piecewise-linear function of alpha; returns 0 when the ray does
// not descend. The slope jumps where a row crosses zero, so a sorted sweep
// over those breakpoints finds the first nonnegative-slope piece.
double ray_minimizer(const Vector& r, const Vector& w) {
    double slope = 0.0;  // right derivative at alpha = 0
    for (Index i = 0; i < r.size(); ++i) {
        if (r[i] < 0.0) slope -= w[i];
    }
    if (slope >= 0.0) return 0.0;

    std::vector<std::pair<double, double>> jumps;  // (breakpoint, slope increase)
    for (Index i = 0; i < r.size(); ++i) {
        if (w[i] == 0.0) continue;
        const double a = -r[i] / w[i];
        if (a <= 0.0) continue;
        if (r[i] >= 0.0 && w[i] < 0.0) {
            jumps.emplace_back(a, -w[i]);  // row becomes violated past a
        } else if (r[i] < 0.0 && w[i] > 0.0) {
            jumps.emplace_back(a, w[i]);  // row becomes satisfied past a
        }
    }
    std::sort(jumps.begin(), jumps.end());
    double alpha = 0.0;
    for (const auto& [a, jump] : jumps) {
        alpha = a;
        slope += jump;
        if (slope >= 0.0) break;
    }
    return alpha;
}

void check_init(const SubproblemSpec& spec, const Vector& z_init, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("solver tolerance must be positive");
    if (z_init.size() != spec.C.cols()) {
        throw DimensionError("z_init must have the reduced problem's length");
    }
    if (spec.d.size() != spec.C.rows()) {
        throw DimensionError("d length must match C rows");
    }
}

}  // namespace

double objective_l2(const Vector& z_active, const SubproblemSpec& spec) {
    return l2_of_truncated(residual_at(z_active, spec));
}

Vector gradient_l2(const Vector& z_active, const SubproblemSpec& spec) {
    const Vector rt = residual_at(z_active, spec).cwiseMin(0.0);
    Vector g(static_cast<Index>(spec.active_set.size()));
    for (std::size_t k = 0; k < spec.active_set.size(); ++k) {
        g[static_cast<Index>(k)] = 2.0 * spec.C.col(spec.active_set[k]).dot(rt);
    }
    return g;
}

double objective_l1(const Vector& z_active, const SubproblemSpec& spec) {
    return l1_of_truncated(residual_at(z_active, spec));
}

Vector subgradient_l1(const Vector& z_active, const SubproblemSpec& spec) {
    const Vector s = violation_signs(residual_at(z_active, spec));
    Vector g(static_cast<Index>(spec.active_set.size()));
    for (std::size_t k = 0; k < spec.active_set.size(); ++k) {
        g[static_cast<Index>(k)] = spec.C.col(spec.active_set[k]).dot(s);
    }
    return g;
}

double default_l2_tol(const Vector& d) { return 1e-10 * std::max(1.0, d.squaredNorm()); }

double default_l1_tol(const Vector& d) { return 1e-10 * std::max(1.0, d.lpNorm<1>()); }

SolverReport bb_minimize(const SubproblemSpec& spec, const Vector& z_init,
                         double tol, Index max_iter) {
    check_init(spec, z_init, tol);
    const Matrix Cact = gather_columns(spec);
    const Index full_len = spec.C.cols();

    Vector za = gather_active(z_init, spec.active_set);
    Vector r = Cact * za + spec.d;
    Vector rt = r.cwiseMin(0.0);
    double f = rt.squaredNorm();
    Vector g = 2.0 * (Cact.transpose() * rt);

    Vector best_za = za;
    double best_f = f;

    Vector s_prev, y_prev;
    bool have_pair = false;

    Index iter = 0;
    bool converged = false;
    while (true) {
        const double gnorm = g.norm();
        if (!std::isfinite(f) || !std::isfinite(gnorm)) {
            throw NumericError("bb_minimize: non-finite objective or gradient", iter);
        }
        if (gnorm <= tol) {
            converged = true;
            break;
        }
        if (iter >= max_iter) break;

        const Vector dir = -g;
        const Vector r_dir = Cact * dir;
        const double gg = gnorm * gnorm;

        double alpha = 0.0;
        bool need_backtrack = true;
        if (have_pair) {
            const double sy = s_prev.dot(y_prev);
            const double yy = y_prev.squaredNorm();
            if (sy > 0.0 && yy > 0.0) {
                alpha = sy / yy;
                need_backtrack = false;
            }
        }
        Vector r_new;
        double f_new = f;
        if (need_backtrack) {
            alpha = 1.0;
            for (int h = 0; h < kMaxHalvings; ++h) {
                r_new = r + alpha * r_dir;
                f_new = l2_of_truncated(r_new);
                if (f_new <= f - kArmijoC * alpha * gg) break;
                alpha *= 0.5;
            }
        } else {
            r_new = r + alpha * r_dir;
            f_new = l2_of_truncated(r_new);
        }

        const Vector za_new = za + alpha * dir;
        const Vector rt_new = r_new.cwiseMin(0.0);
        const Vector g_new = 2.0 * (Cact.transpose() * rt_new);

        s_prev = za_new - za;
        y_prev = g_new - g;
        have_pair = true;

        za = za_new;
        r = r_new;
        f = f_new;
        g = g_new;
        ++iter;

        if (f < best_f) {
            best_f = f;
            best_za = za;
        }
    }

    // The raw BB iteration is nonmonotone; if it was cut off above the best
    // point seen, return that point instead.
    if (!converged && best_f < f) {
        za = best_za;
        r = Cact * za + spec.d;
        f = l2_of_truncated(r);
        g = 2.0 * (Cact.transpose() * r.cwiseMin(0.0));
    }

    SolverReport report;
    report.z = scatter_active(za, spec.active_set, full_len);
    report.objective_value = f;
    report.iterations = iter;
    report.converged = converged;
    report.grad_norm_final = g.norm();
    return report;
}

SolverReport l1_minimize(const SubproblemSpec& spec, const Vector& z_init,
                         double tol, Index max_iter) {
    check_init(spec, z_init, tol);
    const Matrix Cact = gather_columns(spec);
    const Index full_len = spec.C.cols();

    Vector za = gather_active(z_init, spec.active_set);
    Vector r = Cact * za + spec.d;
    double f = l1_of_truncated(r);

    Vector best_za = za;
    double best_f = f;

    // Sliding window of the running best for the improvement-based stop.
    std::deque<double> window;
    window.push_back(best_f);

    Index iter = 0;
    bool converged = false;
    while (true) {
        if (!std::isfinite(f)) {
            throw NumericError("l1_minimize: non-finite objective", iter);
        }
        if (best_f <= tol) {
            converged = true;
            break;
        }
        if (iter >= max_iter) break;
        if (window.size() > 20 && window.front() - best_f < 1e-12) break;

        const Vector g = Cact.transpose() * violation_signs(r);
        if (!g.allFinite()) {
            throw NumericError("l1_minimize: non-finite subgradient", iter);
        }
        const double gg = g.squaredNorm();
        if (gg == 0.0) break;  // zero subgradient at a kink, cannot proceed

        const Vector w = Cact * (-g);  // residual velocity along the ray
        double alpha = ray_minimizer(r, w);
        if (alpha <= 0.0) {
            // The ray does not descend (a kink); take the plain Polyak step
            // toward the known optimum value 0. It can overshoot, but the
            // best-iterate tracking keeps the returned point from regressing.
            alpha = f / gg;
        }

        za -= alpha * g;
        r += alpha * w;
        f = l1_of_truncated(r);
        ++iter;

        if (f < best_f) {
            best_f = f;
            best_za = za;
        }
        window.push_back(best_f);
        if (window.size() > 21) window.pop_front();
    }

    SolverReport report;
    report.z = scatter_active(best_za, spec.active_set, full_len);
    report.objective_value = best_f;
    report.iterations = iter;
    report.converged = converged;
    report.grad_norm_final =
        (Cact.transpose() * violation_signs(Cact * best_za + spec.d)).norm();
    return report;
}

double interior_margin(const Vector& d) { return 1e-9 * d.cwiseAbs().maxCoeff(); }

bool push_to_interior(const SubproblemSpec& spec, Vector& z, double margin) {
    if (!(margin > 0.0)) {
        throw std::invalid_argument("push_to_interior: margin must be positive");
    }
    if (z.size() != spec.C.cols()) {
        throw DimensionError("push_to_interior: z must have the reduced problem's length");
    }
    const Matrix Cact = gather_columns(spec);
    const Index k = Cact.cols();
    Vector za = gather_active(z, spec.active_set);

    // Cheap first pass: lift the low rows onto 2 * margin with minimum-norm
    // least-squares corrections. Handles the common case of a few rows left
    // on or just below the boundary.
    for (int round = 0; round < 8; ++round) {
        const Vector r = Cact * za + spec.d;
        std::vector<Index> low;
        for (Index i = 0; i < r.size(); ++i) {
            if (r[i] < margin) low.push_back(i);
        }
        if (low.empty()) {
            z = scatter_active(za, spec.active_set, spec.C.cols());
            return true;
        }
        if (k == 0 || static_cast<Index>(low.size()) > k) break;

        Matrix Cv(static_cast<Index>(low.size()), k);
        Vector rhs(static_cast<Index>(low.size()));
        for (std::size_t t = 0; t < low.size(); ++t) {
            Cv.row(static_cast<Index>(t)) = Cact.row(low[t]);
            rhs[static_cast<Index>(t)] = 2.0 * margin - r[low[t]];
        }
        const Vector delta = Cv.completeOrthogonalDecomposition().solve(rhs);
        if (!delta.allFinite()) break;
        za += delta;
    }

    // Fall back to re-solving with every row required to clear 2 * margin;
    // an epsilon-accurate solution of the shifted problem still clears the
    // original margin with room to spare.
    const Vector d_shift = spec.d.array() - 2.0 * margin;
    const SubproblemSpec shifted{spec.C, d_shift, spec.active_set, ObjectiveKind::L2};
    const SolverReport rep = bb_minimize(
        shifted, scatter_active(za, spec.active_set, spec.C.cols()), 1e-3 * margin, 500);

    const Vector r = Cact * gather_active(rep.z, spec.active_set) + spec.d;
    if (r.minCoeff() >= margin) {
        z = rep.z;
        return true;
    }
    return false;
}

}  // namespace obcs
