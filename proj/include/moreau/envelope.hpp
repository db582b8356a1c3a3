#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "moreau/check_report.hpp"
#include "moreau/errors.hpp"
#include "moreau/problem.hpp"
#include "moreau/rng.hpp"
#include "moreau/vec.hpp"

namespace moreau {

/// One evaluation of P_lambda f / e_lambda f at x. `search_radius`
/// localizes the argmin to B[x, search_radius] (intersected with the
/// instance region); the caller owns this radius, typically the locality
/// radius delta of the surrounding run.
struct ProxQuery {
    const Problem& problem;
    double lambda = 0.0;
    Vec x;
    double search_radius = 0.0;
};

enum class ProxMethod { analytic, numerical, grid };

inline const char* to_string(ProxMethod m) {
    switch (m) {
        case ProxMethod::analytic: return "analytic";
        case ProxMethod::numerical: return "numerical";
        default: return "grid";
    }
}

/// Result of a prox evaluation. By construction
///   envelope_value = f(y) + ||y - x||^2 / (2 lambda)
///   gradient       = (x - y) / lambda
/// and `residual` certifies the inner optimality of y (0 for the analytic
/// path; distance from 0 to the bracketing subgradient interval for the
/// 1-D numerical path; subproblem subgradient norm for n >= 2).
struct ProxResult {
    Vec y;
    double envelope_value = 0.0;
    Vec gradient;
    ProxMethod method = ProxMethod::numerical;
    double residual = 0.0;
};

namespace detail {

// Subproblem h(y) = f(y) + ||y - x||^2 / (2 lambda); strongly convex with
// modulus 1/lambda - rho on the region where f is rho-weakly convex.
inline double subproblem_value(const Problem& p, double lambda, const Vec& x, const Vec& y) {
    return checked_value(p, y) + squared_norm(sub(y, x)) / (2.0 * lambda);
}

inline void validate_prox_query(const ProxQuery& q) {
    validate_problem(q.problem);
    if (!(q.lambda > 0.0)) throw ParameterError("lambda > 0 violated");
    if (!(q.lambda * q.problem.rho < 1.0))
        throw ParameterError("lambda*rho < 1 violated (lambda=" + format_double(q.lambda) +
                             ", rho=" + format_double(q.problem.rho) + ")");
    if (!(q.search_radius > 0.0)) throw ParameterError("search_radius > 0 violated");
    if (q.x.size() != static_cast<std::size_t>(q.problem.dimension))
        throw PreconditionError("query point dimension does not match problem");
    if (!q.problem.region.contains(q.x))
        throw PreconditionError("query point x outside problem region");
}

// Search interval for coordinate i: B[x, R] clipped to the region, so the
// subproblem is only ever evaluated where the weak-convexity certificate
// applies.
inline std::pair<double, double> search_interval(const ProxQuery& q, std::size_t i) {
    auto [rlo, rhi] = q.problem.region.coordinate_bounds(i);
    const double lo = std::max(q.x[i] - q.search_radius, rlo);
    const double hi = std::min(q.x[i] + q.search_radius, rhi);
    if (!(lo < hi))
        throw PreconditionError("search interval around x is empty in coordinate " +
                                std::to_string(i));
    return {lo, hi};
}

// 1-D inner solver. The subproblem derivative s(y) = f'(y) + (y - x)/lambda
// is a monotone selection (strong convexity), so a sign-change bracket
// localizes the unique minimizer; bisection converges geometrically and
// lands on subdifferential kinks exactly. Returns (y, residual) with
// residual the distance from 0 to the final bracket's subgradient interval.
inline std::pair<Vec, double> prox_bisection_1d(const ProxQuery& q, double tol) {
    const Problem& p = q.problem;
    auto slope = [&](double y) {
        const Vec g = checked_subgradient(p, {y});
        return g[0] + (y - q.x[0]) / q.lambda;
    };
    auto [lo, hi] = search_interval(q, 0);
    double slo = slope(lo);
    double shi = slope(hi);
    if (slo >= 0.0) {
        if (slo == 0.0) return {{lo}, 0.0};
        throw NonconvergenceError(
            "prox minimizer is at or beyond the search boundary (increase search_radius); "
            "best residual " + format_double(slo),
            {lo}, slo);
    }
    if (shi <= 0.0) {
        if (shi == 0.0) return {{hi}, 0.0};
        throw NonconvergenceError(
            "prox minimizer is at or beyond the search boundary (increase search_radius); "
            "best residual " + format_double(-shi),
            {hi}, -shi);
    }
    const double width_target =
        std::max(tol * q.lambda, 8.0 * std::numeric_limits<double>::epsilon() *
                                     (1.0 + std::abs(q.x[0])));
    for (int it = 0; it < 200 && hi - lo > width_target; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // interval at rounding floor
        const double sm = slope(mid);
        if (sm == 0.0) return {{mid}, 0.0};
        if (sm < 0.0) {
            lo = mid;
            slo = sm;
        } else {
            hi = mid;
            shi = sm;
        }
    }
    // slo <= 0 <= shi: zero lies in the bracket's subgradient interval.
    const double residual = std::max(0.0, std::max(slo, -shi));
    return {{0.5 * (lo + hi)}, residual};
}

// n-D inner solver: proximal-subgradient iteration on the DC structure.
// The concave quadratic -rho/2 ||y||^2 enters through the subgradient
// (f' = xi' - rho y), the coupling ||y - x||^2 / (2 lambda) is handled by
// its exact prox. Base step 1/(1/lambda + rho), halved whenever consecutive
// displacements reverse direction (a constant step limit-cycles across
// subdifferential jumps). Optimality is certified through the subproblem
// subgradient norm, so queries whose minimizer sits exactly on a kink in
// dimension >= 2 end in NonconvergenceError (use an analytic prox or
// dimension 1 for those).
inline std::pair<Vec, double> prox_subgradient_nd(const ProxQuery& q, double tol) {
    const Problem& p = q.problem;
    const std::size_t n = q.x.size();
    const double lambda = q.lambda;
    const double t0 = 1.0 / (1.0 / lambda + p.rho);
    const double t_floor = t0 * std::ldexp(1.0, -52);

    std::vector<std::pair<double, double>> bounds(n);
    for (std::size_t i = 0; i < n; ++i) bounds[i] = search_interval(q, i);
    auto project = [&](Vec& y) {
        for (std::size_t i = 0; i < n; ++i) y[i] = std::clamp(y[i], bounds[i].first, bounds[i].second);
    };

    Vec y = q.x;
    project(y);
    Vec prev_step(n, 0.0);
    Vec best_y = y;
    double best_res = std::numeric_limits<double>::infinity();
    double t = t0;
    const std::int64_t cap = 100000;
    for (std::int64_t j = 0; j < cap; ++j) {
        const Vec v = checked_subgradient(p, y);
        const double res = norm(axpy(v, 1.0 / lambda, sub(y, q.x)));
        if (res < best_res) {
            best_res = res;
            best_y = y;
        }
        if (res <= tol) return {y, res};
        Vec y_next(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double u = y[i] - t * v[i];
            y_next[i] = (lambda * u + t * q.x[i]) / (lambda + t);
        }
        project(y_next);
        const Vec step = sub(y_next, y);
        if (j > 0 && dot(step, prev_step) < 0.0) t = std::max(0.5 * t, t_floor);
        if (norm(step) == 0.0 && t <= t_floor) break;  // stalled at rounding floor
        prev_step = step;
        y = y_next;
    }
    throw NonconvergenceError(
        "prox inner solver did not certify optimality within its iteration cap; best residual " +
            format_double(best_res),
        best_y, best_res);
}

inline ProxResult finish_prox(const ProxQuery& q, Vec y, ProxMethod method, double residual) {
    ProxResult r;
    r.envelope_value = subproblem_value(q.problem, q.lambda, q.x, y);
    r.gradient = scale(1.0 / q.lambda, sub(q.x, y));
    r.y = std::move(y);
    r.method = method;
    r.residual = residual;
    return r;
}

}  // namespace detail

/// Evaluates P_lambda f(x) as the unique local minimizer of
/// f(y) + ||y - x||^2 / (2 lambda) over B[x, search_radius] (clipped to the
/// instance region). Dispatch: the instance's analytic prox when defined and
/// valid at (lambda, x), otherwise the numerical inner solver. Requires
/// lambda * rho < 1, which makes the subproblem strongly convex.
inline ProxResult prox(const ProxQuery& q, double tol) {
    detail::validate_prox_query(q);
    if (!(tol > 0.0)) throw ParameterError("tol > 0 violated");
    const Problem& p = q.problem;
    if (p.analytic_prox && p.analytic_prox->valid(q.lambda, q.x)) {
        Vec y = p.analytic_prox->eval(q.lambda, q.x);
        return detail::finish_prox(q, std::move(y), ProxMethod::analytic, 0.0);
    }
    if (p.dimension == 1) {
        auto [y, res] = detail::prox_bisection_1d(q, tol);
        return detail::finish_prox(q, std::move(y), ProxMethod::numerical, res);
    }
    auto [y, res] = detail::prox_subgradient_nd(q, tol);
    return detail::finish_prox(q, std::move(y), ProxMethod::numerical, res);
}

/// e_lambda f(x) = f(P_lambda f(x)) + ||P_lambda f(x) - x||^2 / (2 lambda).
inline double envelope_value(const ProxQuery& q, double tol) { return prox(q, tol).envelope_value; }

/// grad e_lambda f(x) = (x - P_lambda f(x)) / lambda.
inline Vec envelope_gradient(const ProxQuery& q, double tol) { return prox(q, tol).gradient; }

/// Brute-force prox oracle for dimensions 1 and 2: exhaustive minimization
/// of the subproblem over a lattice of pitch `step` on B[x, search_radius]
/// (clipped to the region), followed by one ternary-search refinement per
/// coordinate. Value-oracle only, independent of the subgradient-based
/// numerical path; test code uses it as the ground truth.
inline ProxResult prox_grid_oracle(const ProxQuery& q, double step) {
    detail::validate_prox_query(q);
    if (!(step > 0.0)) throw ParameterError("step > 0 violated");
    const Problem& p = q.problem;
    if (p.dimension > 2)
        throw UnsupportedDimensionError("grid oracle supports dimension <= 2, got " +
                                        std::to_string(p.dimension));

    auto h = [&](const Vec& y) { return detail::subproblem_value(p, q.lambda, q.x, y); };

    const std::size_t n = q.x.size();
    std::vector<std::pair<double, double>> bounds(n);
    double npoints = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        bounds[i] = detail::search_interval(q, i);
        npoints *= std::floor((bounds[i].second - bounds[i].first) / step) + 1.0;
    }
    if (npoints > 2e8) throw ConfigError("grid too fine: > 2e8 lattice points");

    Vec best = q.x;
    double best_val = std::numeric_limits<double>::infinity();
    if (n == 1) {
        for (double y0 = bounds[0].first; y0 <= bounds[0].second; y0 += step) {
            const double val = h({y0});
            if (val < best_val) {
                best_val = val;
                best = {y0};
            }
        }
    } else {
        const double r2 = q.search_radius * q.search_radius;
        for (double y0 = bounds[0].first; y0 <= bounds[0].second; y0 += step) {
            const double d0 = y0 - q.x[0];
            for (double y1 = bounds[1].first; y1 <= bounds[1].second; y1 += step) {
                const double d1 = y1 - q.x[1];
                if (d0 * d0 + d1 * d1 > r2) continue;
                const double val = h({y0, y1});
                if (val < best_val) {
                    best_val = val;
                    best = {y0, y1};
                }
            }
        }
    }

    // One ternary pass per coordinate inside +-step of the lattice argmin.
    double bracket = step;
    for (std::size_t i = 0; i < n; ++i) {
        double a = std::max(best[i] - step, bounds[i].first);
        double b = std::min(best[i] + step, bounds[i].second);
        Vec probe = best;
        for (int it = 0; it < 200 && b - a > 1e-15 * (1.0 + std::abs(best[i])); ++it) {
            const double m1 = a + (b - a) / 3.0;
            const double m2 = b - (b - a) / 3.0;
            probe[i] = m1;
            const double v1 = h(probe);
            probe[i] = m2;
            const double v2 = h(probe);
            if (v1 < v2)
                b = m2;
            else
                a = m1;
        }
        best[i] = 0.5 * (a + b);
        bracket = b - a;
    }
    return detail::finish_prox(q, std::move(best), ProxMethod::grid, bracket);
}

/// Samples pairs (u, v) in B[center, radius] and checks the prox Lipschitz
/// bound ||P_gamma f(u) - P_gamma f(v)|| <= ||u - v|| / (1 - gamma*rho),
/// slack 1e-8.
inline CheckReport check_prox_lipschitz(const Problem& p, double gamma, const Vec& center,
                                        double radius, std::int64_t pairs, std::uint64_t seed,
                                        double tol = 1e-10, double search_radius = 1.0) {
    validate_problem(p);
    if (!(gamma * p.rho < 1.0)) throw ParameterError("gamma*rho < 1 violated");
    constexpr double kSlack = 1e-8;
    Rng rng = Rng(seed).child("prox-lipschitz");
    const double lip = 1.0 / (1.0 - gamma * p.rho);

    CheckReport rep;
    rep.name = "prox-lipschitz";
    rep.samples_used = pairs;
    rep.worst_violation = -std::numeric_limits<double>::infinity();
    for (std::int64_t s = 0; s < pairs; ++s) {
        const Vec u = sample_ball(rng, center, radius);
        const Vec v = sample_ball(rng, center, radius);
        const Vec pu = prox({p, gamma, u, search_radius}, tol).y;
        const Vec pv = prox({p, gamma, v, search_radius}, tol).y;
        const double viol = distance(pu, pv) - lip * distance(u, v);
        if (viol > rep.worst_violation) {
            rep.worst_violation = viol;
            rep.witness = "u=" + format_point(u, ',') + ";v=" + format_point(v, ',');
        }
    }
    rep.passed = rep.worst_violation <= kSlack;
    return rep;
}

}  // namespace moreau
