#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "moreau/check_report.hpp"
#include "moreau/envelope.hpp"
#include "moreau/errors.hpp"
#include "moreau/problem.hpp"
#include "moreau/vec.hpp"

namespace moreau {

/// Lipschitz bound for the map S(z) = z + (lambda - gamma) grad e_gamma f(z):
///   L = 1 + ((lambda - gamma)/gamma) (1 + 1/(1 - gamma*rho)).
inline double contraction_lipschitz(double gamma, double lambda, double rho) {
    return 1.0 + ((lambda - gamma) / gamma) * (1.0 + 1.0 / (1.0 - gamma * rho));
}

/// Squared contraction factor of the relaxed iteration: kappa = 1 - 2 sigma + sigma^2 L^2,
/// in (0, 1) whenever 0 < sigma < 2/L^2 and L > 1.
inline double contraction_kappa(double sigma, double L) {
    return 1.0 - 2.0 * sigma + sigma * sigma * L * L;
}

/// Constants governing the inner fixed-point solve for one (gamma, lambda)
/// pair: L bounds S, sigma relaxes the iteration, sqrt(kappa) is the
/// contraction ratio, beta is the admissible radius for outer iterates,
/// delta the radius on which the envelope is assumed convex.
struct ContractionConstants {
    double L = 0.0;
    double sigma = 0.0;
    double kappa = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double lambda = 0.0;
    double rho = 0.0;
    double delta = 0.0;
};

/// Computes L, sigma, kappa and beta for one step-size pair. With no
/// explicit sigma the policy sigma = 1/L^2 is used, the minimizer of
/// kappa(sigma), giving kappa = 1 - 1/L^2. beta carries a 0.9 safety
/// factor against its strict upper bound min{delta, delta/sigma (1 - sqrt(kappa))}.
inline ContractionConstants derive_constants(double gamma, double lambda, double rho, double delta,
                                             std::optional<double> explicit_sigma = std::nullopt) {
    if (!(gamma > 0.0)) throw ScheduleError("0 < gamma violated");
    if (!(2.0 * gamma < lambda))
        throw ScheduleError("2*gamma < lambda violated (2*" + format_double(gamma) + " >= " +
                            format_double(lambda) + ")");
    if (!(lambda * rho < 1.0))
        throw ScheduleError("lambda < 1/rho violated (lambda=" + format_double(lambda) +
                            ", rho=" + format_double(rho) + ")");
    if (!(delta > 0.0)) throw ParameterError("delta > 0 violated");

    ContractionConstants cc;
    cc.gamma = gamma;
    cc.lambda = lambda;
    cc.rho = rho;
    cc.delta = delta;
    cc.L = contraction_lipschitz(gamma, lambda, rho);
    const double sigma_max = 2.0 / (cc.L * cc.L);
    if (explicit_sigma) {
        if (!(*explicit_sigma > 0.0) || !(*explicit_sigma < sigma_max))
            throw ParameterError("sigma < 2/L^2 violated (sigma=" + format_double(*explicit_sigma) +
                                 ", 2/L^2=" + format_double(sigma_max) + ")");
        cc.sigma = *explicit_sigma;
    } else {
        cc.sigma = 1.0 / (cc.L * cc.L);
    }
    cc.kappa = contraction_kappa(cc.sigma, cc.L);
    cc.beta = 0.9 * std::min(delta, (delta / cc.sigma) * (1.0 - std::sqrt(cc.kappa)));
    return cc;
}

/// S(z) = z + (lambda - gamma) grad e_gamma f(z). Monotone and L-Lipschitz
/// on B[x_bar, delta] when the envelope is convex there; the implicit
/// iterate of the outer algorithm is the z solving S(z) = x.
inline Vec S_map(const Vec& z, const ContractionConstants& cc, const Problem& p, double tol) {
    const Vec g = envelope_gradient({p, cc.gamma, z, cc.delta}, tol);
    return axpy(z, cc.lambda - cc.gamma, g);
}

/// Relaxed fixed-point map Phi(z) = z - sigma (S(z) - x); a strict
/// contraction with ratio sqrt(kappa).
inline Vec phi_map(const Vec& z, const Vec& x, const ContractionConstants& cc, const Problem& p,
                   double tol) {
    const Vec s = S_map(z, cc, p, tol);
    return axpy(z, -cc.sigma, sub(s, x));
}

/// Output of one inner solve: z solves S(z) = x to `residual`
/// (= ||z - x + (lambda-gamma) grad e_gamma f(z)||), and
/// y = z - gamma (lambda-gamma)^{-1} (x - z) recovers the prox of x, with
/// (lambda-gamma)^{-1}(x-z) = gamma^{-1}(z-y) = lambda^{-1}(x-y) holding by
/// construction.
struct InnerSolveResult {
    Vec x;   // query point (echoed for downstream checks)
    Vec z;
    Vec y;
    std::int64_t inner_iterations = 0;
    double residual = 0.0;
    double contraction_ratio_observed = 0.0;
};

/// Iteration cap implied by the contraction ratio: enough Phi steps to
/// shrink an initial error of 2*delta below tol, plus margin.
inline std::int64_t contraction_iteration_cap(const ContractionConstants& cc, double tol) {
    const double ratio = tol / (cc.sigma * 2.0 * cc.delta);
    if (ratio >= 1.0) return 10;
    const double steps = std::log(ratio) / std::log(std::sqrt(cc.kappa));
    return static_cast<std::int64_t>(std::ceil(steps)) + 10;
}

/// Solves z = x - (lambda - gamma) grad e_gamma f(z) by iterating Phi from
/// z0 (default x), stopping when ||S(z) - x|| <= tol. Enforces the locality
/// discipline: x must start in B[x_bar, beta], z must stay in B[x_bar, delta]
/// (strictly, with margin tol, at termination), and the recovered y must lie
/// in B[x_bar, beta + tol*lambda/(lambda-gamma)].
inline InnerSolveResult solve_fixed_point(const Vec& x, const ContractionConstants& cc,
                                          const Problem& p, const Vec& x_bar, double tol,
                                          std::int64_t max_iter = -1,
                                          const Vec* z0 = nullptr) {
    if (!(tol > 0.0)) throw ParameterError("tol > 0 violated");
    if (distance(x, x_bar) > cc.beta)
        throw PreconditionError("x in B[x_bar, beta] violated (||x - x_bar|| = " +
                                format_double(distance(x, x_bar)) + " > beta = " +
                                format_double(cc.beta) + ")");
    if (z0 && distance(*z0, x_bar) > cc.delta)
        throw PreconditionError("z0 in B[x_bar, delta] violated");
    if (max_iter < 0) max_iter = contraction_iteration_cap(cc, tol);

    Vec z = z0 ? *z0 : x;
    double residual = std::numeric_limits<double>::infinity();
    double best_residual = residual;
    Vec best_z = z;
    double prev_step = -1.0;
    double ratio_observed = 0.0;
    std::int64_t iterations = 0;
    bool converged = false;

    // Envelope evaluations run a decade tighter than the outer tolerance so
    // their noise cannot stall the residual just above tol.
    const double inner_tol = 0.1 * tol;
    for (std::int64_t j = 0; j <= max_iter; ++j) {
        const Vec s = S_map(z, cc, p, inner_tol);
        residual = distance(s, x);
        if (residual < best_residual) {
            best_residual = residual;
            best_z = z;
        }
        if (residual <= tol) {
            converged = true;
            break;
        }
        if (j == max_iter) break;
        const Vec z_next = axpy(z, -cc.sigma, sub(s, x));
        const double step = distance(z_next, z);
        if (prev_step > 1e-300) ratio_observed = std::max(ratio_observed, step / prev_step);
        prev_step = step;
        if (distance(z_next, x_bar) > cc.delta)
            throw LocalityError("fixed-point iterate left B[x_bar, delta]: ||z - x_bar|| = " +
                                format_double(distance(z_next, x_bar)) + " > delta = " +
                                format_double(cc.delta) + " (beta/delta misconfigured)");
        z = z_next;
        ++iterations;
    }
    if (!converged)
        throw NonconvergenceError("fixed-point iteration did not reach tol within " +
                                      std::to_string(max_iter) + " iterations; best residual " +
                                      format_double(best_residual),
                                  best_z, best_residual);
    if (distance(z, x_bar) >= cc.delta - tol)
        throw LocalityError("fixed point is not strictly interior to B(x_bar, delta) "
                            "(margin tol); beta/delta misconfigured");

    InnerSolveResult r;
    r.x = x;
    r.z = z;
    r.y = axpy(z, -cc.gamma / (cc.lambda - cc.gamma), sub(x, z));
    r.inner_iterations = iterations;
    r.residual = residual;
    r.contraction_ratio_observed = ratio_observed;
    const double y_slack = cc.beta + tol * cc.lambda / (cc.lambda - cc.gamma);
    if (distance(r.y, x_bar) > y_slack)
        throw LocalityError("recovered prox left B[x_bar, beta]: ||y - x_bar|| = " +
                            format_double(distance(r.y, x_bar)));
    return r;
}

/// Recomputes P_lambda f(x) through the envelope module (grid oracle for
/// n <= 2, numerical otherwise) and checks ||y - P_lambda f(x)|| against
/// 10*tol/(1 - lambda*rho) plus the oracle resolution.
inline CheckReport verify_prox_identity(const InnerSolveResult& result, const Problem& p,
                                        const ContractionConstants& cc, double tol,
                                        double grid_step = 1e-6) {
    ProxQuery q{p, cc.lambda, result.x, cc.delta + cc.beta};
    Vec reference;
    double resolution = 0.0;
    if (p.dimension <= 2) {
        reference = prox_grid_oracle(q, grid_step).y;
        resolution = grid_step;
    } else {
        reference = prox(q, tol).y;
        resolution = tol * cc.lambda;
    }
    const double bound = 10.0 * tol / (1.0 - cc.lambda * cc.rho) + resolution;
    const double err = distance(result.y, reference);
    CheckReport rep;
    rep.name = "prox-identity";
    rep.samples_used = 1;
    rep.worst_violation = err - bound;
    rep.passed = rep.worst_violation <= 0.0;
    rep.witness = "x=" + format_point(result.x, ',') + ";y=" + format_point(result.y, ',') +
                  ";reference=" + format_point(reference, ',');
    return rep;
}

}  // namespace moreau
