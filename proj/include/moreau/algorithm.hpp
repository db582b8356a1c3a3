#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "moreau/check_report.hpp"
#include "moreau/envelope.hpp"
#include "moreau/errors.hpp"
#include "moreau/fixed_point.hpp"
#include "moreau/problem.hpp"
#include "moreau/rng.hpp"
#include "moreau/vec.hpp"

namespace moreau {

/// A positive sequence given either as a constant or as explicit values;
/// explicit sequences extend past their last entry by repeating it.
struct StepSequence {
    std::vector<double> values;

    static StepSequence constant(double v) { return StepSequence{{v}}; }

    double at(std::int64_t k) const {
        if (values.empty()) throw ConfigError("empty step sequence");
        const auto i = std::min<std::int64_t>(k, static_cast<std::int64_t>(values.size()) - 1);
        return values[static_cast<std::size_t>(i)];
    }
};

/// Step-size schedule {gamma_k}, {lambda_k} with floor lambda_bar, subject to
///   0 < lambda_bar < 2*gamma_k < lambda_k < 1/rho   for all k.
struct Schedule {
    StepSequence gamma;
    StepSequence lambda;
    double lambda_bar = 0.0;
    double rho = 0.0;
};

/// Checks the four strict schedule inequalities for k = 0..horizon-1 and
/// reports the first violating index and inequality.
inline CheckReport validate_schedule(const Schedule& s, std::int64_t horizon) {
    CheckReport rep;
    rep.name = "schedule";
    rep.samples_used = horizon;
    rep.passed = true;
    rep.worst_violation = 0.0;
    auto fail = [&](std::int64_t k, const std::string& ineq, double gap) {
        rep.passed = false;
        rep.worst_violation = gap;
        rep.witness = "k=" + std::to_string(k) + ": " + ineq;
    };
    if (!(s.lambda_bar > 0.0)) {
        fail(0, "0 < lambda_bar violated (lambda_bar=" + format_double(s.lambda_bar) + ")",
             -s.lambda_bar);
        return rep;
    }
    for (std::int64_t k = 0; k < horizon; ++k) {
        const double g = s.gamma.at(k);
        const double l = s.lambda.at(k);
        if (!(s.lambda_bar < 2.0 * g)) {
            fail(k, "lambda_bar < 2*gamma violated (" + format_double(s.lambda_bar) +
                        " >= 2*" + format_double(g) + ")",
                 s.lambda_bar - 2.0 * g);
            return rep;
        }
        if (!(2.0 * g < l)) {
            fail(k, "2*gamma < lambda violated (2*" + format_double(g) + " >= " +
                        format_double(l) + ")",
                 2.0 * g - l);
            return rep;
        }
        if (!(l * s.rho < 1.0)) {
            fail(k, "lambda < 1/rho violated (lambda=" + format_double(l) + ", rho=" +
                        format_double(s.rho) + ")",
                 l * s.rho - 1.0);
            return rep;
        }
    }
    return rep;
}

/// Locality data for a run: the reference stationary point x_bar, the radius
/// delta on which the envelope is assumed convex, and the admissible iterate
/// radius beta (< delta), normally taken from derive_constants.
struct LocalityConfig {
    Vec x_bar;
    double delta = 0.0;
    double beta = 0.0;
};

struct IterationRecord {
    std::int64_t k = 0;
    Vec x_k;
    Vec z_k;
    Vec x_next;
    double f_x_next = 0.0;
    double step_norm = 0.0;
    std::int64_t inner_iterations = 0;
    double inner_residual = 0.0;
    // f(x_k) - f(x_{k+1}) - ||x_k - x_{k+1}||^2 / (2 lambda_k); nonnegative up
    // to inner tolerance by the descent inequality.
    double descent_gap = 0.0;
    bool fejer_ok = false;
    double gamma_k = 0.0;
    double lambda_k = 0.0;
};

enum class Termination { step_below_eps, max_iter, locality_violation, inner_failure };

inline const char* to_string(Termination t) {
    switch (t) {
        case Termination::step_below_eps: return "step_below_eps";
        case Termination::max_iter: return "max_iter";
        case Termination::locality_violation: return "locality_violation";
        default: return "inner_failure";
    }
}

struct RunReport {
    std::vector<IterationRecord> records;
    Termination termination = Termination::max_iter;
    std::int64_t T = 0;          // outer iterations executed (= records.size())
    double f_star_estimate = 0.0;
    std::string f_star_source;   // "certified" or "observed"
    double sum_sq_steps = 0.0;
    double complexity_bound = 0.0;  // 2 + (2/rho)(f(x0) - f*) / eps^2
    Vec x_final;
};

/// Iteration-complexity bound 2 + (2/rho)(f0 - f_star) eps^{-2} on the
/// number of outer steps before the step norm drops to eps.
inline double complexity_bound(double rho, double f0, double f_star, double eps) {
    if (!(rho > 0.0))
        throw ParameterError("rho > 0 violated in complexity bound (convex instances pass "
                             "their effective rho)");
    if (!(eps > 0.0)) throw ParameterError("eps > 0 violated");
    if (!(f0 >= f_star)) throw ParameterError("f0 >= f_star violated");
    return 2.0 + (2.0 / rho) * (f0 - f_star) / (eps * eps);
}

/// Runs the outer proximal iteration: for each k, solve the implicit
/// equation z^k = x^k - (lambda_k - gamma_k) grad e_{gamma_k} f(z^k) with the
/// contraction solver, then set x^{k+1} = z^k - gamma_k (lambda_k-gamma_k)^{-1} (x^k - z^k).
/// Stops when the step norm falls to eps (the quantity the complexity bound
/// controls), recording one instrumented IterationRecord per step. Inner
/// failures and locality violations terminate the run with the trace
/// preserved and the corresponding status.
inline RunReport run(const Problem& p, const Vec& x0, const Schedule& schedule,
                     const LocalityConfig& locality, double eps, std::int64_t max_iter,
                     double inner_tol, std::optional<double> sigma = std::nullopt,
                     std::optional<double> f_star_certified = std::nullopt) {
    validate_problem(p);
    if (!(eps > 0.0)) throw ParameterError("eps > 0 violated");
    if (!(inner_tol > 0.0)) throw ParameterError("inner_tol > 0 violated");
    if (!(locality.beta < locality.delta)) throw ParameterError("beta < delta violated");
    {
        const CheckReport sched = validate_schedule(schedule, std::max<std::int64_t>(max_iter, 1));
        if (!sched.passed) throw ScheduleError("invalid schedule: " + sched.witness);
    }
    if (distance(x0, locality.x_bar) > locality.beta)
        throw PreconditionError("x0 in B[x_bar, beta] violated (||x0 - x_bar|| = " +
                                format_double(distance(x0, locality.x_bar)) + " > beta = " +
                                format_double(locality.beta) + ")");

    RunReport rep;
    rep.termination = Termination::max_iter;
    const double f0 = detail::checked_value(p, x0);
    double f_min_seen = f0;

    Vec x = x0;
    for (std::int64_t k = 0; k < max_iter; ++k) {
        const double gamma_k = schedule.gamma.at(k);
        const double lambda_k = schedule.lambda.at(k);
        IterationRecord rec;
        rec.k = k;
        rec.x_k = x;
        rec.gamma_k = gamma_k;
        rec.lambda_k = lambda_k;
        try {
            const ContractionConstants cc =
                derive_constants(gamma_k, lambda_k, p.rho, locality.delta, sigma);
            const InnerSolveResult inner =
                solve_fixed_point(x, cc, p, locality.x_bar, inner_tol);
            rec.z_k = inner.z;
            rec.x_next = inner.y;
            rec.inner_iterations = inner.inner_iterations;
            rec.inner_residual = inner.residual;
        } catch (const NonconvergenceError&) {
            rep.termination = Termination::inner_failure;
            break;
        } catch (const LocalityError&) {
            rep.termination = Termination::locality_violation;
            break;
        }
        const double fx = detail::checked_value(p, x);
        rec.f_x_next = detail::checked_value(p, rec.x_next);
        rec.step_norm = distance(x, rec.x_next);
        rec.descent_gap =
            fx - rec.f_x_next - rec.step_norm * rec.step_norm / (2.0 * lambda_k);
        rec.fejer_ok = rec.descent_gap >= -1e-8;
        f_min_seen = std::min(f_min_seen, rec.f_x_next);
        rep.records.push_back(rec);
        rep.sum_sq_steps += rec.step_norm * rec.step_norm;
        x = rec.x_next;

        if (rec.step_norm <= eps) {
            rep.termination = Termination::step_below_eps;
            break;
        }
        if (distance(x, locality.x_bar) > locality.beta + 1e-6) {
            rep.termination = Termination::locality_violation;
            break;
        }
    }

    rep.T = static_cast<std::int64_t>(rep.records.size());
    rep.x_final = rep.records.empty() ? x0 : rep.records.back().x_next;
    if (f_star_certified && *f_star_certified <= f_min_seen + 1e-12) {
        rep.f_star_estimate = *f_star_certified;
        rep.f_star_source = "certified";
    } else {
        // No certificate, or the trace dipped below it: record what was observed.
        rep.f_star_estimate = f_min_seen;
        rep.f_star_source = "observed";
    }
    rep.complexity_bound = complexity_bound(p.rho, f0, rep.f_star_estimate, eps);
    return rep;
}

/// Checks the Fejer inequality along a recorded trace:
///   ||x^{k+1} - x||^2 <= ||x^k - x||^2 + 2 lambda_k (f(x) - f(x^{k+1}))
/// for `samples` points x drawn from B[x_bar, beta], slack 1e-8 scaled by
/// (1 + ||x||^2).
inline CheckReport check_fejer(const RunReport& report, const Problem& p,
                               const LocalityConfig& locality, const Schedule& schedule,
                               std::int64_t samples, std::uint64_t seed) {
    if (report.records.empty()) throw PreconditionError("check_fejer needs a nonempty trace");
    Rng rng = Rng(seed).child("fejer");
    CheckReport rep;
    rep.name = "fejer";
    rep.samples_used = samples;
    rep.worst_violation = -std::numeric_limits<double>::infinity();
    for (std::int64_t s = 0; s < samples; ++s) {
        const Vec x = sample_ball(rng, locality.x_bar, locality.beta);
        const double fx = detail::checked_value(p, x);
        const double scale = 1.0 + squared_norm(x);
        for (const IterationRecord& rec : report.records) {
            const double lhs = squared_norm(sub(rec.x_next, x));
            const double rhs = squared_norm(sub(rec.x_k, x)) +
                               2.0 * schedule.lambda.at(rec.k) * (fx - rec.f_x_next);
            const double viol = (lhs - rhs) / scale;
            if (viol > rep.worst_violation) {
                rep.worst_violation = viol;
                rep.witness = "x=" + format_point(x, ',') + ";k=" + std::to_string(rec.k);
            }
        }
    }
    rep.passed = rep.worst_violation <= 1e-8;
    return rep;
}

/// Checks sum_k ||x^k - x^{k+1}||^2 <= (2/rho)(f(x^0) - f_final) + 1e-8 and
/// that the partial sums are nondecreasing and bounded by the same value.
inline CheckReport check_summability(const RunReport& report, const Problem& p) {
    CheckReport rep;
    rep.name = "summability";
    rep.samples_used = static_cast<std::int64_t>(report.records.size());
    if (report.records.empty()) {
        rep.passed = true;
        rep.worst_violation = 0.0;
        return rep;
    }
    const double f0 = detail::checked_value(p, report.records.front().x_k);
    const double f_final = report.records.back().f_x_next;
    const double bound = (2.0 / p.rho) * (f0 - f_final) + 1e-8;
    double partial = 0.0;
    rep.worst_violation = -std::numeric_limits<double>::infinity();
    for (const IterationRecord& rec : report.records) {
        partial += rec.step_norm * rec.step_norm;
        const double viol = partial - bound;
        if (viol > rep.worst_violation) {
            rep.worst_violation = viol;
            rep.witness = "k=" + std::to_string(rec.k) + ";partial=" + format_double(partial);
        }
    }
    rep.passed = rep.worst_violation <= 0.0;
    return rep;
}

/// Index m(k) = argmin_{j in {1..k-1}} (z^j)^tau + (z^{j+1})^tau (1-based,
/// first index on ties) over a nonnegative sequence z^1..z^k.
inline std::int64_t min_adjacent_pair_index(const std::vector<double>& z, double tau) {
    const auto k = static_cast<std::int64_t>(z.size());
    if (k < 2) throw PreconditionError("sequence of length >= 2 required");
    std::int64_t m = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::int64_t j = 1; j <= k - 1; ++j) {
        const double s = std::pow(z[static_cast<std::size_t>(j - 1)], tau) +
                         std::pow(z[static_cast<std::size_t>(j)], tau);
        if (s < best) {
            best = s;
            m = j;
        }
    }
    return m;
}

/// Verifies the adjacent-pair bound: if sum_j (z^j)^tau <= bound_lambda then
///   max{z^{m(k)}, z^{m(k)+1}} <= (2 bound_lambda / (k-1))^{1/tau}.
/// When the premise fails the report is a vacuous pass with the premise
/// noted in the witness (the bound is not refuted, merely not applicable).
inline CheckReport lemma45_pair_bound(const std::vector<double>& step_norms, double bound_lambda,
                                      double tau) {
    const auto k = static_cast<std::int64_t>(step_norms.size());
    if (k < 2) throw PreconditionError("k >= 2 required");
    if (!(tau > 0.0)) throw ParameterError("tau > 0 violated");
    CheckReport rep;
    rep.name = "pair-bound";
    rep.samples_used = k;
    double sum = 0.0;
    for (double z : step_norms) {
        if (z < 0.0) throw PreconditionError("sequence entries must be nonnegative");
        sum += std::pow(z, tau);
    }
    if (sum > bound_lambda) {
        rep.passed = true;
        rep.worst_violation = 0.0;
        rep.witness = "premise not met: sum(z^tau)=" + format_double(sum) + " > lambda=" +
                      format_double(bound_lambda);
        return rep;
    }
    const std::int64_t m = min_adjacent_pair_index(step_norms, tau);
    const double pair_max = std::max(step_norms[static_cast<std::size_t>(m - 1)],
                                     step_norms[static_cast<std::size_t>(m)]);
    const double bound =
        std::pow(2.0 * bound_lambda / static_cast<double>(k - 1), 1.0 / tau);
    rep.worst_violation = pair_max - bound;
    rep.passed = rep.worst_violation <= 0.0;
    rep.witness = "m=" + std::to_string(m) + ";max=" + format_double(pair_max) +
                  ";bound=" + format_double(bound);
    return rep;
}

/// Step rule for the subgradient baseline: constant t_k = c or diminishing
/// t_k = c / sqrt(k+1).
struct StepRule {
    enum class Kind { constant, diminishing };
    Kind kind = Kind::diminishing;
    double c = 0.1;

    double at(std::int64_t k) const {
        return kind == Kind::constant ? c : c / std::sqrt(static_cast<double>(k + 1));
    }
};

/// Plain subgradient descent x^{k+1} = x^k - t_k v, v = subgradient(x^k),
/// reported in the same trace shape as the proximal run for side-by-side
/// benchmarking. No descent or Fejer guarantee is claimed; the recorded
/// lambda_k column carries t_k and gamma_k is 0.
inline RunReport subgradient_baseline(const Problem& p, const Vec& x0, std::int64_t steps,
                                      const StepRule& rule, double eps = 0.0) {
    validate_problem(p);
    RunReport rep;
    rep.termination = Termination::max_iter;
    const double f0 = detail::checked_value(p, x0);
    double f_min_seen = f0;
    Vec x = x0;
    for (std::int64_t k = 0; k < steps; ++k) {
        const double t = rule.at(k);
        const Vec v = detail::checked_subgradient(p, x);
        IterationRecord rec;
        rec.k = k;
        rec.x_k = x;
        rec.z_k = x;
        rec.x_next = axpy(x, -t, v);
        rec.f_x_next = detail::checked_value(p, rec.x_next);
        rec.step_norm = distance(x, rec.x_next);
        rec.gamma_k = 0.0;
        rec.lambda_k = t;
        const double fx = detail::checked_value(p, x);
        rec.descent_gap =
            fx - rec.f_x_next - rec.step_norm * rec.step_norm / (2.0 * std::max(t, 1e-300));
        rec.fejer_ok = rec.descent_gap >= -1e-8;
        f_min_seen = std::min(f_min_seen, rec.f_x_next);
        rep.records.push_back(rec);
        rep.sum_sq_steps += rec.step_norm * rec.step_norm;
        x = rec.x_next;
        if (eps > 0.0 && rec.step_norm <= eps) {
            rep.termination = Termination::step_below_eps;
            break;
        }
    }
    rep.T = static_cast<std::int64_t>(rep.records.size());
    rep.x_final = rep.records.empty() ? x0 : rep.records.back().x_next;
    rep.f_star_estimate = f_min_seen;
    rep.f_star_source = "observed";
    rep.complexity_bound = 0.0;
    return rep;
}

/// Empirically probes the local-convexity assumption for e_gamma f on
/// B[x_bar, delta]: secant inequality on sampled triples (u, v, alpha) plus
/// gradient monotonicity <grad e(u) - grad e(v), u - v> >= 0, slack 1e-8.
/// A sampled check, not a certificate.
inline CheckReport check_assumption1(const Problem& p, double gamma, const Vec& x_bar,
                                     double delta, std::int64_t samples, std::uint64_t seed,
                                     double tol = 1e-10) {
    validate_problem(p);
    if (!(gamma * p.rho < 1.0)) throw ParameterError("gamma*rho < 1 violated");
    if (!(delta > 0.0)) throw ParameterError("delta > 0 violated");
    constexpr double kSlack = 1e-8;
    Rng rng = Rng(seed).child("assumption1");
    const double search_radius = std::max(1.0, delta);

    CheckReport rep;
    rep.name = "assumption1";
    rep.samples_used = samples;
    rep.worst_violation = -std::numeric_limits<double>::infinity();
    auto envelope = [&](const Vec& pt) { return envelope_value({p, gamma, pt, search_radius}, tol); };
    auto gradient = [&](const Vec& pt) {
        return envelope_gradient({p, gamma, pt, search_radius}, tol);
    };
    for (std::int64_t s = 0; s < samples; ++s) {
        const Vec u = sample_ball(rng, x_bar, delta);
        const Vec v = sample_ball(rng, x_bar, delta);
        const double a = rng.uniform();
        Vec mid(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) mid[i] = a * u[i] + (1.0 - a) * v[i];

        const double secant_viol =
            envelope(mid) - (a * envelope(u) + (1.0 - a) * envelope(v));
        if (secant_viol > rep.worst_violation) {
            rep.worst_violation = secant_viol;
            rep.witness = "secant:u=" + format_point(u, ',') + ";v=" + format_point(v, ',') +
                          ";alpha=" + format_double(a);
        }
        const double mono_viol = -dot(sub(gradient(u), gradient(v)), sub(u, v));
        if (mono_viol > rep.worst_violation) {
            rep.worst_violation = mono_viol;
            rep.witness = "monotonicity:u=" + format_point(u, ',') + ";v=" + format_point(v, ',');
        }
    }
    rep.passed = rep.worst_violation <= kSlack;
    return rep;
}

}  // namespace moreau
