#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "moreau/errors.hpp"
#include "moreau/problem.hpp"

namespace moreau {

/// Recommended run parameters for a zoo instance: a step-size pair that
/// satisfies 0 < lambda_bar < 2*gamma < lambda < 1/rho, a locality radius
/// delta on which the envelope e_gamma f is convex around x_bar, and a
/// start point inside the admissible ball.
struct InstancePreset {
    double gamma = 0.0;
    double lambda = 0.0;
    double lambda_bar = 0.0;
    double delta = 0.0;
    Vec x0;
    double eps = 1e-8;
};

struct ZooEntry {
    Problem problem;
    StationaryPoint stationary;
    InstancePreset preset;
};

/// f(x) = max{2 - x^2, x^2} on [-3, 3]. Weakly convex with modulus 2
/// (f(x) + x^2 = 2*max{1, x^2} is convex); not convex. The minimizers are
/// x = +-1 with value 1; the subdifferential at the kinks is [-2, 2] and
/// the oracle returns its midpoint 0, so x_bar = 1 is certified stationary.
///
/// For |x - 1| <= 2*lambda the prox sits at the kink: P_lambda(x) = 1 and
/// e_lambda(x) = 1 + (x-1)^2 / (2*lambda). The closed form is registered
/// for lambda <= 1/4.
inline ZooEntry make_example1() {
    ZooEntry e;
    Problem& p = e.problem;
    p.id = "example1";
    p.dimension = 1;
    p.rho = 2.0;
    p.region = Region::box({-3.0}, {3.0});
    p.lower_bound = 1.0;
    p.value = [](const Vec& x) {
        const double t = x[0] * x[0];
        return std::max(2.0 - t, t);
    };
    p.subgradient = [](const Vec& x) -> Vec {
        const double t = x[0] * x[0];
        if (t == 1.0) return {0.0};          // midpoint of [-2, 2]
        return {t > 1.0 ? 2.0 * x[0] : -2.0 * x[0]};
    };
    p.analytic_prox = AnalyticProx{
        [](double, const Vec&) -> Vec { return {1.0}; },
        [](double lambda, const Vec& x) {
            return lambda <= 0.25 && std::abs(x[0] - 1.0) <= 2.0 * lambda;
        }};
    e.stationary = StationaryPoint{{1.0}, true};
    e.preset = InstancePreset{0.1, 0.25, 0.15, 0.2, {1.05}, 1e-8};
    return e;
}

/// f(x) = 1/2 ||x - c||^2. Convex, so any rho >= 0 certifies; the stored
/// modulus is 1e-6 so that the schedule constraint lambda < 1/rho and the
/// complexity bound (which divides by rho) stay finite. Global analytic
/// prox (x + lambda*c) / (1 + lambda).
inline ZooEntry make_quadratic(const Vec& c) {
    ZooEntry e;
    Problem& p = e.problem;
    p.id = "quadratic";
    p.dimension = static_cast<int>(c.size());
    p.rho = 1e-6;
    {
        Vec lo(c.size()), hi(c.size());
        for (std::size_t i = 0; i < c.size(); ++i) {
            lo[i] = c[i] - 3.0;
            hi[i] = c[i] + 3.0;
        }
        p.region = Region::box(std::move(lo), std::move(hi));
    }
    p.lower_bound = 0.0;
    p.value = [c](const Vec& x) { return 0.5 * squared_norm(sub(x, c)); };
    p.subgradient = [c](const Vec& x) { return sub(x, c); };
    p.analytic_prox = AnalyticProx{
        [c](double lambda, const Vec& x) {
            Vec y(x.size());
            for (std::size_t i = 0; i < x.size(); ++i)
                y[i] = (x[i] + lambda * c[i]) / (1.0 + lambda);
            return y;
        },
        [](double, const Vec&) { return true; }};
    e.stationary = StationaryPoint{c, true};
    Vec x0 = c;
    x0[0] += 0.5;  // offset one coordinate so ||x0 - c|| is dimension-independent
    e.preset = InstancePreset{0.5, 1.5, 0.9, 2.0, std::move(x0), 1e-8};
    return e;
}

inline ZooEntry make_quadratic() { return make_quadratic(Vec{0.0}); }

/// f(x) = |x^2 - 1| on [-3, 3]: the composition of |.| with the smooth map
/// x^2 - 1, weakly convex with modulus 2. Minimizers at x = +-1 with value
/// 0; subgradient at the kinks is [-2, 2], oracle returns 0. No analytic
/// prox: this instance exercises the numerical inner solver. The envelope
/// e_gamma f is convex on B[1, delta] only for delta <= 2*gamma, hence the
/// preset pairs delta = 0.4 with gamma = 0.2.
inline ZooEntry make_abs_quadratic() {
    ZooEntry e;
    Problem& p = e.problem;
    p.id = "abs-quadratic";
    p.dimension = 1;
    p.rho = 2.0;
    p.region = Region::box({-3.0}, {3.0});
    p.lower_bound = 0.0;
    p.value = [](const Vec& x) { return std::abs(x[0] * x[0] - 1.0); };
    p.subgradient = [](const Vec& x) -> Vec {
        const double t = x[0] * x[0] - 1.0;
        if (t == 0.0) return {0.0};
        return {t > 0.0 ? 2.0 * x[0] : -2.0 * x[0]};
    };
    e.stationary = StationaryPoint{{1.0}, true};
    e.preset = InstancePreset{0.2, 0.45, 0.35, 0.4, {1.15}, 1e-8};
    return e;
}

inline std::vector<std::string> zoo_ids() { return {"example1", "quadratic", "abs-quadratic"}; }

/// Looks up a zoo instance by its string id ("example1", "quadratic",
/// "abs-quadratic"); throws ConfigError for unknown ids.
inline ZooEntry make_zoo_instance(const std::string& id) {
    if (id == "example1") return make_example1();
    if (id == "quadratic") return make_quadratic();
    if (id == "abs-quadratic") return make_abs_quadratic();
    throw ConfigError("unknown problem id '" + id + "' (known: example1, quadratic, abs-quadratic)");
}

}  // namespace moreau
