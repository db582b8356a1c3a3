#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>

#include "moreau/check_report.hpp"
#include "moreau/errors.hpp"
#include "moreau/rng.hpp"
#include "moreau/vec.hpp"

namespace moreau {

/// Axis-aligned closed box or closed ball on which an instance certifies
/// its weak-convexity modulus. Sampling is uniform.
struct Region {
    enum class Kind { box, ball };

    Kind kind = Kind::box;
    Vec lo, hi;       // box
    Vec center;       // ball
    double radius = 0.0;

    static Region box(Vec lo_, Vec hi_) {
        Region r;
        r.kind = Kind::box;
        r.lo = std::move(lo_);
        r.hi = std::move(hi_);
        return r;
    }

    static Region ball(Vec center_, double radius_) {
        Region r;
        r.kind = Kind::ball;
        r.center = std::move(center_);
        r.radius = radius_;
        return r;
    }

    std::size_t dimension() const {
        return kind == Kind::box ? lo.size() : center.size();
    }

    void validate() const {
        if (kind == Kind::box) {
            if (lo.empty() || lo.size() != hi.size())
                throw ConfigError("region box is empty or lo/hi dimensions differ");
            for (std::size_t i = 0; i < lo.size(); ++i)
                if (!(lo[i] < hi[i]))
                    throw ConfigError("region box is degenerate: lo >= hi in coordinate " +
                                      std::to_string(i));
        } else {
            if (center.empty()) throw ConfigError("region ball has no center");
            if (!(radius > 0.0)) throw ConfigError("region ball is degenerate: radius <= 0");
        }
    }

    bool contains(const Vec& x) const {
        if (kind == Kind::box) {
            for (std::size_t i = 0; i < lo.size(); ++i)
                if (x[i] < lo[i] || x[i] > hi[i]) return false;
            return true;
        }
        return distance(x, center) <= radius;
    }

    Vec sample(Rng& rng) const {
        if (kind == Kind::box) {
            Vec p(lo.size());
            for (std::size_t i = 0; i < lo.size(); ++i) p[i] = rng.uniform(lo[i], hi[i]);
            return p;
        }
        return sample_ball(rng, center, radius);
    }

    /// Per-coordinate interval [lo_i, hi_i] covering the region (for the
    /// ball kind, the bounding box).
    std::pair<double, double> coordinate_bounds(std::size_t i) const {
        if (kind == Kind::box) return {lo[i], hi[i]};
        return {center[i] - radius, center[i] + radius};
    }
};

/// Analytic proximal map supplied by an instance, together with the
/// (lambda, x) set on which the closed form is valid.
struct AnalyticProx {
    std::function<Vec(double lambda, const Vec& x)> eval;
    std::function<bool(double lambda, const Vec& x)> valid;
};

/// A rho-weakly convex objective with value and subgradient oracles.
///
/// The subgradient oracle returns one element of the subdifferential; at
/// nonsmooth points instances return a fixed, documented selection so runs
/// are reproducible. Instances are treated as immutable after construction
/// and all oracles are pure, so a Problem may be shared across threads.
struct Problem {
    std::string id;
    int dimension = 0;
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> subgradient;
    double rho = 0.0;                      // weak-convexity modulus on `region`
    Region region;
    std::optional<AnalyticProx> analytic_prox;
    double lower_bound = 0.0;              // finite lower bound of f on region
};

struct StationaryPoint {
    Vec x_bar;
    bool certified = false;  // true iff 0 in the subdifferential at x_bar is known analytically
};

inline void validate_problem(const Problem& p) {
    if (p.dimension <= 0) throw ConfigError("problem dimension must be positive");
    p.region.validate();
    if (p.region.dimension() != static_cast<std::size_t>(p.dimension))
        throw ConfigError("region dimension does not match problem dimension");
    if (!(p.rho >= 0.0)) throw ParameterError("rho >= 0 violated");
    if (!p.value || !p.subgradient) throw ConfigError("problem lacks value/subgradient oracle");
}

namespace detail {

inline double checked_value(const Problem& p, const Vec& x) {
    const double v = p.value(x);
    if (!std::isfinite(v))
        throw InstanceError("instance '" + p.id + "' returned non-finite value at x=" +
                            format_point(x, ','));
    return v;
}

inline Vec checked_subgradient(const Problem& p, const Vec& x) {
    Vec v = p.subgradient(x);
    if (v.size() != static_cast<std::size_t>(p.dimension) || !all_finite(v))
        throw InstanceError("instance '" + p.id + "' returned non-finite subgradient at x=" +
                            format_point(x, ','));
    return v;
}

}  // namespace detail

/// Samples the approximate secant inequality
///   f(a x + (1-a) y) <= a f(x) + (1-a) f(y) + rho * a(1-a)/2 * ||x-y||^2
/// over `samples` uniform triples (x, y, a) from the instance region.
/// Slack 1e-10. Also verifies f >= lower_bound at each sampled point.
inline CheckReport check_weak_convexity(const Problem& p, std::int64_t samples,
                                        std::uint64_t seed) {
    validate_problem(p);
    if (samples < 1) throw ConfigError("samples >= 1 required");
    constexpr double kSlack = 1e-10;
    Rng rng = Rng(seed).child("weak-convexity");

    CheckReport rep;
    rep.name = "weak-convexity";
    rep.samples_used = samples;
    rep.worst_violation = -std::numeric_limits<double>::infinity();
    for (std::int64_t s = 0; s < samples; ++s) {
        const Vec x = p.region.sample(rng);
        const Vec y = p.region.sample(rng);
        const double a = rng.uniform();
        const double fx = detail::checked_value(p, x);
        const double fy = detail::checked_value(p, y);
        if (fx < p.lower_bound - kSlack || fy < p.lower_bound - kSlack)
            throw InstanceError("instance '" + p.id + "' dips below its declared lower bound");
        Vec mid(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) mid[i] = a * x[i] + (1.0 - a) * y[i];
        const double lhs = detail::checked_value(p, mid);
        const double rhs =
            a * fx + (1.0 - a) * fy + 0.5 * p.rho * a * (1.0 - a) * squared_norm(sub(x, y));
        const double viol = lhs - rhs;
        if (viol > rep.worst_violation) {
            rep.worst_violation = viol;
            rep.witness = "x=" + format_point(x, ',') + ";y=" + format_point(y, ',') +
                          ";alpha=" + format_double(a);
        }
    }
    rep.passed = rep.worst_violation <= kSlack;
    return rep;
}

/// Samples the quadratic lower-estimator inequality
///   f(y) >= f(x) + <v, y-x> - rho/2 ||y-x||^2,  v = subgradient(x)
/// over `samples` uniform pairs. Slack 1e-10.
inline CheckReport check_quadratic_lower_estimator(const Problem& p, std::int64_t samples,
                                                   std::uint64_t seed) {
    validate_problem(p);
    if (samples < 1) throw ConfigError("samples >= 1 required");
    constexpr double kSlack = 1e-10;
    Rng rng = Rng(seed).child("quadratic-lower-estimator");

    CheckReport rep;
    rep.name = "quadratic-lower-estimator";
    rep.samples_used = samples;
    rep.worst_violation = -std::numeric_limits<double>::infinity();
    for (std::int64_t s = 0; s < samples; ++s) {
        const Vec x = p.region.sample(rng);
        const Vec y = p.region.sample(rng);
        const Vec v = detail::checked_subgradient(p, x);
        const Vec d = sub(y, x);
        const double lhs = detail::checked_value(p, x) + dot(v, d) - 0.5 * p.rho * squared_norm(d);
        const double viol = lhs - detail::checked_value(p, y);
        if (viol > rep.worst_violation) {
            rep.worst_violation = viol;
            rep.witness = "x=" + format_point(x, ',') + ";y=" + format_point(y, ',');
        }
    }
    rep.passed = rep.worst_violation <= kSlack;
    return rep;
}

/// Difference-of-convex decomposition f = xi - rho/2 ||.||^2 with
/// xi(x) = f(x) + rho/2 ||x||^2 convex. The reconstruction
/// xi(x) - rho/2 ||x||^2 reproduces f to rounding at every query.
struct DcDecomposition {
    std::function<double(const Vec&)> xi;
    double rho = 0.0;
};

inline DcDecomposition dc_decomposition(const Problem& p) {
    DcDecomposition dc;
    dc.rho = p.rho;
    dc.xi = [value = p.value, rho = p.rho](const Vec& x) {
        return value(x) + 0.5 * rho * squared_norm(x);
    };
    return dc;
}

}  // namespace moreau
