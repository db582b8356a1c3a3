#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "moreau/algorithm.hpp"
#include "moreau/bench.hpp"
#include "moreau/config.hpp"
#include "moreau/envelope.hpp"
#include "moreau/fixed_point.hpp"
#include "moreau/io.hpp"
#include "moreau/zoo.hpp"

namespace moreau {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
    double budget_seconds = 0.0;
};

namespace acceptance {

// Each criterion returns pass/fail plus a measured-quantity summary in
// `detail`. Assertions use the exact tolerances stated for the suite; any
// tightening would be a different contract.

inline CriterionResult prox_fixture(std::uint64_t) {
    CriterionResult r{1, "example1 prox fixture", true, "", 0.0, 0.1};
    const ZooEntry zoo = make_example1();
    const double lambda = 0.1;
    double worst_y = 0.0, worst_e = 0.0;
    for (double x : {0.95, 1.05, 1.0 + 0.19}) {
        const ProxResult pr = prox({zoo.problem, lambda, {x}, 1.0}, 1e-10);
        worst_y = std::max(worst_y, std::abs(pr.y[0] - 1.0));
        const double e_expected = 1.0 + (x - 1.0) * (x - 1.0) / (2.0 * lambda);
        worst_e = std::max(worst_e, std::abs(pr.envelope_value - e_expected));
    }
    r.passed = worst_y <= 1e-8 && worst_e <= 1e-8;
    r.detail = "max|P-1|=" + format_double(worst_y) + ", max envelope error=" + format_double(worst_e);
    return r;
}

inline CriterionResult gradient_finite_difference(std::uint64_t seed) {
    CriterionResult r{2, "envelope gradient vs central differences", true, "", 0.0, 1.0};
    const double h = 1e-6;
    double worst = 0.0;
    for (const std::string& id : zoo_ids()) {
        const ZooEntry zoo = make_zoo_instance(id);
        const double lambda = id == "quadratic" ? 1.0 : 0.1;
        Rng rng = Rng(seed).child("fd-" + id);
        for (int i = 0; i < 20; ++i) {
            Vec x(zoo.problem.dimension);
            for (int d = 0; d < zoo.problem.dimension; ++d) {
                auto [lo, hi] = zoo.problem.region.coordinate_bounds(static_cast<std::size_t>(d));
                x[static_cast<std::size_t>(d)] = rng.uniform(lo + 0.5, hi - 0.5);
            }
            const Vec g = envelope_gradient({zoo.problem, lambda, x, 1.5}, 1e-10);
            for (int d = 0; d < zoo.problem.dimension; ++d) {
                Vec xp = x, xm = x;
                xp[static_cast<std::size_t>(d)] += h;
                xm[static_cast<std::size_t>(d)] -= h;
                const double fd = (envelope_value({zoo.problem, lambda, xp, 1.5}, 1e-10) -
                                   envelope_value({zoo.problem, lambda, xm, 1.5}, 1e-10)) /
                                  (2.0 * h);
                const double rel = std::abs(fd - g[static_cast<std::size_t>(d)]) /
                                   std::max(1.0, std::abs(g[static_cast<std::size_t>(d)]));
                worst = std::max(worst, rel);
            }
        }
    }
    r.passed = worst <= 1e-5;
    r.detail = "worst relative error=" + format_double(worst);
    return r;
}

inline CriterionResult contraction_property(std::uint64_t seed) {
    CriterionResult r{3, "Phi contraction ratio <= sqrt(kappa)", true, "", 0.0, 2.0};
    const ZooEntry zoo = make_example1();
    const ContractionConstants cc = derive_constants(0.1, 0.25, zoo.problem.rho, 0.2);
    const Vec x{1.05};
    const double limit = std::sqrt(cc.kappa) + 1e-9;
    Rng rng = Rng(seed).child("contraction");
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const Vec z = sample_ball(rng, {1.0}, 0.2);
        const Vec w = sample_ball(rng, {1.0}, 0.2);
        const double dzw = distance(z, w);
        if (dzw < 1e-12) continue;
        const double dphi = distance(phi_map(z, x, cc, zoo.problem, 1e-10),
                                     phi_map(w, x, cc, zoo.problem, 1e-10));
        worst = std::max(worst, dphi / dzw);
    }
    r.passed = worst <= limit;
    r.detail = "worst ratio=" + format_double(worst) + ", sqrt(kappa)=" +
               format_double(std::sqrt(cc.kappa));
    return r;
}

inline CriterionResult inner_solver_exactness(std::uint64_t) {
    CriterionResult r{4, "inner solver matches closed form and grid oracle", true, "", 0.0, 1.0};
    const ZooEntry zoo = make_example1();
    const ContractionConstants cc = derive_constants(0.1, 0.25, zoo.problem.rho, 0.2);
    const InnerSolveResult inner =
        solve_fixed_point({1.05}, cc, zoo.problem, zoo.stationary.x_bar, 1e-10);
    const double z_err = std::abs(inner.z[0] - 1.02);
    const double y_err = std::abs(inner.y[0] - 1.0);
    const CheckReport identity = verify_prox_identity(inner, zoo.problem, cc, 1e-10, 1e-6);
    r.passed = z_err <= 1e-8 && y_err <= 1e-8 && identity.passed;
    r.detail = "|z-1.02|=" + format_double(z_err) + ", |y-1|=" + format_double(y_err) +
               ", identity " + (identity.passed ? "ok" : "violated");
    return r;
}

inline CriterionResult per_iteration_inequalities(std::uint64_t seed) {
    CriterionResult r{5, "descent, Fejer and summability along runs", true, "", 0.0, 5.0};
    std::string detail;
    for (const std::string& id : zoo_ids()) {
        const PreparedExperiment prep = prepare_experiment(default_experiment(id));
        const RunReport rep = execute(prep);
        double worst_gap = 0.0;
        for (const IterationRecord& rec : rep.records)
            worst_gap = std::min(worst_gap, rec.descent_gap);
        const CheckReport fejer =
            check_fejer(rep, prep.zoo.problem, prep.locality, prep.schedule, 20, seed);
        const CheckReport summ = check_summability(rep, prep.zoo.problem);
        const bool ok = worst_gap >= -1e-8 && fejer.passed && summ.passed;
        r.passed = r.passed && ok;
        detail += id + "(gap=" + format_double(worst_gap) + ",fejer=" +
                  (fejer.passed ? "ok" : "bad") + ",sum=" + (summ.passed ? "ok" : "bad") + ") ";
    }
    r.detail = detail;
    return r;
}

inline CriterionResult complexity_rows(std::uint64_t) {
    CriterionResult r{6, "T_prox below the complexity bound", true, "", 0.0, 10.0};
    std::string detail;
    for (const std::string& id : {std::string("example1"), std::string("abs-quadratic")}) {
        for (const BenchRow& row : bench(id, {1e-1, 1e-2, 1e-3})) {
            const bool ok = static_cast<double>(row.T_prox) < row.bound_T;
            r.passed = r.passed && ok;
            detail += id + "@eps=" + format_double(row.eps) + ": T=" +
                      std::to_string(row.T_prox) + "<" + format_double(row.bound_T) +
                      (ok ? " " : " VIOLATED ");
        }
    }
    r.detail = detail;
    return r;
}

inline CriterionResult convergence_to_minimizer(std::uint64_t) {
    CriterionResult r{7, "convergence to the certified minimizer", true, "", 0.0, 5.0};
    std::string detail;
    for (const std::string& id : {std::string("example1"), std::string("abs-quadratic")}) {
        const PreparedExperiment prep = prepare_experiment(default_experiment(id));
        const RunReport rep = execute(prep);
        const double err = distance(rep.x_final, prep.zoo.stationary.x_bar);
        const bool ok = rep.termination == Termination::step_below_eps && err <= 1e-6;
        r.passed = r.passed && ok;
        detail += id + "(|x_final - x*|=" + format_double(err) + "," +
                  to_string(rep.termination) + ") ";
    }
    r.detail = detail;
    return r;
}

inline CriterionResult oracle_equivalence(std::uint64_t seed) {
    CriterionResult r{8, "numerical prox agrees with grid oracle", true, "", 0.0, 30.0};
    const ZooEntry zoo = make_abs_quadratic();
    Rng rng = Rng(seed).child("oracle-equivalence");
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double gamma = rng.uniform(1e-3, 0.45);
        const Vec x{rng.uniform(0.7, 1.3)};
        const ProxQuery q{zoo.problem, gamma, x, 1.0};
        const Vec y_num = prox(q, 1e-10).y;
        const Vec y_grid = prox_grid_oracle(q, 1e-6).y;
        worst = std::max(worst, distance(y_num, y_grid));
    }
    r.passed = worst <= 1e-5;
    r.detail = "worst |y_num - y_grid|=" + format_double(worst);
    return r;
}

inline CriterionResult pair_bound_exhaustive(std::uint64_t seed) {
    CriterionResult r{9, "adjacent-pair bound on random sequences", true, "", 0.0, 2.0};
    Rng rng = Rng(seed).child("pair-bound");
    std::int64_t premise_met = 0;
    for (int trial = 0; trial < 1000 && r.passed; ++trial) {
        const auto len = static_cast<std::size_t>(2 + rng.next_u64() % 19);  // 2..20
        const double tau = (rng.next_u64() & 1) ? 1.0 : 2.0;
        std::vector<double> z(len);
        double sum = 0.0;
        for (double& v : z) {
            v = rng.uniform();
            sum += std::pow(v, tau);
        }
        const double lambda = sum * rng.uniform(0.5, 1.5);

        // Independent brute-force argmin of adjacent pair sums.
        std::int64_t m_brute = 1;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 1; j + 1 <= len; ++j) {
            const double s = std::pow(z[j - 1], tau) + std::pow(z[j], tau);
            if (s < best) {
                best = s;
                m_brute = static_cast<std::int64_t>(j);
            }
        }
        if (min_adjacent_pair_index(z, tau) != m_brute) {
            r.passed = false;
            r.detail = "argmin mismatch at trial " + std::to_string(trial);
            break;
        }
        const CheckReport rep = lemma45_pair_bound(z, lambda, tau);
        if (sum <= lambda) {
            ++premise_met;
            if (!rep.passed) {
                r.passed = false;
                r.detail = "bound violated at trial " + std::to_string(trial) + ": " + rep.witness;
                break;
            }
        }
    }
    if (r.passed)
        r.detail = "1000 sequences, premise met " + std::to_string(premise_met) + " times";
    return r;
}

inline CriterionResult negative_controls(std::uint64_t seed) {
    CriterionResult r{10, "invalid inputs are rejected", true, "", 0.0, 1.0};
    std::string detail;

    const CheckReport s1 = validate_schedule(
        Schedule{StepSequence::constant(0.25), StepSequence::constant(0.45), 0.2, 2.0}, 10);
    if (s1.passed) {
        r.passed = false;
        detail += "schedule(gamma=0.25,lambda=0.45) wrongly accepted; ";
    }
    const CheckReport s2 = validate_schedule(
        Schedule{StepSequence::constant(0.2), StepSequence::constant(0.6), 0.3, 2.0}, 10);
    if (s2.passed) {
        r.passed = false;
        detail += "schedule(lambda=0.6,rho=2) wrongly accepted; ";
    }
    bool sigma_rejected = false;
    try {
        derive_constants(0.25, 0.6, 1.0, 1.0, 0.2);  // L = 64/15, 2/L^2 ~ 0.1099
    } catch (const ParameterError&) {
        sigma_rejected = true;
    }
    if (!sigma_rejected) {
        r.passed = false;
        detail += "sigma=0.2 at L=64/15 wrongly accepted; ";
    }
    const ZooEntry zoo = make_example1();
    const CheckReport a1 = check_assumption1(zoo.problem, 0.1, {1.0}, 2.0, 500, seed);
    if (a1.passed) {
        r.passed = false;
        detail += "assumption1 on delta=2 wrongly passed; ";
    }
    if (r.passed)
        detail = "all controls rejected (assumption1 worst violation " +
                 format_double(a1.worst_violation) + ")";
    r.detail = detail;
    return r;
}

}  // namespace acceptance

/// Runs every acceptance criterion, printing one pass/fail line each, and
/// writes a JSON report (timings are printed but kept out of the report so
/// repeated runs with one seed produce identical bytes). Returns true iff
/// all criteria passed within their time budgets.
inline bool run_acceptance_suite(std::uint64_t seed, const std::string& report_path) {
    using Clock = std::chrono::steady_clock;
    using CriterionFn = CriterionResult (*)(std::uint64_t);
    const std::vector<CriterionFn> criteria = {
        acceptance::prox_fixture,         acceptance::gradient_finite_difference,
        acceptance::contraction_property, acceptance::inner_solver_exactness,
        acceptance::per_iteration_inequalities, acceptance::complexity_rows,
        acceptance::convergence_to_minimizer,   acceptance::oracle_equivalence,
        acceptance::pair_bound_exhaustive,      acceptance::negative_controls};

    Json report;
    report["seed"] = seed;
    Json items = Json::array();
    bool all_passed = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = Clock::now();
        CriterionResult res;
        try {
            res = criteria[i](seed);
        } catch (const std::exception& e) {
            res.id = static_cast<int>(i) + 1;
            res.name = "criterion " + std::to_string(i + 1);
            res.passed = false;
            res.detail = std::string("exception: ") + e.what();
        }
        res.seconds = std::chrono::duration<double>(Clock::now() - start).count();
        if (res.budget_seconds > 0.0 && res.seconds > res.budget_seconds) {
            res.passed = false;
            res.detail += " [exceeded " + format_double(res.budget_seconds) + "s budget]";
        }
        all_passed = all_passed && res.passed;
        std::printf("[%s] %2d. %-50s %8.3fs  %s\n", res.passed ? "PASS" : "FAIL", res.id,
                    res.name.c_str(), res.seconds, res.detail.c_str());
        items.push_back(Json{{"id", res.id},
                             {"name", res.name},
                             {"passed", res.passed},
                             {"detail", res.detail}});
    }
    report["all_passed"] = all_passed;
    report["criteria"] = items;
    if (!report_path.empty()) write_file(report_path, report.dump(2) + "\n");
    std::printf("%s\n", all_passed ? "acceptance: ALL PASSED" : "acceptance: FAILURES");
    return all_passed;
}

}  // namespace moreau
