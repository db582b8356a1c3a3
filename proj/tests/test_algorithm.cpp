#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <thread>

#include "moreau/algorithm.hpp"
#include "moreau/config.hpp"
#include "moreau/envelope.hpp"
#include "moreau/zoo.hpp"

using namespace moreau;

namespace {
constexpr std::uint64_t kSeed = 12345;

PreparedExperiment preset(const std::string& id) {
    return prepare_experiment(default_experiment(id));
}
}  // namespace

TEST_CASE("schedule validation") {
    SECTION("valid constant schedule") {
        const Schedule s{StepSequence::constant(0.2), StepSequence::constant(0.45), 0.3, 2.0};
        CHECK(validate_schedule(s, 100).passed);
    }
    SECTION("2*gamma >= lambda") {
        const Schedule s{StepSequence::constant(0.25), StepSequence::constant(0.45), 0.2, 2.0};
        const CheckReport rep = validate_schedule(s, 100);
        CHECK_FALSE(rep.passed);
        CHECK(rep.witness.find("2*gamma < lambda") != std::string::npos);
    }
    SECTION("lambda >= 1/rho") {
        const Schedule s{StepSequence::constant(0.2), StepSequence::constant(0.6), 0.3, 2.0};
        const CheckReport rep = validate_schedule(s, 100);
        CHECK_FALSE(rep.passed);
        CHECK(rep.witness.find("lambda < 1/rho") != std::string::npos);
    }
    SECTION("violating index is reported for sequences") {
        Schedule s{StepSequence{{0.2, 0.2, 0.25}}, StepSequence::constant(0.45), 0.3, 2.0};
        const CheckReport rep = validate_schedule(s, 10);
        CHECK_FALSE(rep.passed);
        CHECK(rep.witness.find("k=2") != std::string::npos);
    }
}

TEST_CASE("example1 run contracts to the minimizer in one effective step") {
    const PreparedExperiment prep = preset("example1");
    const RunReport rep = execute(prep);
    REQUIRE(rep.T == 2);
    CHECK(rep.termination == Termination::step_below_eps);
    CHECK(rep.records[0].x_k == Vec{1.05});
    CHECK(rep.records[0].z_k[0] == Catch::Approx(1.02).margin(1e-8));
    CHECK(rep.records[0].x_next[0] == Catch::Approx(1.0).margin(1e-8));
    CHECK(rep.records[0].step_norm == Catch::Approx(0.05).margin(1e-8));
    CHECK(rep.records[1].step_norm <= prep.config.eps);
    CHECK(rep.sum_sq_steps == Catch::Approx(0.0025).margin(1e-8));
    CHECK(rep.x_final[0] == Catch::Approx(1.0).margin(1e-8));
    CHECK(rep.f_star_source == "certified");
    CHECK(rep.f_star_estimate == 1.0);
}

TEST_CASE("stationary start terminates with a zero step") {
    const ZooEntry zoo = make_example1();
    ExperimentConfig cfg = default_experiment("example1");
    cfg.x0 = zoo.stationary.x_bar;
    const PreparedExperiment prep = prepare_experiment(cfg);
    const RunReport rep = execute(prep);
    CHECK(rep.T == 1);
    CHECK(rep.termination == Termination::step_below_eps);
    CHECK(rep.records[0].step_norm <= 1e-10);
    CHECK(rep.sum_sq_steps <= 1e-16);
    CHECK(check_summability(rep, prep.zoo.problem).passed);
}

TEST_CASE("quadratic run is the geometric prox iteration") {
    const PreparedExperiment prep = preset("quadratic");
    const RunReport rep = execute(prep);
    CHECK(rep.termination == Termination::step_below_eps);
    double expected = 0.5;
    for (std::size_t k = 0; k < std::min<std::size_t>(rep.records.size(), 6); ++k) {
        expected /= 2.5;  // x_{k+1} = x_k / (1 + lambda)
        CHECK(rep.records[k].x_next[0] == Catch::Approx(expected).margin(1e-8));
    }
}

TEST_CASE("per-record instrumentation along zoo runs") {
    for (const std::string& id : zoo_ids()) {
        const PreparedExperiment prep = preset(id);
        const RunReport rep = execute(prep);
        INFO(id);
        REQUIRE(!rep.records.empty());
        double f_prev = prep.zoo.problem.value(prep.config.x0);
        double sum = 0.0;
        for (const IterationRecord& rec : rep.records) {
            CHECK(rec.descent_gap >= -1e-8);
            CHECK(rec.fejer_ok);
            CHECK(rec.f_x_next <= f_prev + 1e-8);  // monotone objective
            CHECK(distance(rec.x_next, prep.locality.x_bar) <= prep.locality.beta + 1e-6);
            CHECK(std::isfinite(rec.step_norm));
            sum += rec.step_norm * rec.step_norm;
            f_prev = rec.f_x_next;
        }
        CHECK(rep.sum_sq_steps == Catch::Approx(sum).margin(1e-15));
        CHECK(distance(rep.x_final, prep.zoo.stationary.x_bar) <= 1e-6);  // convergence
    }
}

TEST_CASE("iterates are consistent with the prox of the previous iterate") {
    const PreparedExperiment prep = preset("abs-quadratic");
    const RunReport rep = execute(prep);
    const ContractionConstants cc =
        derive_constants(prep.zoo.preset.gamma, prep.zoo.preset.lambda, prep.zoo.problem.rho,
                         prep.zoo.preset.delta);
    const double C = cc.lambda / ((cc.lambda - cc.gamma) * (1.0 - std::sqrt(cc.kappa)));
    for (const IterationRecord& rec : rep.records) {
        const Vec reference =
            prox_grid_oracle({prep.zoo.problem, rec.lambda_k, rec.x_k, 1.0}, 1e-6).y;
        CHECK(distance(rec.x_next, reference) <= C * prep.config.inner_tol + 1e-6);
    }
}

TEST_CASE("Fejer inequality holds along recorded traces") {
    for (const std::string& id : zoo_ids()) {
        const PreparedExperiment prep = preset(id);
        const RunReport rep = execute(prep);
        const CheckReport fejer =
            check_fejer(rep, prep.zoo.problem, prep.locality, prep.schedule, 20, kSeed);
        INFO(id << ": " << fejer.witness);
        CHECK(fejer.passed);
    }
}

TEST_CASE("summability bound with the example1 hand numbers") {
    const PreparedExperiment prep = preset("example1");
    const RunReport rep = execute(prep);
    const CheckReport summ = check_summability(rep, prep.zoo.problem);
    CHECK(summ.passed);
    // sum = 0.05^2 = 0.0025 against (2/2)(f(1.05) - 1) = 0.1025
    CHECK(rep.sum_sq_steps == Catch::Approx(0.0025).margin(1e-8));
    CHECK(rep.sum_sq_steps <= (2.0 / 2.0) * (1.1025 - 1.0));
}

TEST_CASE("complexity bound formula") {
    CHECK(complexity_bound(2.0, 1.0, 0.0, 0.1) == Catch::Approx(102.0).epsilon(1e-14));
    CHECK(complexity_bound(2.0, 5.0, 5.0, 0.1) == 2.0);
    CHECK(complexity_bound(2.0, 1.1025, 1.0, 1e-2) == Catch::Approx(1027.0).epsilon(1e-12));
    CHECK_THROWS_AS(complexity_bound(0.0, 1.0, 0.0, 0.1), ParameterError);
    CHECK_THROWS_AS(complexity_bound(2.0, 1.0, 0.0, 0.0), ParameterError);
    CHECK_THROWS_AS(complexity_bound(2.0, 0.0, 1.0, 0.1), ParameterError);
}

TEST_CASE("adjacent-pair bound") {
    SECTION("hand-worked sequence") {
        const std::vector<double> z{1.0, 0.0, 0.0, 0.0};
        CHECK(min_adjacent_pair_index(z, 2.0) == 2);  // first zero pair
        const CheckReport rep = lemma45_pair_bound(z, 1.0, 2.0);
        CHECK(rep.passed);
        CHECK(rep.witness.find("m=2") != std::string::npos);
    }
    SECTION("all-equal sequence at the premise boundary") {
        const std::vector<double> z{0.5, 0.5, 0.5, 0.5};
        const CheckReport rep = lemma45_pair_bound(z, 2.0, 1.0);  // sum = 2.0 = lambda
        CHECK(rep.passed);
        CHECK(rep.witness.find("premise") == std::string::npos);
    }
    SECTION("premise failure is a vacuous pass, not a violation") {
        const std::vector<double> z{1.0, 1.0};
        const CheckReport rep = lemma45_pair_bound(z, 0.5, 1.0);
        CHECK(rep.passed);
        CHECK(rep.witness.find("premise not met") != std::string::npos);
    }
    SECTION("run step norms satisfy the bound under the summability premise") {
        const PreparedExperiment prep = preset("example1");
        const RunReport rep = execute(prep);
        std::vector<double> steps;
        for (const IterationRecord& rec : rep.records) steps.push_back(rec.step_norm);
        const double f0 = prep.zoo.problem.value(prep.config.x0);
        const double bound = (2.0 / prep.zoo.problem.rho) * (f0 - rep.records.back().f_x_next);
        CHECK(lemma45_pair_bound(steps, bound, 2.0).passed);
    }
    SECTION("preconditions") {
        CHECK_THROWS_AS(lemma45_pair_bound({1.0}, 1.0, 2.0), PreconditionError);
        CHECK_THROWS_AS(lemma45_pair_bound({1.0, -1.0}, 1.0, 2.0), PreconditionError);
    }
}

TEST_CASE("subgradient baseline") {
    SECTION("constant step on the quadratic is a geometric decay") {
        const ZooEntry zoo = make_quadratic();
        const RunReport rep = subgradient_baseline(zoo.problem, {1.0}, 10,
                                                   StepRule{StepRule::Kind::constant, 0.1});
        REQUIRE(rep.T == 10);
        double expected = 1.0;
        for (const IterationRecord& rec : rep.records) {
            expected *= 0.9;
            CHECK(rec.x_next[0] == Catch::Approx(expected).epsilon(1e-12));
        }
    }
    SECTION("stationary start stays put") {
        const ZooEntry zoo = make_example1();
        const RunReport rep = subgradient_baseline(zoo.problem, {1.0}, 100,
                                                   StepRule{StepRule::Kind::diminishing, 0.1}, 1e-8);
        CHECK(rep.T == 1);
        CHECK(rep.termination == Termination::step_below_eps);
    }
    SECTION("proximal steps reach a loose tolerance first on example1") {
        ExperimentConfig cfg = default_experiment("example1");
        cfg.eps = 1e-2;
        const RunReport prox_rep = execute(prepare_experiment(cfg));
        REQUIRE(prox_rep.termination == Termination::step_below_eps);

        const ZooEntry zoo = make_example1();
        const RunReport sub_rep = subgradient_baseline(
            zoo.problem, {1.05}, 200000, StepRule{StepRule::Kind::diminishing, 0.1}, 1e-2);
        REQUIRE(sub_rep.termination == Termination::step_below_eps);
        CHECK(prox_rep.T < sub_rep.T);
    }
}

TEST_CASE("assumption-1 checker") {
    SECTION("example1 near the kink: envelope is a convex quadratic") {
        const ZooEntry zoo = make_example1();
        CHECK(check_assumption1(zoo.problem, 0.1, {1.0}, 0.2, 300, kSeed).passed);
    }
    SECTION("convex instance passes on any ball") {
        const ZooEntry zoo = make_quadratic();
        CHECK(check_assumption1(zoo.problem, 0.5, {0.0}, 2.0, 300, kSeed).passed);
    }
    SECTION("example1 on a ball reaching the second well fails") {
        const ZooEntry zoo = make_example1();
        const CheckReport rep = check_assumption1(zoo.problem, 0.1, {1.0}, 2.0, 500, kSeed);
        CHECK_FALSE(rep.passed);
        CHECK(rep.worst_violation > 1e-3);
    }
}

TEST_CASE("run terminates under the complexity bound at moderate eps") {
    ExperimentConfig cfg = default_experiment("example1");
    cfg.eps = 1e-2;
    const RunReport rep = execute(prepare_experiment(cfg));
    REQUIRE(rep.termination == Termination::step_below_eps);
    CHECK(static_cast<double>(rep.T) < rep.complexity_bound);
    CHECK(rep.complexity_bound == Catch::Approx(1027.0).epsilon(1e-9));
}

TEST_CASE("varying schedules drive the run the same way") {
    ExperimentConfig cfg = default_experiment("example1");
    cfg.gamma = StepSequence{{0.1, 0.08}};
    cfg.lambda = StepSequence{{0.25, 0.2}};
    const PreparedExperiment prep = prepare_experiment(cfg);
    const RunReport rep = execute(prep);
    CHECK(rep.termination == Termination::step_below_eps);
    CHECK(distance(rep.x_final, {1.0}) <= 1e-6);
    REQUIRE(rep.records.size() >= 2);
    CHECK(rep.records[0].gamma_k == 0.1);
    CHECK(rep.records[1].gamma_k == 0.08);
    CHECK(rep.records[1].lambda_k == 0.2);
}

TEST_CASE("shared instances support concurrent runs") {
    const PreparedExperiment prep = preset("abs-quadratic");
    const RunReport reference = execute(prep);

    std::vector<std::thread> workers;
    std::vector<RunReport> reports(4);
    for (int t = 0; t < 4; ++t)
        workers.emplace_back([&prep, &reports, t] { reports[t] = execute(prep); });
    for (std::thread& w : workers) w.join();
    for (const RunReport& rep : reports) {
        CHECK(rep.T == reference.T);
        CHECK(rep.x_final == reference.x_final);
        CHECK(rep.sum_sq_steps == reference.sum_sq_steps);
    }
}

TEST_CASE("run preconditions and failure statuses") {
    SECTION("x0 outside the admissible ball") {
        ExperimentConfig cfg = default_experiment("example1");
        cfg.x0 = {1.2};
        CHECK_THROWS_AS(prepare_experiment(cfg), PreconditionError);
        const PreparedExperiment ok = preset("example1");
        CHECK_THROWS_AS(run(ok.zoo.problem, {1.2}, ok.schedule, ok.locality, 1e-8, 100, 1e-10),
                        PreconditionError);
    }
    SECTION("inner failure preserves the trace") {
        // Steep affine objective: the gamma-prox sits gamma*|f'| = 0.3 from
        // the query point, beyond the delta = 0.2 search ball, so every
        // envelope evaluation inside the inner solve fails to converge.
        Problem p;
        p.id = "affine-drift";
        p.dimension = 1;
        p.rho = 1e-6;  // effective modulus, as the convex zoo instances store
        p.region = Region::box({-10.0}, {10.0});
        p.lower_bound = -30.0;
        p.value = [](const Vec& x) { return -3.0 * x[0]; };
        p.subgradient = [](const Vec&) -> Vec { return {-3.0}; };
        const Schedule schedule{StepSequence::constant(0.1), StepSequence::constant(0.25), 0.15,
                                1e-6};
        const LocalityConfig locality{{0.0}, 0.2, 0.09};
        const RunReport rep = run(p, {0.0}, schedule, locality, 1e-8, 100, 1e-10);
        CHECK(rep.termination == Termination::inner_failure);
        CHECK(rep.T == 0);
        CHECK(rep.x_final == Vec{0.0});
    }
    SECTION("broken oracles propagate as instance errors") {
        ZooEntry broken = make_example1();
        broken.problem.analytic_prox = AnalyticProx{
            [](double, const Vec&) -> Vec { return {std::numeric_limits<double>::quiet_NaN()}; },
            [](double, const Vec&) { return true; }};
        const PreparedExperiment prep = preset("example1");
        CHECK_THROWS_AS(
            run(broken.problem, {1.05}, prep.schedule, prep.locality, 1e-8, 100, 1e-10),
            InstanceError);
    }
    SECTION("locality violation reported with the trace preserved") {
        const ZooEntry zoo = make_quadratic();
        const Schedule schedule{StepSequence::constant(0.5), StepSequence::constant(1.5), 0.9,
                                zoo.problem.rho};
        const LocalityConfig locality{{2.0}, 0.5, 0.22};
        const RunReport rep =
            run(zoo.problem, {2.0}, schedule, locality, 1e-8, 100, 1e-10);
        CHECK(rep.termination == Termination::locality_violation);
        CHECK(rep.T == 0);
    }
    SECTION("invalid schedule is rejected before any step") {
        const PreparedExperiment prep = preset("example1");
        const Schedule bad{StepSequence::constant(0.25), StepSequence::constant(0.45), 0.2, 2.0};
        CHECK_THROWS_AS(
            run(prep.zoo.problem, {1.05}, bad, prep.locality, 1e-8, 100, 1e-10),
            ScheduleError);
    }
}
