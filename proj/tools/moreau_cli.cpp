// Command-line front end: prox/envelope evaluation, the inner fixed-point
// solve, full algorithm runs with CSV traces, benchmarking against the
// subgradient baseline, standalone checkers, and the acceptance suite.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "moreau/acceptance.hpp"
#include "moreau/algorithm.hpp"
#include "moreau/bench.hpp"
#include "moreau/config.hpp"
#include "moreau/envelope.hpp"
#include "moreau/fixed_point.hpp"
#include "moreau/io.hpp"
#include "moreau/zoo.hpp"

namespace {

using namespace moreau;

Vec parse_point(const std::string& s) {
    Vec v;
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t next = s.find(',', pos);
        if (next == std::string::npos) next = s.size();
        try {
            v.push_back(std::stod(s.substr(pos, next - pos)));
        } catch (const std::exception&) {
            throw ConfigError("cannot parse point '" + s + "'");
        }
        pos = next + 1;
    }
    if (v.empty()) throw ConfigError("empty point");
    return v;
}

// A scalar literal or a path to a whitespace-separated sequence file.
StepSequence parse_sequence_arg(const std::string& s) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) return StepSequence::constant(v);
    } catch (const std::exception&) {
    }
    return detail::parse_sequence_file(s);
}

std::string output_path(const std::string& explicit_path, const std::string& fallback_name) {
    if (!explicit_path.empty()) return explicit_path;
    if (const char* dir = std::getenv("MOREAU_OUT_DIR"))
        return std::string(dir) + "/" + fallback_name;
    return fallback_name;
}

int cmd_prox(const std::string& problem_id, double lambda, const std::string& x_str,
             std::optional<double> grid_step, double tol, double radius) {
    const ZooEntry zoo = make_zoo_instance(problem_id);
    const ProxQuery q{zoo.problem, lambda, parse_point(x_str), radius};
    const ProxResult res = grid_step ? prox_grid_oracle(q, *grid_step) : prox(q, tol);
    std::cout << to_json(res).dump() << "\n";
    return 0;
}

int cmd_inner(const std::string& problem_id, const std::string& x_str, double gamma, double lambda,
              std::optional<double> sigma, double tol, std::optional<double> delta) {
    const ZooEntry zoo = make_zoo_instance(problem_id);
    const double d = delta.value_or(zoo.preset.delta);
    const ContractionConstants cc = derive_constants(gamma, lambda, zoo.problem.rho, d, sigma);
    const InnerSolveResult res =
        solve_fixed_point(parse_point(x_str), cc, zoo.problem, zoo.stationary.x_bar, tol);
    std::cout << to_json(res).dump() << "\n";
    return 0;
}

int cmd_run(ExperimentConfig cfg, const std::string& out_override) {
    const PreparedExperiment prep = prepare_experiment(cfg);
    const RunReport rep = execute(prep);
    const std::string out =
        output_path(!out_override.empty() ? out_override : cfg.out_path,
                    "trace-" + cfg.problem_id + ".csv");
    write_file(out, trace_csv(rep));
    std::cout << summary_json(rep).dump() << "\n";
    return 0;
}

int cmd_bench(const std::string& problem_id, const std::vector<double>& eps_list,
              const std::string& out, const std::string& x0_str) {
    const std::optional<Vec> x0 =
        x0_str.empty() ? std::nullopt : std::optional<Vec>(parse_point(x0_str));
    const std::vector<BenchRow> rows = bench(problem_id, eps_list, 200000, x0);
    const std::string csv = bench_csv(rows);
    if (!out.empty())
        write_file(output_path(out, "bench-" + problem_id + ".csv"), csv);
    std::cout << csv;
    return 0;
}

int cmd_check(const std::string& name, const std::string& problem_id, std::int64_t samples,
              std::uint64_t seed, std::optional<double> gamma, std::optional<double> delta,
              const std::string& center_str, double radius) {
    const ZooEntry zoo = make_zoo_instance(problem_id);
    CheckReport rep;
    if (name == "weak-convexity") {
        rep = check_weak_convexity(zoo.problem, samples, seed);
    } else if (name == "quadratic-lower-estimator") {
        rep = check_quadratic_lower_estimator(zoo.problem, samples, seed);
    } else if (name == "prox-lipschitz") {
        const Vec center = center_str.empty() ? zoo.stationary.x_bar : parse_point(center_str);
        rep = check_prox_lipschitz(zoo.problem, gamma.value_or(zoo.preset.gamma), center, radius,
                                   samples, seed);
    } else if (name == "assumption1") {
        rep = check_assumption1(zoo.problem, gamma.value_or(zoo.preset.gamma),
                                zoo.stationary.x_bar, delta.value_or(zoo.preset.delta), samples,
                                seed);
    } else if (name == "fejer" || name == "summability") {
        const PreparedExperiment prep = prepare_experiment(default_experiment(problem_id));
        const RunReport run_rep = execute(prep);
        rep = name == "fejer"
                  ? check_fejer(run_rep, prep.zoo.problem, prep.locality, prep.schedule, samples,
                                seed)
                  : check_summability(run_rep, prep.zoo.problem);
    } else {
        throw ConfigError("unknown check '" + name +
                          "' (known: weak-convexity, quadratic-lower-estimator, prox-lipschitz, "
                          "assumption1, fejer, summability)");
    }
    std::cout << to_json(rep).dump() << "\n";
    return rep.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"inexact proximal point optimization for weakly convex functions"};
    app.require_subcommand(1);

    std::string problem_id = "example1";
    std::uint64_t seed = 0;

    // prox
    auto* prox_cmd = app.add_subcommand("prox", "evaluate P_lambda f, e_lambda f and its gradient");
    std::string prox_x;
    double prox_lambda = 0.1, prox_tol = 1e-10, prox_radius = 1.0;
    std::optional<double> prox_grid_step;
    prox_cmd->add_option("--problem", problem_id, "zoo instance id")->required();
    prox_cmd->add_option("--lambda", prox_lambda, "prox parameter")->required();
    prox_cmd->add_option("--x", prox_x, "query point, comma-separated")->required();
    prox_cmd->add_option("--grid-step", prox_grid_step, "use the grid oracle with this pitch");
    prox_cmd->add_option("--tol", prox_tol, "inner tolerance");
    prox_cmd->add_option("--radius", prox_radius, "search radius around x");
    prox_cmd->add_option("--seed", seed, "accepted for interface uniformity (prox draws nothing)");

    // inner
    auto* inner_cmd = app.add_subcommand("inner", "solve the implicit fixed-point equation");
    std::string inner_x;
    double inner_gamma = 0.1, inner_lambda = 0.25, inner_tol_opt = 1e-10;
    std::optional<double> inner_sigma, inner_delta;
    inner_cmd->add_option("--problem", problem_id, "zoo instance id")->required();
    inner_cmd->add_option("--x", inner_x, "query point")->required();
    inner_cmd->add_option("--gamma", inner_gamma, "envelope parameter")->required();
    inner_cmd->add_option("--lambda", inner_lambda, "prox parameter")->required();
    inner_cmd->add_option("--sigma", inner_sigma, "relaxation (default 1/L^2)");
    inner_cmd->add_option("--tol", inner_tol_opt, "residual tolerance");
    inner_cmd->add_option("--delta", inner_delta, "locality radius (default: instance preset)");
    inner_cmd->add_option("--seed", seed, "accepted for interface uniformity (inner draws nothing)");

    // run
    auto* run_cmd = app.add_subcommand("run", "run the proximal algorithm, write a CSV trace");
    std::string run_config, run_x0, run_gamma, run_lambda, run_out, run_x_bar;
    std::optional<double> run_lambda_bar, run_eps, run_inner_tol, run_sigma, run_delta;
    std::optional<std::int64_t> run_max_iter;
    run_cmd->add_option("--config", run_config, "JSON config file (flags override it)");
    run_cmd->add_option("--problem", problem_id, "zoo instance id");
    run_cmd->add_option("--x0", run_x0, "start point");
    run_cmd->add_option("--gamma", run_gamma, "constant or sequence-file path");
    run_cmd->add_option("--lambda", run_lambda, "constant or sequence-file path");
    run_cmd->add_option("--lambda-bar", run_lambda_bar, "schedule floor");
    run_cmd->add_option("--x-bar", run_x_bar, "reference stationary point");
    run_cmd->add_option("--delta", run_delta, "locality radius");
    run_cmd->add_option("--sigma", run_sigma, "relaxation (default 1/L^2)");
    run_cmd->add_option("--eps", run_eps, "outer stopping tolerance on the step norm");
    run_cmd->add_option("--max-iter", run_max_iter, "outer iteration cap");
    run_cmd->add_option("--inner-tol", run_inner_tol, "inner residual tolerance");
    run_cmd->add_option("--out", run_out, "trace CSV path");
    run_cmd->add_option("--seed", seed, "run seed (recorded; sampling checkers derive from it)");

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "proximal vs subgradient baseline per eps");
    std::vector<double> bench_eps{1e-1, 1e-2, 1e-3};
    std::string bench_out, bench_x0;
    bench_cmd->add_option("--problem", problem_id, "zoo instance id")->required();
    bench_cmd->add_option("--eps", bench_eps, "eps values");
    bench_cmd->add_option("--x0", bench_x0, "start point (default: instance preset)");
    bench_cmd->add_option("--out", bench_out, "CSV output path");
    bench_cmd->add_option("--seed", seed, "accepted for interface uniformity (bench draws nothing)");

    // check
    auto* check_cmd = app.add_subcommand("check", "run a named empirical checker");
    std::string check_name, check_center;
    std::int64_t check_samples = 10000;
    std::optional<double> check_gamma, check_delta;
    double check_radius = 0.2;
    check_cmd->add_option("--name", check_name, "checker name")->required();
    check_cmd->add_option("--problem", problem_id, "zoo instance id")->required();
    check_cmd->add_option("--samples", check_samples, "sample count");
    check_cmd->add_option("--seed", seed, "sampling seed");
    check_cmd->add_option("--gamma", check_gamma, "envelope parameter where applicable");
    check_cmd->add_option("--delta", check_delta, "ball radius for assumption1");
    check_cmd->add_option("--center", check_center, "ball center for prox-lipschitz");
    check_cmd->add_option("--radius", check_radius, "ball radius for prox-lipschitz");

    // accept
    auto* accept_cmd = app.add_subcommand("accept", "run the acceptance suite");
    std::string accept_report;
    accept_cmd->add_option("--seed", seed, "suite seed");
    accept_cmd->add_option("--report", accept_report, "JSON report path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (prox_cmd->parsed())
            return cmd_prox(problem_id, prox_lambda, prox_x, prox_grid_step, prox_tol, prox_radius);
        if (inner_cmd->parsed())
            return cmd_inner(problem_id, inner_x, inner_gamma, inner_lambda, inner_sigma,
                             inner_tol_opt, inner_delta);
        if (run_cmd->parsed()) {
            ExperimentConfig cfg = !run_config.empty() ? load_config(run_config)
                                                       : default_experiment(problem_id);
            if (run_config.empty() || run_cmd->count("--problem"))
                cfg.problem_id = problem_id;
            if (!run_x0.empty()) cfg.x0 = parse_point(run_x0);
            if (!run_gamma.empty()) cfg.gamma = parse_sequence_arg(run_gamma);
            if (!run_lambda.empty()) cfg.lambda = parse_sequence_arg(run_lambda);
            if (run_lambda_bar) cfg.lambda_bar = *run_lambda_bar;
            if (!run_x_bar.empty()) cfg.x_bar = parse_point(run_x_bar);
            if (run_delta) cfg.delta = *run_delta;
            if (run_sigma) cfg.sigma = run_sigma;
            if (run_eps) cfg.eps = *run_eps;
            if (run_max_iter) cfg.max_iter = *run_max_iter;
            if (run_inner_tol) cfg.inner_tol = *run_inner_tol;
            if (run_cmd->count("--seed")) cfg.seed = seed;
            return cmd_run(cfg, run_out);
        }
        if (bench_cmd->parsed()) return cmd_bench(problem_id, bench_eps, bench_out, bench_x0);
        if (check_cmd->parsed())
            return cmd_check(check_name, problem_id, check_samples, seed, check_gamma, check_delta,
                             check_center, check_radius);
        if (accept_cmd->parsed()) {
            const std::string report =
                output_path(accept_report, "acceptance_report.json");
            return run_acceptance_suite(seed, report) ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
