#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "moreau/bench.hpp"
#include "moreau/config.hpp"
#include "moreau/io.hpp"
#include "moreau/zoo.hpp"

using namespace moreau;

namespace {

constexpr std::uint64_t kSeed = 12345;

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path = temp_path(name);
    std::ofstream f(path, std::ios::binary);
    f << content;
    return path;
}

struct CliResult {
    int status = -1;
    std::string out;
};

CliResult run_cli(const std::string& args) {
    const std::string cmd = std::string(MOREAU_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::string out;
    std::size_t n = 0;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
    const int rc = pclose(pipe);
    return {WIFEXITED(rc) ? WEXITSTATUS(rc) : -1, out};
}

}  // namespace

TEST_CASE("minimal config picks up instance presets") {
    const std::string path = write_temp("moreau_cfg_min.json", R"({"problem": "example1"})");
    const ExperimentConfig cfg = load_config(path);
    CHECK(cfg.problem_id == "example1");
    CHECK(cfg.x0 == Vec{1.05});
    CHECK(cfg.gamma.at(0) == 0.1);
    CHECK(cfg.lambda.at(5) == 0.25);
    CHECK(cfg.lambda_bar == 0.15);
    CHECK(cfg.delta == 0.2);
    CHECK_FALSE(cfg.sigma.has_value());  // 1/L^2 policy
    CHECK(cfg.inner_tol == 1e-10);
}

TEST_CASE("config validation names the violated precondition") {
    SECTION("lambda above 1/rho") {
        const std::string path =
            write_temp("moreau_cfg_lam.json", R"({"problem": "example1", "lambda": 0.6})");
        try {
            load_config(path);
            FAIL("expected ScheduleError");
        } catch (const ScheduleError& e) {
            CHECK(std::string(e.what()).find("lambda < 1/rho") != std::string::npos);
        }
    }
    SECTION("sigma above 2/L^2") {
        const std::string path = write_temp(
            "moreau_cfg_sigma.json",
            R"({"problem": "quadratic", "gamma": 0.25, "lambda": 0.6, "lambda_bar": 0.4, "sigma": 0.2})");
        try {
            load_config(path);
            FAIL("expected ParameterError");
        } catch (const ParameterError& e) {
            CHECK(std::string(e.what()).find("sigma < 2/L^2") != std::string::npos);
        }
    }
    SECTION("x0 outside the admissible ball") {
        const std::string path =
            write_temp("moreau_cfg_x0.json", R"({"problem": "example1", "x0": 1.2})");
        CHECK_THROWS_AS(load_config(path), PreconditionError);
    }
}

TEST_CASE("config rejects unknown keys and malformed JSON") {
    const std::string bad_key =
        write_temp("moreau_cfg_key.json", R"({"problem": "example1", "typo": 1})");
    try {
        load_config(bad_key);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("unknown config key") != std::string::npos);
    }

    const std::string bad_json = write_temp("moreau_cfg_parse.json", "{ this is not json");
    try {
        load_config(bad_json);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("parse error") != std::string::npos);
    }

    CHECK_THROWS_AS(load_config(temp_path("moreau_cfg_missing.json")), ConfigError);
}

TEST_CASE("schedule sequences load from files") {
    const std::string seq = write_temp("moreau_gammas.txt", "0.1 0.1 0.12\n");
    const std::string path = write_temp(
        "moreau_cfg_seq.json",
        R"({"problem": "example1", "gamma": ")" + seq + R"("})");
    const ExperimentConfig cfg = load_config(path);
    CHECK(cfg.gamma.at(0) == 0.1);
    CHECK(cfg.gamma.at(2) == 0.12);
    CHECK(cfg.gamma.at(10) == 0.12);  // extended by the last entry
}

TEST_CASE("traces and reports are byte-deterministic") {
    const PreparedExperiment prep = prepare_experiment(default_experiment("example1"));
    const std::string csv_a = trace_csv(execute(prep));
    const std::string csv_b = trace_csv(execute(prep));
    CHECK(csv_a == csv_b);

    const std::string bench_a = bench_csv(bench("example1", {1e-1, 1e-2}));
    const std::string bench_b = bench_csv(bench("example1", {1e-1, 1e-2}));
    CHECK(bench_a == bench_b);

    const ZooEntry zoo = make_example1();
    const CheckReport rep_a = check_weak_convexity(zoo.problem, 2000, kSeed);
    const CheckReport rep_b = check_weak_convexity(zoo.problem, 2000, kSeed);
    CHECK(to_json(rep_a).dump() == to_json(rep_b).dump());
}

TEST_CASE("trace CSV carries the documented columns") {
    const PreparedExperiment prep = prepare_experiment(default_experiment("example1"));
    const std::string csv = trace_csv(execute(prep));
    CHECK(csv.rfind("k,x_k,f_x_next,step_norm,inner_iterations,inner_residual,descent_gap,"
                    "fejer_ok,gamma_k,lambda_k\n",
                    0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);  // header + T=2 rows
}

TEST_CASE("bench rows stay under the complexity bound") {
    for (const std::string& id : {std::string("example1"), std::string("abs-quadratic")}) {
        for (const BenchRow& row : bench(id, {1e-1, 1e-2, 1e-3})) {
            INFO(id << " at eps=" << row.eps);
            CHECK(static_cast<double>(row.T_prox) < row.bound_T);
            CHECK(row.T_prox <= row.T_subgrad);
        }
    }
    // the convex instance converges geometrically, far under the eps^-2 scale
    for (const BenchRow& row : bench("quadratic", {1e-3})) CHECK(row.T_prox <= 25);

    // a stationary start takes one zero step at every tolerance
    for (const BenchRow& row : bench("example1", {1e-1, 1e-2, 1e-3}, 200000, Vec{1.0}))
        CHECK(row.T_prox == 1);
}

TEST_CASE("run summary JSON exposes the termination data") {
    const PreparedExperiment prep = prepare_experiment(default_experiment("example1"));
    const Json summary = summary_json(execute(prep));
    CHECK(summary["termination"] == "step_below_eps");
    CHECK(summary["T"] == 2);
    CHECK(summary.contains("sum_sq_steps"));
    CHECK(summary.contains("complexity_bound"));
    CHECK(summary["x_final"].is_array());
}

TEST_CASE("cli: prox subcommand prints one JSON object") {
    const CliResult res = run_cli("prox --problem example1 --lambda 0.1 --x 1.05");
    REQUIRE(res.status == 0);
    const Json j = Json::parse(res.out);
    CHECK(j["y"][0].get<double>() == Catch::Approx(1.0).margin(1e-8));
    CHECK(j["gradient"][0].get<double>() == Catch::Approx(0.5).margin(1e-8));
    CHECK(j["method"] == "analytic");

    const CliResult grid = run_cli("prox --problem example1 --lambda 0.1 --x 1.05 --grid-step 1e-6");
    REQUIRE(grid.status == 0);
    CHECK(Json::parse(grid.out)["method"] == "grid");
}

TEST_CASE("cli: inner subcommand solves the fixed point") {
    const CliResult res =
        run_cli("inner --problem example1 --x 1.05 --gamma 0.1 --lambda 0.25 --tol 1e-10");
    REQUIRE(res.status == 0);
    const Json j = Json::parse(res.out);
    CHECK(j["z"][0].get<double>() == Catch::Approx(1.02).margin(1e-8));
    CHECK(j["y"][0].get<double>() == Catch::Approx(1.0).margin(1e-8));
}

TEST_CASE("cli: run subcommand writes the trace and prints a summary") {
    const std::string out = temp_path("moreau_cli_trace.csv");
    const CliResult res = run_cli("run --problem example1 --out " + out);
    REQUIRE(res.status == 0);
    const Json summary = Json::parse(res.out);
    CHECK(summary["termination"] == "step_below_eps");
    CHECK(summary["T"] == 2);
    const std::string csv = read_file(out);
    CHECK(csv.rfind("k,x_k,", 0) == 0);
}

TEST_CASE("cli: run accepts a sequence file for gamma") {
    const std::string seq = write_temp("moreau_cli_gammas.txt", "0.1 0.08\n");
    const std::string out = temp_path("moreau_cli_seq_trace.csv");
    const CliResult res =
        run_cli("run --problem example1 --gamma " + seq + " --lambda 0.25 --out " + out);
    REQUIRE(res.status == 0);
    CHECK(Json::parse(res.out)["termination"] == "step_below_eps");
}

TEST_CASE("cli: check and bench subcommands") {
    const CliResult check =
        run_cli("check --name weak-convexity --problem example1 --samples 2000 --seed 7");
    REQUIRE(check.status == 0);
    CHECK(Json::parse(check.out)["passed"] == true);

    const CliResult bench_res = run_cli("bench --problem example1 --eps 0.1 0.01");
    REQUIRE(bench_res.status == 0);
    CHECK(bench_res.out.rfind("eps,T_prox,bound_T,T_subgrad,f_final_prox,f_final_subgrad\n", 0) ==
          0);
}

TEST_CASE("cli: unknown problem id fails with a nonzero status") {
    const CliResult res = run_cli("prox --problem nope --lambda 0.1 --x 1.0");
    CHECK(res.status == 1);
}
