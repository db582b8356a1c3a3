#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "moreau/algorithm.hpp"
#include "moreau/errors.hpp"
#include "moreau/fixed_point.hpp"
#include "moreau/io.hpp"
#include "moreau/zoo.hpp"

namespace moreau {

/// A fully specified experiment: one zoo instance, schedule, locality data
/// and solver tolerances. Built either from a JSON config file or from the
/// instance preset plus CLI overrides; validated before any run.
struct ExperimentConfig {
    std::string problem_id;
    Vec x0;
    StepSequence gamma;
    StepSequence lambda;
    double lambda_bar = 0.0;
    Vec x_bar;
    double delta = 0.0;
    std::optional<double> sigma;  // empty: sigma = 1/L^2 policy
    double eps = 1e-8;
    std::int64_t max_iter = 1000;
    double inner_tol = 1e-10;
    std::uint64_t seed = 0;
    std::string out_path;
};

/// Config prefilled from the instance preset; callers override fields and
/// then validate through prepare_experiment.
inline ExperimentConfig default_experiment(const std::string& problem_id) {
    const ZooEntry zoo = make_zoo_instance(problem_id);
    ExperimentConfig c;
    c.problem_id = problem_id;
    c.x0 = zoo.preset.x0;
    c.gamma = StepSequence::constant(zoo.preset.gamma);
    c.lambda = StepSequence::constant(zoo.preset.lambda);
    c.lambda_bar = zoo.preset.lambda_bar;
    c.x_bar = zoo.stationary.x_bar;
    c.delta = zoo.preset.delta;
    c.eps = zoo.preset.eps;
    return c;
}

/// Everything a run needs, derived from a validated config. beta is the
/// smallest admissible radius over the schedule horizon.
struct PreparedExperiment {
    ZooEntry zoo;
    Schedule schedule;
    LocalityConfig locality;
    ExperimentConfig config;
};

inline PreparedExperiment prepare_experiment(const ExperimentConfig& c) {
    PreparedExperiment prep;
    prep.zoo = make_zoo_instance(c.problem_id);
    prep.config = c;
    prep.schedule = Schedule{c.gamma, c.lambda, c.lambda_bar, prep.zoo.problem.rho};

    const CheckReport sched = validate_schedule(prep.schedule, std::max<std::int64_t>(c.max_iter, 1));
    if (!sched.passed) throw ScheduleError("invalid schedule: " + sched.witness);

    // beta over the horizon: sequences are constant past their last entry,
    // so the distinct (gamma, lambda) pairs are covered by the prefix.
    const auto prefix = static_cast<std::int64_t>(
        std::max(c.gamma.values.size(), c.lambda.values.size()));
    double beta = std::numeric_limits<double>::infinity();
    for (std::int64_t k = 0; k < std::min(prefix, std::max<std::int64_t>(c.max_iter, 1)); ++k) {
        const ContractionConstants cc = derive_constants(
            c.gamma.at(k), c.lambda.at(k), prep.zoo.problem.rho, c.delta, c.sigma);
        beta = std::min(beta, cc.beta);
    }
    prep.locality = LocalityConfig{c.x_bar, c.delta, beta};

    if (c.x0.size() != c.x_bar.size())
        throw ConfigError("x0 and x_bar dimensions differ");
    if (static_cast<int>(c.x0.size()) != prep.zoo.problem.dimension)
        throw ConfigError("x0 dimension does not match problem");
    if (distance(c.x0, c.x_bar) > beta)
        throw PreconditionError("x0 in B[x_bar, beta] violated (||x0 - x_bar|| = " +
                                format_double(distance(c.x0, c.x_bar)) + " > beta = " +
                                format_double(beta) + ")");
    if (!(c.eps > 0.0)) throw ParameterError("eps > 0 violated");
    if (!(c.inner_tol > 0.0)) throw ParameterError("inner_tol > 0 violated");
    if (c.max_iter < 1) throw ParameterError("max_iter >= 1 violated");
    return prep;
}

inline RunReport execute(const PreparedExperiment& prep) {
    const std::optional<double> f_star =
        prep.zoo.stationary.certified
            ? std::optional<double>(prep.zoo.problem.value(prep.zoo.stationary.x_bar))
            : std::nullopt;
    return run(prep.zoo.problem, prep.config.x0, prep.schedule, prep.locality, prep.config.eps,
               prep.config.max_iter, prep.config.inner_tol, prep.config.sigma, f_star);
}

namespace detail {

inline Vec json_point(const Json& j, const std::string& key) {
    if (j.is_number()) return {j.get<double>()};
    if (j.is_array()) {
        Vec v;
        for (const auto& e : j) {
            if (!e.is_number()) throw ConfigError("field '" + key + "' must hold numbers");
            v.push_back(e.get<double>());
        }
        if (v.empty()) throw ConfigError("field '" + key + "' is an empty point");
        return v;
    }
    throw ConfigError("field '" + key + "' must be a number or an array of numbers");
}

inline StepSequence parse_sequence_file(const std::string& path) {
    std::istringstream in(read_file(path));
    StepSequence s;
    double v = 0.0;
    while (in >> v) s.values.push_back(v);
    if (s.values.empty()) throw ConfigError("sequence file '" + path + "' holds no numbers");
    return s;
}

inline StepSequence json_sequence(const Json& j, const std::string& key) {
    if (j.is_number()) return StepSequence::constant(j.get<double>());
    if (j.is_string()) return parse_sequence_file(j.get<std::string>());
    if (j.is_array()) {
        StepSequence s;
        for (const auto& e : j) {
            if (!e.is_number()) throw ConfigError("field '" + key + "' must hold numbers");
            s.values.push_back(e.get<double>());
        }
        if (s.values.empty()) throw ConfigError("field '" + key + "' is an empty sequence");
        return s;
    }
    throw ConfigError("field '" + key + "' must be a number, array, or sequence-file path");
}

}  // namespace detail

/// Parses and validates a JSON experiment config. Unknown keys are
/// rejected; omitted fields fall back to the instance preset (sigma policy
/// 1/L^2, inner_tol 1e-10). Validation failures name the violated
/// precondition.
inline ExperimentConfig load_config(const std::string& path) {
    Json doc;
    try {
        doc = Json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config parse error in '" + path + "' at byte " +
                          std::to_string(e.byte) + ": " + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config root must be a JSON object");

    static const std::set<std::string> kKnown = {
        "problem", "x0",       "gamma",    "lambda", "lambda_bar", "x_bar",
        "delta",   "sigma",    "eps",      "max_iter", "inner_tol", "seed",
        "out"};
    for (const auto& item : doc.items())
        if (!kKnown.count(item.key()))
            throw ConfigError("unknown config key '" + item.key() + "'");
    if (!doc.contains("problem") || !doc["problem"].is_string())
        throw ConfigError("config requires a string 'problem' field");

    ExperimentConfig c = default_experiment(doc["problem"].get<std::string>());
    if (doc.contains("x0")) c.x0 = detail::json_point(doc["x0"], "x0");
    if (doc.contains("gamma")) c.gamma = detail::json_sequence(doc["gamma"], "gamma");
    if (doc.contains("lambda")) c.lambda = detail::json_sequence(doc["lambda"], "lambda");
    if (doc.contains("lambda_bar")) c.lambda_bar = doc["lambda_bar"].get<double>();
    if (doc.contains("x_bar")) c.x_bar = detail::json_point(doc["x_bar"], "x_bar");
    if (doc.contains("delta")) c.delta = doc["delta"].get<double>();
    if (doc.contains("sigma")) c.sigma = doc["sigma"].get<double>();
    if (doc.contains("eps")) c.eps = doc["eps"].get<double>();
    if (doc.contains("max_iter")) c.max_iter = doc["max_iter"].get<std::int64_t>();
    if (doc.contains("inner_tol")) c.inner_tol = doc["inner_tol"].get<double>();
    if (doc.contains("seed")) c.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("out")) c.out_path = doc["out"].get<std::string>();

    prepare_experiment(c);  // validate now so errors surface at load time
    return c;
}

}  // namespace moreau
