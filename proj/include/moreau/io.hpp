#pragma once

#include <fstream>
#include <string>

#include "json.hpp"
#include "moreau/algorithm.hpp"
#include "moreau/check_report.hpp"
#include "moreau/envelope.hpp"
#include "moreau/errors.hpp"
#include "moreau/fixed_point.hpp"
#include "moreau/vec.hpp"

namespace moreau {

using Json = nlohmann::ordered_json;

inline Json to_json(const CheckReport& r) {
    return Json{{"name", r.name},
                {"passed", r.passed},
                {"worst_violation", r.worst_violation},
                {"witness", r.witness},
                {"samples_used", r.samples_used}};
}

inline Json to_json(const ProxResult& r) {
    return Json{{"y", r.y},
                {"envelope_value", r.envelope_value},
                {"gradient", r.gradient},
                {"method", to_string(r.method)},
                {"residual", r.residual}};
}

inline Json to_json(const InnerSolveResult& r) {
    return Json{{"z", r.z},
                {"y", r.y},
                {"inner_iterations", r.inner_iterations},
                {"residual", r.residual},
                {"contraction_ratio_observed", r.contraction_ratio_observed}};
}

inline Json summary_json(const RunReport& r) {
    return Json{{"termination", to_string(r.termination)},
                {"T", r.T},
                {"sum_sq_steps", r.sum_sq_steps},
                {"complexity_bound", r.complexity_bound},
                {"x_final", r.x_final}};
}

/// One row per outer iteration; point coordinates are semicolon-joined so
/// the file stays plain CSV in any dimension.
inline std::string trace_csv(const RunReport& r) {
    std::string out =
        "k,x_k,f_x_next,step_norm,inner_iterations,inner_residual,descent_gap,fejer_ok,"
        "gamma_k,lambda_k\n";
    for (const IterationRecord& rec : r.records) {
        out += std::to_string(rec.k);
        out += ',' + format_point(rec.x_k);
        out += ',' + format_double(rec.f_x_next);
        out += ',' + format_double(rec.step_norm);
        out += ',' + std::to_string(rec.inner_iterations);
        out += ',' + format_double(rec.inner_residual);
        out += ',' + format_double(rec.descent_gap);
        out += rec.fejer_ok ? ",1" : ",0";
        out += ',' + format_double(rec.gamma_k);
        out += ',' + format_double(rec.lambda_k);
        out += '\n';
    }
    return out;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open '" + path + "' for writing");
    f << content;
    if (!f) throw ConfigError("write to '" + path + "' failed");
}

inline std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open '" + path + "' for reading");
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace moreau
