#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "moreau/algorithm.hpp"
#include "moreau/config.hpp"
#include "moreau/vec.hpp"

namespace moreau {

/// One benchmark row: the proximal run and the subgradient baseline driven
/// to the same step tolerance, next to the theoretical iteration bound.
struct BenchRow {
    double eps = 0.0;
    std::int64_t T_prox = 0;
    double bound_T = 0.0;
    std::int64_t T_subgrad = 0;
    double f_final_prox = 0.0;
    double f_final_subgrad = 0.0;
};

/// Runs the proximal algorithm and the diminishing-step subgradient
/// baseline from the instance preset (or `x0_override`) for each eps. Rows
/// come back in input order.
inline std::vector<BenchRow> bench(const std::string& problem_id, const std::vector<double>& eps_list,
                                   std::int64_t baseline_cap = 200000,
                                   const std::optional<Vec>& x0_override = std::nullopt) {
    std::vector<BenchRow> rows;
    rows.reserve(eps_list.size());
    for (double eps : eps_list) {
        ExperimentConfig cfg = default_experiment(problem_id);
        cfg.eps = eps;
        if (x0_override) cfg.x0 = *x0_override;
        const PreparedExperiment prep = prepare_experiment(cfg);
        const RunReport prox_rep = execute(prep);

        const RunReport sub_rep = subgradient_baseline(
            prep.zoo.problem, cfg.x0, baseline_cap, StepRule{StepRule::Kind::diminishing, 0.1}, eps);

        BenchRow row;
        row.eps = eps;
        row.T_prox = prox_rep.T;
        row.bound_T = prox_rep.complexity_bound;
        row.T_subgrad = sub_rep.T;
        row.f_final_prox = prox_rep.records.empty() ? prep.zoo.problem.value(cfg.x0)
                                                    : prox_rep.records.back().f_x_next;
        row.f_final_subgrad = sub_rep.records.empty() ? prep.zoo.problem.value(cfg.x0)
                                                      : sub_rep.records.back().f_x_next;
        rows.push_back(row);
    }
    return rows;
}

inline std::string bench_csv(const std::vector<BenchRow>& rows) {
    std::string out = "eps,T_prox,bound_T,T_subgrad,f_final_prox,f_final_subgrad\n";
    for (const BenchRow& r : rows) {
        out += format_double(r.eps);
        out += ',' + std::to_string(r.T_prox);
        out += ',' + format_double(r.bound_T);
        out += ',' + std::to_string(r.T_subgrad);
        out += ',' + format_double(r.f_final_prox);
        out += ',' + format_double(r.f_final_subgrad);
        out += '\n';
    }
    return out;
}

}  // namespace moreau
