#pragma once

#include <cstdint>
#include <string>

namespace moreau {

/// Outcome of an empirical (sampled) verification. `worst_violation` is the
/// largest amount by which the checked inequality was broken over all
/// samples (LHS - RHS, positive means broken); `passed` iff it stays within
/// the check's declared slack. `witness` serializes the sample achieving it.
struct CheckReport {
    std::string name;
    bool passed = false;
    double worst_violation = 0.0;
    std::string witness;
    std::int64_t samples_used = 0;
};

}  // namespace moreau
