#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace robest {

/// Outcome of one property suite.
struct CheckResult {
    int         id = 0;
    std::string name;
    bool        passed        = false;
    bool        informational = false;  ///< reported, never fails the suite
    std::string detail;
    double      seconds = 0.0;
};

struct CheckOptions {
    std::size_t           population = 100;  ///< random systems per population suite
    std::filesystem::path scratch_dir;       ///< determinism runs; temp dir when empty
};

CheckResult check_exponential_envelopes(const CheckOptions& options);
CheckResult check_theorem2_population(const CheckOptions& options);

/// Criteria sharing the random affine-A population: thm1 dominance,
/// Gramian-baseline dominance, and the informational conservatism comparison.
std::vector<CheckResult> check_theorem1_population(const CheckOptions& options);

CheckResult check_oracle_agreement(const CheckOptions& options);
CheckResult check_closed_forms(const CheckOptions& options);
CheckResult check_metric_contract(const CheckOptions& options);
CheckResult check_determinism(const CheckOptions& options);

/// All of the above, ordered by id.
std::vector<CheckResult> run_property_suites(const CheckOptions& options = {});

}  // namespace robest
