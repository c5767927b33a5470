#pragma once

#include <string>
#include <vector>

namespace pairdeg {

/// Outcome of one reproduction check on the three-level reference model.
struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    /// Measured values, or the error that stopped the check.
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    int threads = 1;
    /// Empty runs every criterion; otherwise only the listed ids.
    std::vector<int> only;
};

/// Runs criteria 1..10 in order. Exceptions inside a check fail that check
/// only.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

/// "PASS  3  delta slopes  (0.12 s)  slopes=(...)"
std::string format_result(const CriterionResult& result);

}  // namespace pairdeg
