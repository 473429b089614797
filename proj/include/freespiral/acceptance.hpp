#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace freespiral {

struct CriterionInfo {
    int id = 0;
    std::string title;
};

/// The acceptance suite in run order.
const std::vector<CriterionInfo>& acceptance_criteria();

struct AcceptanceOptions {
    unsigned threads = 1;
    std::uint64_t seed = 1;
    /// Criterion whose tolerances are made 100x stricter (runtime budgets excepted).
    std::optional<int> tighten;
    /// Scratch directory for the determinism check.
    std::filesystem::path scratch = "verify_scratch";
    /// Subset to run; empty runs everything.
    std::vector<int> only;
};

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

/// "[PASS] 3 title: detail (1.2 s)"
std::string format_result(const CriterionResult& r);

/// Runs the selected criteria; `on_result` sees each one as it finishes.
/// Exceptions inside a criterion turn into a failed result.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt,
                                            const std::function<void(const CriterionResult&)>& on_result = {});

}  // namespace freespiral
