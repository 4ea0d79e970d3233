#pragma once

#include "config.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace delaylab::tools {

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct RunOptions {
    std::filesystem::path out_dir;
    std::optional<double> step;  ///< overrides the scenario step
    bool plots = true;
};

struct RunResult {
    std::string name;
    std::filesystem::path out_dir;
    std::vector<Check> checks;
    [[nodiscard]] bool ok() const;
};

/// Simulates, analyses and writes trajectory.csv, diameter.csv, report.json
/// and (optionally) SVG plots into options.out_dir. Deterministic.
[[nodiscard]] RunResult run_scenario(const Scenario& scenario, const RunOptions& options);

/// Exit status convention: 0 all checks pass, 2 a check failed, 1 error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitCheckFailed = 2;

}  // namespace delaylab::tools
