#pragma once

#include "delaylab/dynamics.hpp"
#include "delaylab/schedule.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace delaylab::tools {

inline constexpr const char* kSpecVersion = "1.0";

/// Malformed scenario file; the message starts with "<file>:<line>:".
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& message, int line) : std::runtime_error(message), line_(line) {}
    [[nodiscard]] int line() const noexcept { return line_; }

private:
    int line_;
};

enum class Coupling { linear, inverse_square };

struct DisturbanceSpec {
    StepSignal signal;
    std::string kind;  // geometric | constant-mass | steps
};

struct Expectations {
    std::optional<bool> consensus;
    double consensus_tolerance = 1e-6;
    std::optional<double> final_diameter_max;
    std::optional<double> final_diameter_ratio_max;  ///< D(end) / D(start)
    std::optional<double> diameter_limit;
    double diameter_limit_tolerance = 1e-6;
    std::optional<bool> contraction;
    std::optional<double> hull_final_max;
    std::optional<double> cauchy_max;
    std::optional<double> reduction_max;
    std::optional<bool> masses_vanishing;
    std::optional<bool> tail_vanishing;
    std::optional<double> component_gap_min;
};

struct NitsSpec {
    std::vector<double> sequence;  ///< empty: uniform with `period`
    double period = 0.0;
    double ratio_bound = 1.0;
};

struct Scenario {
    std::string spec_version;
    std::string name;
    std::string description;
    std::string covers;
    std::string generator;
    std::filesystem::path source;

    WeightSchedule weights = WeightSchedule::constant(Matrix::Zero(1, 1), 1.0);
    DelaySchedule delays = DelaySchedule::none(1);
    InitialCondition initial;
    std::vector<Matrix> window;  ///< discrete runs: x(-h) ... x(0)
    std::optional<DisturbanceSpec> disturbance;
    std::optional<LeaderConfig> leaders;
    std::optional<TargetSet> target;
    std::optional<StepSignal> damping;
    Coupling coupling = Coupling::linear;

    double t_end = 0.0;
    double step = 0.25;
    bool plots = true;

    std::vector<std::string> analyses;
    double epsilon = 0.5;
    std::optional<NitsSpec> nits;
    std::vector<std::vector<int>> components;
    Expectations expect;

    [[nodiscard]] bool wants(const std::string& analysis) const;
    [[nodiscard]] bool discrete() const { return weights.is_discrete(); }
};

/// Parses and validates a scenario file. File references inside it are
/// resolved against its directory.
[[nodiscard]] Scenario load_scenario(const std::filesystem::path& path);
[[nodiscard]] Scenario parse_scenario(const std::string& text, const std::filesystem::path& source);

}  // namespace delaylab::tools
