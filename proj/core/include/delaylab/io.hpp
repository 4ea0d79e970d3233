#pragma once

#include "delaylab/connectivity.hpp"
#include "delaylab/dynamics.hpp"
#include "delaylab/evolution.hpp"
#include "delaylab/metrics.hpp"

#include <iosfwd>
#include <string>

namespace delaylab {

/// Raised for malformed documents; `line` is 1-based (0 when unknown).
class ParseError : public ArgumentError {
public:
    ParseError(const std::string& message, int line) : ArgumentError(message), line_(line) {}
    [[nodiscard]] int line() const noexcept { return line_; }

private:
    int line_;
};

/// Shortest round-trip decimal form.
[[nodiscard]] std::string format_number(double value);

// JSON documents:
//   weights  {"n", "kind": "continuous"|"discrete", "breakpoints", "segments", "horizon"}
//   delays   {"n", "kind": "constant"|"piecewise_constant"|"sawtooth", "bound", "breakpoints", "segments"}
//   certificate {"kind", "sequence", "epsilon", "K", "ell", "verified_horizon"}
// Segments are lists of matrices given as lists of rows.

[[nodiscard]] std::string weights_to_json(const WeightSchedule& schedule);
[[nodiscard]] WeightSchedule weights_from_json(const std::string& text);
[[nodiscard]] std::string delays_to_json(const DelaySchedule& delays);
[[nodiscard]] DelaySchedule delays_from_json(const std::string& text);
[[nodiscard]] std::string certificate_to_json(const ConnectivityCertificate& certificate);
[[nodiscard]] ConnectivityCertificate certificate_from_json(const std::string& text);

[[nodiscard]] std::string read_text_file(const std::string& path);

/// Header `t,agent,coord,value`; prehistory samples included.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);
/// Header `t,D`.
void write_diameter_csv(std::ostream& out, const DiameterSeries& series);
/// Header `# t_star=<from>,t=<to>` followed by n comma-separated rows.
void write_matrix_csv(std::ostream& out, const EvolutionaryMatrix& matrix);

}  // namespace delaylab
