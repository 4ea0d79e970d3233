#pragma once

#include <Eigen/Dense>

#include <stdexcept>

namespace delaylab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Error taxonomy. Every failure that the operations document surfaces as one
// of these; callers that do not care can catch std::exception.

/// A time or index lies outside the covered horizon.
class OutOfRangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// A malformed argument (reversed interval, non-positive step, ...).
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A data invariant was violated (non-stochastic rows, negative weights, ...).
class InvariantError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The operation does not apply to this kind of schedule.
class KindError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Discrete-to-continuous reduction needs strictly positive diagonals.
class ReductionDomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A coupling gain evaluated outside its admissible range.
class CouplingError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

inline constexpr double kRowSumTolerance = 1e-12;

/// Half-open time interval [begin, end).
struct Interval {
    double begin = 0.0;
    double end = 0.0;
};

}  // namespace delaylab
