#pragma once

#include <stdexcept>
#include <string>

namespace qdd {

// Bad arguments or malformed inputs (wrong dimensions, out-of-range sites,
// invalid configuration values).  The CLI maps these to exit code 2.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Requested operator space exceeds the configured side-length limit.
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A matrix-logarithm eigenphase landed too close to the principal-branch cut;
// the caller must shorten the evolution interval.
struct BranchAmbiguityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical failure at run time: negative overlaps, trace drift, loss of
// positivity in the integrator.  CLI exit code 1.
struct NumericsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A finite-strength control window does not fit in its pulse interval.
struct SchedulingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A checked algebraic identity failed beyond tolerance.  CLI exit code 1.
struct PropertyViolationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace qdd
