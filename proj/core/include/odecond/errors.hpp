#pragma once

#include <stdexcept>
#include <string>

namespace odecond {

/// Caller violated a precondition (bad arguments, mismatched shapes, unknown names).
/// Maps to CLI exit code 1.
class usage_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Base for runtime numerical failures. Maps to CLI exit code 2.
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A right-hand side, Jacobian, or exact flow produced a non-finite value.
class numeric_domain_error : public numerical_error {
public:
    using numerical_error::numerical_error;
};

/// An integration step produced non-finite state; carries the failure site.
class blow_up_error : public numerical_error {
public:
    blow_up_error(const std::string& what, double t, std::string method, double h,
                  long step_index = -1)
        : numerical_error(what), t(t), method(std::move(method)), h(h), step_index(step_index) {}

    double t;
    std::string method;
    double h;
    long step_index;  // -1 when the failure is not tied to a trajectory step
};

/// Step-halving failed to certify a reference trajectory within the refinement budget.
class reference_precision_error : public numerical_error {
public:
    using numerical_error::numerical_error;
};

}  // namespace odecond
