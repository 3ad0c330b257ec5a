#pragma once

#include <span>
#include <string>

#include "odecond/integrators.hpp"

namespace odecond {

/// Ground-truth states at the requested query times, plus how trustworthy
/// they are. Systems with a closed-form flow are evaluated directly
/// (certificate 0); everything else is integrated with rk4 and step-halving
/// until two consecutive refinements agree at every query time.
struct ReferenceResult {
    Trajectory trajectory;  // states exactly at the query times
    double certificate = 0.0;
    int refinements = 0;
};

/// Query times must be nondecreasing and inside [t0, t_final]; the halving
/// starts from sub-step (t_final - t0) / 1e4 and gives up (with a
/// reference_precision_error) after 6 halvings.
ReferenceResult reference_trajectory(const System& sys, std::span<const double> x0, double t0,
                                     double t_final, std::span<const double> query_times);

/// Euclidean global-error samples ‖approx(t) - reference(t)‖ at query times.
struct ErrorCurve {
    std::vector<double> times;
    std::vector<double> errors;
    double h = 0.0;  // approximation step
    std::string method_name;
    std::string system_name;
    double reference_certificate = 0.0;
};

/// Both trajectories must contain every query time as a grid point (queries
/// snap to the nearest grid point, never by h/2 or more). Mismatched system
/// names or initial states are a usage error.
ErrorCurve global_error(const Trajectory& approx, const Trajectory& reference,
                        std::span<const double> query_times, double reference_certificate = 0.0);

}  // namespace odecond
