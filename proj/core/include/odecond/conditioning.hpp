#pragma once

#include <span>
#include <string>

#include "odecond/variational.hpp"

namespace odecond {

/// E(t) sampled at query times. E(t_q) is the composite-trapezoid
/// discretization of the integral of ‖Phi(t_q, s)‖ over s in [t0, t_q] on
/// the trajectory grid. Values are carried both directly (saturating to inf)
/// and in log form so strongly expanding systems stay classifiable.
struct ConditioningCurve {
    std::vector<double> query_times;     // snapped to the trajectory grid
    std::vector<double> original_times;  // as requested
    std::vector<double> values;          // E
    std::vector<double> log_values;      // log E (-inf where E = 0)
    double h = 0.0;
    std::string system_name;
    std::string method_name;
};

/// Evaluates E at each query time by backward accumulation: P starts at the
/// identity and picks up one transition matrix per grid step, with one norm
/// evaluation per step. Queries snap to the nearest grid point (always
/// within h/2); query times outside [t0, t_final] are a usage error.
/// Accumulation order is fixed, so results are bitwise reproducible.
/// Queries are independent and may be evaluated on `workers` threads
/// (0 = pick automatically); the worker count never changes the values.
ConditioningCurve conditioning_curve(const TransitionSequence& seq,
                                     std::span<const double> query_times,
                                     MatrixNorm norm_kind = MatrixNorm::spectral,
                                     int workers = 0);

/// `count` evenly spaced times spanning [t0, t_final], endpoints included.
std::vector<double> uniform_queries(double t0, double t_final, int count);

enum class GrowthClass { constant, linear, exponential, undetermined };

std::string_view to_string(GrowthClass c);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

struct GrowthThresholds {
    double delta_const = 0.05;     // constancy-ratio cutoff for Constant
    double r_squared_cutoff = 0.99;
    double rho_min = 0.1;          // minimum exp rate for Exponential
};

struct GrowthReport {
    GrowthClass growth_class = GrowthClass::undetermined;
    LineFit tail_linear_fit;           // on (t, E)
    LineFit tail_exp_fit;              // on (t, log E); slope is the rate
    double constancy_ratio = 0.0;      // (E(T) - E(T/2)) / E(T)
    GrowthThresholds thresholds;
    double tail_start = 0.0;
    double tail_end = 0.0;
    int tail_count = 0;
};

/// Deterministic decision rule on the tail window [midpoint(t0, T), T],
/// evaluated strictly in order: Constant, Linear, Exponential, Undetermined.
/// Requires at least 16 query points.
GrowthReport classify_growth(const ConditioningCurve& curve, const GrowthThresholds& params = {});

}  // namespace odecond
