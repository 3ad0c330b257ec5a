#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "odecond/matrix.hpp"
#include "odecond/vec.hpp"

namespace odecond {

using RhsFn = std::function<void(double t, std::span<const double> x, std::span<double> dx)>;
using JacFn = std::function<void(double t, std::span<const double> x, Matrix& jac)>;
/// Closed-form flow map: x(t) for the solution started at x0 at time 0.
/// Built-in systems are autonomous, so callers shift time for t0 != 0.
using FlowFn = std::function<void(double t, std::span<const double> x0, std::span<double> x)>;

/// An ODE right-hand side x' = f(t, x). f is expected to be continuous in t
/// and locally Lipschitz in x (smooth for the variational machinery); this is
/// a documented precondition, not something the library can check.
struct System {
    std::string name;
    int dimension = 0;
    RhsFn rhs;
    JacFn jacobian;      // optional analytic Jacobian df/dx
    FlowFn exact;        // optional closed-form flow
    Vec default_x0;
    std::string regime;  // short tag for listings: "fixed-point", "cycle", ...
    std::string description;

    bool has_jacobian() const { return static_cast<bool>(jacobian); }
    bool has_exact() const { return static_cast<bool>(exact); }
};

/// f(t, x) with dimension and finiteness checks. Pure: identical inputs give
/// bitwise identical outputs.
Vec evaluate(const System& sys, double t, std::span<const double> x);

/// Closed-form flow at time t from x0 (requires sys.has_exact()).
Vec evaluate_exact(const System& sys, double t, std::span<const double> x0);

/// Analytic Jacobian when available, otherwise central finite differences
/// with per-component step cbrt(eps) * max(1, |x_i|).
Matrix jacobian_at(const System& sys, double t, std::span<const double> x);

/// Central finite-difference Jacobian (always; ignores sys.jacobian).
Matrix finite_difference_jacobian(const System& sys, double t, std::span<const double> x);

/// Relative Frobenius discrepancy between analytic and finite-difference
/// Jacobians at (t, x); used by the gradient checks.
double jacobian_discrepancy(const System& sys, double t, std::span<const double> x);

/// Benchmark suite spanning the three stability regimes plus contrast cases:
/// decay, expand, rotation, stable_focus, vdp, torus4, lorenz.
std::vector<System> builtin_suite();

/// Lookup by name in builtin_suite(); throws usage_error for unknown names.
System find_system(std::string_view name);

}  // namespace odecond
