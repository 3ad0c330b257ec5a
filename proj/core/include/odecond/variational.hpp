#pragma once

#include <span>

#include "odecond/integrators.hpp"
#include "odecond/matrix.hpp"

namespace odecond {

/// Per-step transition matrices M_j ~ Phi(t_{j+1}, t_j) along a trajectory,
/// obtained by integrating the variational equation Psi' = J(t, x(t)) Psi
/// jointly with the state, with Psi reset to the identity at every step.
/// Phi(t_n, t_j) is the ordered product M_{n-1} * ... * M_j.
struct TransitionSequence {
    Trajectory base;
    std::vector<Matrix> steps;

    int dimension() const { return base.dimension(); }
};

/// Integrates the augmented system (x, Psi). Jacobians are evaluated at the
/// Runge-Kutta stage states of the simultaneously integrated x, which keeps
/// the variational solve at the method's order. The base trajectory is
/// bitwise identical to integrate()'s output.
TransitionSequence transition_sequence(const ButcherTableau& method, const System& sys,
                                       std::span<const double> x0, double t0, double t_final,
                                       double h);

/// A matrix stored as mantissa * exp(log_scale) with the mantissa 2-norm kept
/// in [1/2, 2] (or zero). Long products on expanding systems stay
/// representable this way.
struct ScaledMatrix {
    Matrix mantissa;
    double log_scale = 0.0;

    /// mantissa * exp(log_scale); overflows to inf entries if log_scale is
    /// beyond double range.
    Matrix represented() const;
};

/// Normalizes m into the mantissa band.
ScaledMatrix make_scaled(const Matrix& m);

/// Phi(t_n, t_j) as an ordered product with renormalization after every
/// multiply; transition(seq, j, j) is the identity with log_scale 0.
/// Requires 0 <= j <= n <= seq.steps.size().
ScaledMatrix transition(const TransitionSequence& seq, size_t j, size_t n);

/// A nonnegative scalar carried in log form so magnitudes beyond double
/// range survive. `value` saturates to +inf past DBL_MAX; `log` is -inf at 0.
struct LogValue {
    double value = 0.0;
    double log = 0.0;
};

LogValue norm2(const ScaledMatrix& m);

}  // namespace odecond
