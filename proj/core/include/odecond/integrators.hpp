#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "odecond/systems.hpp"
#include "odecond/vec.hpp"

namespace odecond {

/// Explicit Runge-Kutta tableau. `a` is stages x stages row-major and must be
/// strictly lower triangular.
struct ButcherTableau {
    std::string name;
    int order = 0;
    int stages = 0;
    std::vector<double> a;
    std::vector<double> b;
    std::vector<double> c;

    double a_at(int i, int j) const { return a[static_cast<size_t>(i) * stages + j]; }
};

const ButcherTableau& euler_tableau();
const ButcherTableau& midpoint_tableau();
const ButcherTableau& rk4_tableau();

/// "euler", "midpoint" or "rk4"; throws usage_error otherwise.
const ButcherTableau& method_by_name(std::string_view name);

/// Checks consistency (sum b = 1), the row-sum condition c_i = sum_j a_ij and
/// explicitness; throws usage_error on violation.
void validate(const ButcherTableau& tableau);

/// A dense fixed-step trajectory. Interior steps are uniformly h; the final
/// step may be shortened so that times.back() hits t_final exactly.
struct Trajectory {
    std::vector<double> times;
    std::vector<Vec> states;
    double h = 0.0;  // nominal step
    std::string system_name;
    std::string method_name;  // integrator name, or "exact"/"reference"

    int dimension() const { return states.empty() ? 0 : static_cast<int>(states.front().size()); }
    size_t step_count() const { return times.empty() ? 0 : times.size() - 1; }
};

/// One explicit Runge-Kutta step from (t, x) with step h.
/// Stage sums run left to right in a fixed order, so results are bitwise
/// reproducible. Throws blow_up_error if any stage goes non-finite.
Vec rk_step(const ButcherTableau& method, const System& sys, double t, std::span<const double> x,
            double h);

/// Repeated rk_step over [t0, t_final] with ceil((t_final-t0)/h) steps.
Trajectory integrate(const ButcherTableau& method, const System& sys, std::span<const double> x0,
                     double t0, double t_final, double h);

/// Number of steps integrate() will take (shared with the variational and
/// study modules so their grids match bitwise).
long integration_step_count(double t0, double t_final, double h);

/// Grid times t0 + j*h for j < n, with times[n] = t_final.
std::vector<double> integration_grid(double t0, double t_final, double h);

namespace detail {

/// Workspace for rk stages so repeated stepping does not allocate.
struct StepWorkspace {
    std::vector<Vec> k;       // stage derivatives
    std::vector<Vec> stage_x; // stage states (inputs to f)
    Vec acc;

    void resize(int stages, int dim);
};

/// Computes all stage states/derivatives and the next state into ws.acc.
/// Both integrate() and the variational propagation use this routine, so the
/// state arithmetic of the two paths is identical.
void rk_stages(const ButcherTableau& method, const System& sys, double t,
               std::span<const double> x, double h, StepWorkspace& ws);

}  // namespace detail

}  // namespace odecond
