#include "odecond/reference.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "odecond/errors.hpp"

namespace odecond {

namespace {

// States at every target time, integrating each interval [targets[i],
// targets[i+1]] with rk4 in equal sub-steps no longer than sub_h. Target
// times are hit exactly, so no interpolation error enters the comparison.
std::vector<Vec> piecewise_states(const System& sys, std::span<const double> x0,
                                  std::span<const double> targets, double sub_h) {
    const ButcherTableau& rk4 = rk4_tableau();
    detail::StepWorkspace ws;
    ws.resize(rk4.stages, sys.dimension);

    std::vector<Vec> states;
    states.reserve(targets.size());
    Vec x(x0.begin(), x0.end());
    states.push_back(x);
    for (size_t i = 0; i + 1 < targets.size(); ++i) {
        const double a = targets[i];
        const double b = targets[i + 1];
        const double len = b - a;
        if (len == 0.0) {
            states.push_back(x);
            continue;
        }
        const long m = std::max<long>(1, static_cast<long>(std::ceil(len / sub_h - 1e-9)));
        const double hj = len / static_cast<double>(m);
        for (long k = 0; k < m; ++k) {
            const double t = a + static_cast<double>(k) * hj;
            detail::rk_stages(rk4, sys, t, x, hj, ws);
            if (!all_finite(ws.acc))
                throw blow_up_error("reference_trajectory: blow-up on system '" + sys.name + "'",
                                    t, "rk4", hj);
            x = ws.acc;
        }
        states.push_back(x);
    }
    return states;
}

double max_discrepancy(const std::vector<Vec>& a, const std::vector<Vec>& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, distance(a[i], b[i]));
    return m;
}

double max_state_norm(const std::vector<Vec>& xs) {
    double m = 0.0;
    for (const Vec& x : xs) m = std::max(m, norm(x));
    return m;
}

}  // namespace

ReferenceResult reference_trajectory(const System& sys, std::span<const double> x0, double t0,
                                     double t_final, std::span<const double> query_times) {
    if (!(t_final > t0)) throw usage_error("reference_trajectory: t_final must exceed t0");
    if (static_cast<int>(x0.size()) != sys.dimension)
        throw usage_error("reference_trajectory: x0 length does not match system dimension");
    if (!all_finite(x0)) throw usage_error("reference_trajectory: non-finite x0");
    if (query_times.empty()) throw usage_error("reference_trajectory: no query times");
    const double slack = 1e-9 * std::max(1.0, std::max(std::abs(t0), std::abs(t_final)));
    for (size_t i = 0; i < query_times.size(); ++i) {
        if (!(query_times[i] >= t0 - slack) || !(query_times[i] <= t_final + slack))
            throw usage_error("reference_trajectory: query time outside [t0, t_final]");
        if (i > 0 && query_times[i] < query_times[i - 1])
            throw usage_error("reference_trajectory: query times must be nondecreasing");
    }

    ReferenceResult result;
    Trajectory& tr = result.trajectory;
    tr.times.assign(query_times.begin(), query_times.end());
    tr.system_name = sys.name;
    tr.h = query_times.size() > 1
               ? (query_times.back() - query_times.front()) / static_cast<double>(query_times.size() - 1)
               : t_final - t0;

    if (sys.has_exact()) {
        tr.method_name = "exact";
        tr.states.reserve(query_times.size());
        for (double tq : query_times) tr.states.push_back(evaluate_exact(sys, tq - t0, x0));
        result.certificate = 0.0;
        result.refinements = 0;
        return result;
    }

    tr.method_name = "reference";
    // Integration targets: the queries, with t0 prepended when absent.
    std::vector<double> targets(query_times.begin(), query_times.end());
    const bool prepended = targets.front() > t0 + slack;
    if (prepended) targets.insert(targets.begin(), t0);

    const double h_base = (t_final - t0) / 1e4;
    std::vector<Vec> prev = piecewise_states(sys, x0, targets, h_base);
    for (int refinement = 1; refinement <= 6; ++refinement) {
        std::vector<Vec> cur =
            piecewise_states(sys, x0, targets, h_base / std::pow(2.0, refinement));
        const double disc = max_discrepancy(prev, cur);
        const double tol = 1e-10 * (1.0 + max_state_norm(cur));
        if (disc < tol) {
            if (prepended) cur.erase(cur.begin());
            tr.states = std::move(cur);
            result.certificate = disc;
            result.refinements = refinement;
            return result;
        }
        prev = std::move(cur);
    }
    std::ostringstream os;
    os << "reference_trajectory: system '" << sys.name << "' on [" << t0 << ", " << t_final
       << "] did not certify within 6 halvings; shrink the horizon or loosen study tolerances";
    throw reference_precision_error(os.str());
}

namespace {

size_t snap_index(const Trajectory& tr, double tq) {
    const std::vector<double>& times = tr.times;
    auto it = std::lower_bound(times.begin(), times.end(), tq);
    size_t idx;
    if (it == times.begin())
        idx = 0;
    else if (it == times.end())
        idx = times.size() - 1;
    else {
        const size_t hi = static_cast<size_t>(it - times.begin());
        idx = (tq - times[hi - 1] <= times[hi] - tq) ? hi - 1 : hi;
    }
    const double dist = std::abs(times[idx] - tq);
    const double limit = tr.h > 0.0 ? 0.5 * tr.h : 1e-9;
    if (!(dist < limit)) {
        std::ostringstream os;
        os << "global_error: query time " << tq << " is not a grid point of the '"
           << tr.method_name << "' trajectory (nearest is " << times[idx] << ")";
        throw usage_error(os.str());
    }
    return idx;
}

}  // namespace

ErrorCurve global_error(const Trajectory& approx, const Trajectory& reference,
                        std::span<const double> query_times, double reference_certificate) {
    if (approx.system_name != reference.system_name)
        throw usage_error("global_error: trajectories come from different systems ('" +
                          approx.system_name + "' vs '" + reference.system_name + "')");
    if (approx.states.empty() || reference.states.empty())
        throw usage_error("global_error: empty trajectory");
    if (approx.dimension() != reference.dimension())
        throw usage_error("global_error: dimension mismatch");
    const double x0_gap = distance(approx.states.front(), reference.states.front());
    if (!(x0_gap <= 1e-12 * (1.0 + norm(approx.states.front()))))
        throw usage_error("global_error: trajectories start from different initial states");

    ErrorCurve curve;
    curve.times.assign(query_times.begin(), query_times.end());
    curve.errors.reserve(query_times.size());
    curve.h = approx.h;
    curve.method_name = approx.method_name;
    curve.system_name = approx.system_name;
    curve.reference_certificate = reference_certificate;
    for (double tq : query_times) {
        const size_t ia = snap_index(approx, tq);
        const size_t ir = snap_index(reference, tq);
        curve.errors.push_back(distance(approx.states[ia], reference.states[ir]));
    }
    return curve;
}

}  // namespace odecond
