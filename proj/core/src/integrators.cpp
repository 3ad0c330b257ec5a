#include "odecond/integrators.hpp"

#include <cmath>
#include <sstream>

#include "odecond/errors.hpp"

namespace odecond {

namespace {

ButcherTableau make_euler() {
    ButcherTableau t;
    t.name = "euler";
    t.order = 1;
    t.stages = 1;
    t.a = {0.0};
    t.b = {1.0};
    t.c = {0.0};
    return t;
}

ButcherTableau make_midpoint() {
    ButcherTableau t;
    t.name = "midpoint";
    t.order = 2;
    t.stages = 2;
    t.a = {0.0, 0.0,  //
           0.5, 0.0};
    t.b = {0.0, 1.0};
    t.c = {0.0, 0.5};
    return t;
}

ButcherTableau make_rk4() {
    ButcherTableau t;
    t.name = "rk4";
    t.order = 4;
    t.stages = 4;
    t.a = {0.0, 0.0, 0.0, 0.0,  //
           0.5, 0.0, 0.0, 0.0,  //
           0.0, 0.5, 0.0, 0.0,  //
           0.0, 0.0, 1.0, 0.0};
    t.b = {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0};
    t.c = {0.0, 0.5, 0.5, 1.0};
    return t;
}

}  // namespace

const ButcherTableau& euler_tableau() {
    static const ButcherTableau t = make_euler();
    return t;
}

const ButcherTableau& midpoint_tableau() {
    static const ButcherTableau t = make_midpoint();
    return t;
}

const ButcherTableau& rk4_tableau() {
    static const ButcherTableau t = make_rk4();
    return t;
}

const ButcherTableau& method_by_name(std::string_view name) {
    if (name == "euler") return euler_tableau();
    if (name == "midpoint") return midpoint_tableau();
    if (name == "rk4") return rk4_tableau();
    throw usage_error("unknown method '" + std::string(name) + "'; available: euler midpoint rk4");
}

void validate(const ButcherTableau& t) {
    if (t.stages <= 0 || t.b.size() != static_cast<size_t>(t.stages) ||
        t.c.size() != static_cast<size_t>(t.stages) ||
        t.a.size() != static_cast<size_t>(t.stages) * t.stages)
        throw usage_error("tableau '" + t.name + "': inconsistent sizes");
    double bsum = 0.0;
    for (double b : t.b) bsum += b;
    if (std::abs(bsum - 1.0) > 1e-14)
        throw usage_error("tableau '" + t.name + "': weights do not sum to 1");
    for (int i = 0; i < t.stages; ++i) {
        double row = 0.0;
        for (int j = 0; j < t.stages; ++j) {
            if (j >= i && t.a_at(i, j) != 0.0)
                throw usage_error("tableau '" + t.name + "': not explicit");
            row += t.a_at(i, j);
        }
        if (std::abs(row - t.c[i]) > 1e-14)
            throw usage_error("tableau '" + t.name + "': row-sum condition violated");
    }
    if (t.order <= 0) throw usage_error("tableau '" + t.name + "': order must be positive");
}

namespace detail {

void StepWorkspace::resize(int stages, int dim) {
    k.assign(stages, Vec(dim, 0.0));
    stage_x.assign(stages, Vec(dim, 0.0));
    acc.assign(dim, 0.0);
}

void rk_stages(const ButcherTableau& method, const System& sys, double t,
               std::span<const double> x, double h, StepWorkspace& ws) {
    const int d = static_cast<int>(x.size());
    for (int i = 0; i < method.stages; ++i) {
        Vec& xi = ws.stage_x[i];
        for (int n = 0; n < d; ++n) xi[n] = x[n];
        for (int j = 0; j < i; ++j) {
            const double aij = method.a_at(i, j);
            if (aij == 0.0) continue;
            const double w = h * aij;
            const Vec& kj = ws.k[j];
            for (int n = 0; n < d; ++n) xi[n] += w * kj[n];
        }
        sys.rhs(t + method.c[i] * h, xi, ws.k[i]);
        if (!all_finite(ws.k[i])) {
            std::ostringstream os;
            os << "blow-up in stage " << i + 1 << " of method '" << method.name << "' on system '"
               << sys.name << "' at t=" << t << " (h=" << h << ")";
            throw blow_up_error(os.str(), t, method.name, h);
        }
    }
    for (int n = 0; n < d; ++n) ws.acc[n] = x[n];
    for (int i = 0; i < method.stages; ++i) {
        const double w = h * method.b[i];
        const Vec& ki = ws.k[i];
        for (int n = 0; n < d; ++n) ws.acc[n] += w * ki[n];
    }
}

}  // namespace detail

Vec rk_step(const ButcherTableau& method, const System& sys, double t, std::span<const double> x,
            double h) {
    if (!(h > 0.0) || !std::isfinite(h)) throw usage_error("rk_step: step size must be positive");
    if (static_cast<int>(x.size()) != sys.dimension)
        throw usage_error("rk_step: state length does not match system dimension");
    if (!std::isfinite(t) || !all_finite(x)) throw usage_error("rk_step: non-finite input");
    detail::StepWorkspace ws;
    ws.resize(method.stages, sys.dimension);
    detail::rk_stages(method, sys, t, x, h, ws);
    if (!all_finite(ws.acc)) {
        std::ostringstream os;
        os << "blow-up in method '" << method.name << "' on system '" << sys.name << "' at t=" << t
           << " (h=" << h << ")";
        throw blow_up_error(os.str(), t, method.name, h);
    }
    return ws.acc;
}

long integration_step_count(double t0, double t_final, double h) {
    const double raw = (t_final - t0) / h;
    // Tolerate floating-point slop just below an integer step count.
    long n = static_cast<long>(std::ceil(raw - 1e-9));
    return n < 1 ? 1 : n;
}

std::vector<double> integration_grid(double t0, double t_final, double h) {
    const long n = integration_step_count(t0, t_final, h);
    std::vector<double> times(static_cast<size_t>(n) + 1);
    for (long j = 0; j < n; ++j) times[static_cast<size_t>(j)] = t0 + static_cast<double>(j) * h;
    times.back() = t_final;
    return times;
}

Trajectory integrate(const ButcherTableau& method, const System& sys, std::span<const double> x0,
                     double t0, double t_final, double h) {
    if (!(t_final > t0)) throw usage_error("integrate: t_final must exceed t0");
    if (!(h > 0.0) || !std::isfinite(h)) throw usage_error("integrate: step size must be positive");
    if (h > (t_final - t0) * (1.0 + 1e-12))
        throw usage_error("integrate: step size exceeds the integration interval");
    if (static_cast<int>(x0.size()) != sys.dimension)
        throw usage_error("integrate: x0 length does not match system dimension");
    if (!all_finite(x0)) throw usage_error("integrate: x0 has non-finite components");

    Trajectory tr;
    tr.times = integration_grid(t0, t_final, h);
    tr.h = h;
    tr.system_name = sys.name;
    tr.method_name = method.name;
    const size_t n = tr.times.size() - 1;
    tr.states.reserve(n + 1);
    tr.states.emplace_back(x0.begin(), x0.end());

    detail::StepWorkspace ws;
    ws.resize(method.stages, sys.dimension);
    for (size_t j = 0; j < n; ++j) {
        const double hj = tr.times[j + 1] - tr.times[j];
        try {
            detail::rk_stages(method, sys, tr.times[j], tr.states[j], hj, ws);
        } catch (const blow_up_error& e) {
            throw blow_up_error(std::string(e.what()) + " [step " + std::to_string(j) + "]", e.t,
                                e.method, e.h, static_cast<long>(j));
        }
        if (!all_finite(ws.acc)) {
            std::ostringstream os;
            os << "blow-up in method '" << method.name << "' on system '" << sys.name
               << "' at t=" << tr.times[j] << " (h=" << hj << ") [step " << j << "]";
            throw blow_up_error(os.str(), tr.times[j], method.name, hj, static_cast<long>(j));
        }
        tr.states.push_back(ws.acc);
    }
    return tr;
}

}  // namespace odecond
