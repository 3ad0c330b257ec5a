#include "odecond/systems.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "odecond/errors.hpp"

namespace odecond {

namespace {

void check_input(const System& sys, double t, std::span<const double> x, const char* op) {
    if (static_cast<int>(x.size()) != sys.dimension) {
        std::ostringstream os;
        os << op << ": state has length " << x.size() << " but system '" << sys.name
           << "' has dimension " << sys.dimension;
        throw usage_error(os.str());
    }
    if (!std::isfinite(t) || !all_finite(x)) {
        std::ostringstream os;
        os << op << ": non-finite input for system '" << sys.name << "' at t=" << t
           << ", x=" << format_point(x);
        throw usage_error(os.str());
    }
}

}  // namespace

Vec evaluate(const System& sys, double t, std::span<const double> x) {
    check_input(sys, t, x, "evaluate");
    Vec dx(x.size(), 0.0);
    sys.rhs(t, x, dx);
    if (!all_finite(dx)) {
        std::ostringstream os;
        os << "evaluate: system '" << sys.name << "' produced a non-finite derivative at t=" << t
           << ", x=" << format_point(x);
        throw numeric_domain_error(os.str());
    }
    return dx;
}

Vec evaluate_exact(const System& sys, double t, std::span<const double> x0) {
    if (!sys.has_exact())
        throw usage_error("evaluate_exact: system '" + sys.name + "' has no closed-form flow");
    check_input(sys, t, x0, "evaluate_exact");
    Vec x(x0.size(), 0.0);
    sys.exact(t, x0, x);
    if (!all_finite(x)) {
        std::ostringstream os;
        os << "evaluate_exact: system '" << sys.name << "' produced a non-finite state at t=" << t;
        throw numeric_domain_error(os.str());
    }
    return x;
}

Matrix finite_difference_jacobian(const System& sys, double t, std::span<const double> x) {
    check_input(sys, t, x, "finite_difference_jacobian");
    const int d = sys.dimension;
    // cbrt(eps): the optimum step scale for central differences.
    static const double kStep = std::cbrt(std::numeric_limits<double>::epsilon());
    Matrix jac(d, d);
    Vec xp(x.begin(), x.end());
    Vec xm(x.begin(), x.end());
    Vec fp(d, 0.0), fm(d, 0.0);
    for (int j = 0; j < d; ++j) {
        const double delta = kStep * std::max(1.0, std::abs(x[j]));
        xp[j] = x[j] + delta;
        xm[j] = x[j] - delta;
        sys.rhs(t, xp, fp);
        sys.rhs(t, xm, fm);
        for (int i = 0; i < d; ++i) jac(i, j) = (fp[i] - fm[i]) / (2.0 * delta);
        xp[j] = x[j];
        xm[j] = x[j];
    }
    if (!jac.finite()) {
        std::ostringstream os;
        os << "finite_difference_jacobian: non-finite entries for system '" << sys.name
           << "' at t=" << t << ", x=" << format_point(x);
        throw numeric_domain_error(os.str());
    }
    return jac;
}

Matrix jacobian_at(const System& sys, double t, std::span<const double> x) {
    if (!sys.has_jacobian()) return finite_difference_jacobian(sys, t, x);
    check_input(sys, t, x, "jacobian_at");
    Matrix jac(sys.dimension, sys.dimension);
    sys.jacobian(t, x, jac);
    if (!jac.finite()) {
        std::ostringstream os;
        os << "jacobian_at: non-finite Jacobian for system '" << sys.name << "' at t=" << t
           << ", x=" << format_point(x);
        throw numeric_domain_error(os.str());
    }
    return jac;
}

double jacobian_discrepancy(const System& sys, double t, std::span<const double> x) {
    if (!sys.has_jacobian())
        throw usage_error("jacobian_discrepancy: system '" + sys.name + "' has no analytic Jacobian");
    const Matrix an = jacobian_at(sys, t, x);
    const Matrix fd = finite_difference_jacobian(sys, t, x);
    return frobenius_norm(an - fd) / std::max(1.0, frobenius_norm(an));
}

namespace {

System make_decay() {
    System s;
    s.name = "decay";
    s.dimension = 1;
    s.rhs = [](double, std::span<const double> x, std::span<double> dx) { dx[0] = -x[0]; };
    s.jacobian = [](double, std::span<const double>, Matrix& j) { j(0, 0) = -1.0; };
    s.exact = [](double t, std::span<const double> x0, std::span<double> x) {
        x[0] = std::exp(-t) * x0[0];
    };
    s.default_x0 = {1.0};
    s.regime = "fixed-point";
    s.description = "scalar exponential decay x' = -x";
    return s;
}

System make_expand() {
    System s;
    s.name = "expand";
    s.dimension = 1;
    s.rhs = [](double, std::span<const double> x, std::span<double> dx) { dx[0] = x[0]; };
    s.jacobian = [](double, std::span<const double>, Matrix& j) { j(0, 0) = 1.0; };
    s.exact = [](double t, std::span<const double> x0, std::span<double> x) {
        x[0] = std::exp(t) * x0[0];
    };
    s.default_x0 = {1.0};
    s.regime = "unstable";
    s.description = "scalar exponential growth x' = x (contrast case)";
    return s;
}

System make_rotation() {
    System s;
    s.name = "rotation";
    s.dimension = 2;
    s.rhs = [](double, std::span<const double> x, std::span<double> dx) {
        dx[0] = x[1];
        dx[1] = -x[0];
    };
    s.jacobian = [](double, std::span<const double>, Matrix& j) {
        j(0, 0) = 0.0;
        j(0, 1) = 1.0;
        j(1, 0) = -1.0;
        j(1, 1) = 0.0;
    };
    s.exact = [](double t, std::span<const double> x0, std::span<double> x) {
        const double c = std::cos(t), sn = std::sin(t);
        x[0] = c * x0[0] + sn * x0[1];
        x[1] = -sn * x0[0] + c * x0[1];
    };
    s.default_x0 = {1.0, 0.0};
    s.regime = "neutral";
    s.description = "planar rotation x' = [x2, -x1] (neutral contrast case)";
    return s;
}

System make_stable_focus() {
    System s;
    s.name = "stable_focus";
    s.dimension = 2;
    s.rhs = [](double, std::span<const double> x, std::span<double> dx) {
        dx[0] = -x[0] + x[1];
        dx[1] = -x[0] - x[1];
    };
    s.jacobian = [](double, std::span<const double>, Matrix& j) {
        j(0, 0) = -1.0;
        j(0, 1) = 1.0;
        j(1, 0) = -1.0;
        j(1, 1) = -1.0;
    };
    s.exact = [](double t, std::span<const double> x0, std::span<double> x) {
        const double e = std::exp(-t), c = std::cos(t), sn = std::sin(t);
        x[0] = e * (c * x0[0] + sn * x0[1]);
        x[1] = e * (-sn * x0[0] + c * x0[1]);
    };
    s.default_x0 = {1.0, 0.0};
    s.regime = "fixed-point";
    s.description = "planar spiral sink, eigenvalues -1 +/- i";
    return s;
}

System make_vdp() {
    constexpr double mu = 1.0;
    System s;
    s.name = "vdp";
    s.dimension = 2;
    s.rhs = [](double, std::span<const double> x, std::span<double> dx) {
        dx[0] = x[1];
        dx[1] = mu * (1.0 - x[0] * x[0]) * x[1] - x[0];
    };
    s.jacobian = [](double, std::span<const double> x, Matrix& j) {
        j(0, 0) = 0.0;
        j(0, 1) = 1.0;
        j(1, 0) = -2.0 * mu * x[0] * x[1] - 1.0;
        j(1, 1) = mu * (1.0 - x[0] * x[0]);
    };
    s.default_x0 = {0.5, 0.0};
    s.regime = "cycle";
    s.description = "van der Pol oscillator, mu = 1 (stable limit cycle)";
    return s;
}

System make_torus4() {
    // Two planar Hopf-normal-form oscillators; the golden-ratio frequency
    // pair makes the flow on the product torus quasiperiodic.
    constexpr double w1 = 1.0;
    const double w2 = 0.5 * (1.0 + std::sqrt(5.0));
    System s;
    s.name = "torus4";
    s.dimension = 4;
    s.rhs = [w2](double, std::span<const double> x, std::span<double> dx) {
        const double u = x[0], v = x[1], p = x[2], q = x[3];
        const double r1 = 1.0 - u * u - v * v;
        const double r2 = 1.0 - p * p - q * q;
        dx[0] = u * r1 - w1 * v;
        dx[1] = v * r1 + w1 * u;
        dx[2] = p * r2 - w2 * q;
        dx[3] = q * r2 + w2 * p;
    };
    s.jacobian = [w2](double, std::span<const double> x, Matrix& j) {
        const double u = x[0], v = x[1], p = x[2], q = x[3];
        j.set_zero();
        j(0, 0) = 1.0 - 3.0 * u * u - v * v;
        j(0, 1) = -2.0 * u * v - w1;
        j(1, 0) = -2.0 * u * v + w1;
        j(1, 1) = 1.0 - u * u - 3.0 * v * v;
        j(2, 2) = 1.0 - 3.0 * p * p - q * q;
        j(2, 3) = -2.0 * p * q - w2;
        j(3, 2) = -2.0 * p * q + w2;
        j(3, 3) = 1.0 - p * p - 3.0 * q * q;
    };
    s.default_x0 = {0.5, 0.0, 0.5, 0.0};
    s.regime = "torus";
    s.description = "two Hopf oscillators in R^4, frequency ratio (1+sqrt(5))/2";
    return s;
}

System make_lorenz() {
    constexpr double sigma = 10.0, rho = 28.0, beta = 8.0 / 3.0;
    System s;
    s.name = "lorenz";
    s.dimension = 3;
    s.rhs = [](double, std::span<const double> x, std::span<double> dx) {
        dx[0] = sigma * (x[1] - x[0]);
        dx[1] = x[0] * (rho - x[2]) - x[1];
        dx[2] = x[0] * x[1] - beta * x[2];
    };
    s.jacobian = [](double, std::span<const double> x, Matrix& j) {
        j(0, 0) = -sigma;
        j(0, 1) = sigma;
        j(0, 2) = 0.0;
        j(1, 0) = rho - x[2];
        j(1, 1) = -1.0;
        j(1, 2) = -x[0];
        j(2, 0) = x[1];
        j(2, 1) = x[0];
        j(2, 2) = -beta;
    };
    s.default_x0 = {1.0, 1.0, 1.0};
    s.regime = "chaotic";
    s.description = "Lorenz system, sigma=10 rho=28 beta=8/3 (contrast case)";
    return s;
}

}  // namespace

std::vector<System> builtin_suite() {
    std::vector<System> suite;
    suite.push_back(make_decay());
    suite.push_back(make_expand());
    suite.push_back(make_rotation());
    suite.push_back(make_stable_focus());
    suite.push_back(make_vdp());
    suite.push_back(make_torus4());
    suite.push_back(make_lorenz());
    return suite;
}

System find_system(std::string_view name) {
    for (System& s : builtin_suite())
        if (s.name == name) return std::move(s);
    std::ostringstream os;
    os << "unknown system '" << name << "'; available:";
    for (const System& s : builtin_suite()) os << ' ' << s.name;
    throw usage_error(os.str());
}

}  // namespace odecond
