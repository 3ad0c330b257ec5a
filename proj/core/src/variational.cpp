#include "odecond/variational.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "odecond/errors.hpp"

namespace odecond {

TransitionSequence transition_sequence(const ButcherTableau& method, const System& sys,
                                       std::span<const double> x0, double t0, double t_final,
                                       double h) {
    if (!(t_final > t0)) throw usage_error("transition_sequence: t_final must exceed t0");
    if (!(h > 0.0) || !std::isfinite(h))
        throw usage_error("transition_sequence: step size must be positive");
    if (h > (t_final - t0) * (1.0 + 1e-12))
        throw usage_error("transition_sequence: step size exceeds the integration interval");
    if (static_cast<int>(x0.size()) != sys.dimension)
        throw usage_error("transition_sequence: x0 length does not match system dimension");
    if (!all_finite(x0)) throw usage_error("transition_sequence: x0 has non-finite components");

    const int d = sys.dimension;
    const int s = method.stages;

    TransitionSequence seq;
    seq.base.times = integration_grid(t0, t_final, h);
    seq.base.h = h;
    seq.base.system_name = sys.name;
    seq.base.method_name = method.name;
    const size_t n = seq.base.times.size() - 1;
    seq.base.states.reserve(n + 1);
    seq.base.states.emplace_back(x0.begin(), x0.end());
    seq.steps.reserve(n);

    detail::StepWorkspace ws;
    ws.resize(s, d);
    std::vector<Matrix> kpsi(static_cast<size_t>(s), Matrix(d, d));
    Matrix psi(d, d);
    Matrix jac(d, d);
    Matrix m(d, d);

    for (size_t step = 0; step < n; ++step) {
        const double t = seq.base.times[step];
        const double hj = seq.base.times[step + 1] - seq.base.times[step];
        const Vec& x = seq.base.states[step];

        // State stages first; identical arithmetic to integrate().
        try {
            detail::rk_stages(method, sys, t, x, hj, ws);
        } catch (const blow_up_error& e) {
            throw blow_up_error(std::string(e.what()) + " [step " + std::to_string(step) + "]",
                                e.t, e.method, e.h, static_cast<long>(step));
        }
        if (!all_finite(ws.acc))
            throw blow_up_error("transition_sequence: state blow-up on system '" + sys.name + "'",
                                t, method.name, hj, static_cast<long>(step));

        // Variational stages: KPsi_i = J(t + c_i h, X_i) * Psi_i with
        // Psi_i = I + h * sum_{j<i} a_ij KPsi_j (Psi reset to I each step).
        for (int i = 0; i < s; ++i) {
            psi.set_identity();
            for (int j = 0; j < i; ++j) {
                const double aij = method.a_at(i, j);
                if (aij == 0.0) continue;
                const double w = hj * aij;
                const Matrix& kj = kpsi[static_cast<size_t>(j)];
                for (int r = 0; r < d; ++r)
                    for (int c = 0; c < d; ++c) psi(r, c) += w * kj(r, c);
            }
            jac = jacobian_at(sys, t + method.c[i] * hj, ws.stage_x[static_cast<size_t>(i)]);
            multiply_into(jac, psi, kpsi[static_cast<size_t>(i)]);
        }
        m.set_identity();
        for (int i = 0; i < s; ++i) {
            const double w = hj * method.b[i];
            const Matrix& ki = kpsi[static_cast<size_t>(i)];
            for (int r = 0; r < d; ++r)
                for (int c = 0; c < d; ++c) m(r, c) += w * ki(r, c);
        }
        if (!m.finite())
            throw blow_up_error("transition_sequence: variational blow-up on system '" + sys.name +
                                    "'",
                                t, method.name, hj, static_cast<long>(step));

        seq.base.states.push_back(ws.acc);
        seq.steps.push_back(m);
    }
    return seq;
}

Matrix ScaledMatrix::represented() const {
    Matrix out = mantissa;
    out *= std::exp(log_scale);
    return out;
}

namespace {

// Renormalize into the [1/2, 2] mantissa band.
void normalize(ScaledMatrix& sm) {
    const double nrm = norm2(sm.mantissa);
    if (nrm == 0.0) {
        sm.log_scale = 0.0;
        return;
    }
    if (nrm < 0.5 || nrm > 2.0) {
        sm.mantissa *= 1.0 / nrm;
        sm.log_scale += std::log(nrm);
    }
}

}  // namespace

ScaledMatrix make_scaled(const Matrix& m) {
    ScaledMatrix sm{m, 0.0};
    normalize(sm);
    return sm;
}

ScaledMatrix transition(const TransitionSequence& seq, size_t j, size_t n) {
    if (j > n || n > seq.steps.size()) {
        std::ostringstream os;
        os << "transition: indices (j=" << j << ", n=" << n << ") out of range for "
           << seq.steps.size() << " steps";
        throw usage_error(os.str());
    }
    const int d = seq.dimension();
    ScaledMatrix out{Matrix::identity(d), 0.0};
    Matrix tmp(d, d);
    for (size_t k = j; k < n; ++k) {
        multiply_into(seq.steps[k], out.mantissa, tmp);
        std::swap(out.mantissa, tmp);
        normalize(out);
    }
    return out;
}

LogValue norm2(const ScaledMatrix& m) {
    const double nrm = norm2(m.mantissa);
    LogValue lv;
    if (nrm == 0.0) {
        lv.value = 0.0;
        lv.log = -std::numeric_limits<double>::infinity();
        return lv;
    }
    lv.log = std::log(nrm) + m.log_scale;
    lv.value = (m.log_scale == 0.0) ? nrm : nrm * std::exp(m.log_scale);
    return lv;
}

}  // namespace odecond
