#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "odecond/errors.hpp"
#include "odecond/integrators.hpp"
#include "odecond/systems.hpp"
#include "oracles.hpp"

using namespace odecond;

namespace {

System get(const std::string& name) { return find_system(name); }

}  // namespace

TEST_CASE("evaluate on the worked examples") {
    CHECK(evaluate(get("decay"), 0.0, Vec{2.0}) == Vec{-2.0});
    CHECK(evaluate(get("rotation"), 0.0, Vec{1.0, 0.0}) == Vec{0.0, -1.0});
    // (1 - 4) * 0 - 2 = -2
    CHECK(evaluate(get("vdp"), 0.0, Vec{2.0, 0.0}) == Vec{0.0, -2.0});
}

TEST_CASE("evaluate is pure") {
    const System vdp = get("vdp");
    const Vec x{0.3, -1.7};
    const Vec a = evaluate(vdp, 1.5, x);
    const Vec b = evaluate(vdp, 1.5, x);
    CHECK(a == b);  // bitwise
}

TEST_CASE("evaluate rejects bad input") {
    CHECK_THROWS_AS((void)evaluate(get("decay"), 0.0, Vec{1.0, 2.0}), usage_error);
    CHECK_THROWS_AS((void)evaluate(get("decay"), 0.0,
                                   Vec{std::numeric_limits<double>::quiet_NaN()}),
                    usage_error);
}

TEST_CASE("evaluate reports non-finite rhs output as a domain error") {
    System bad;
    bad.name = "bad";
    bad.dimension = 1;
    bad.rhs = [](double, std::span<const double> x, std::span<double> dx) {
        dx[0] = std::sqrt(x[0]);  // nan for negative input
    };
    bad.default_x0 = {1.0};
    CHECK_THROWS_AS((void)evaluate(bad, 0.0, Vec{-1.0}), numeric_domain_error);
}

TEST_CASE("jacobian_at on the worked examples") {
    const Matrix jd = jacobian_at(get("decay"), 0.0, Vec{0.7});
    CHECK(jd(0, 0) == -1.0);

    const Matrix jr = jacobian_at(get("rotation"), 2.0, Vec{3.0, -4.0});
    CHECK(jr(0, 0) == 0.0);
    CHECK(jr(0, 1) == 1.0);
    CHECK(jr(1, 0) == -1.0);
    CHECK(jr(1, 1) == 0.0);

    // hand-differentiated van der Pol Jacobian at [2, 0]
    const System vdp = get("vdp");
    const Matrix jv = jacobian_at(vdp, 0.0, Vec{2.0, 0.0});
    CHECK(jv(0, 0) == 0.0);
    CHECK(jv(0, 1) == 1.0);
    CHECK(jv(1, 0) == -1.0);
    CHECK(jv(1, 1) == -3.0);
    // cross-checked against the finite-difference oracle
    const Matrix fd = finite_difference_jacobian(vdp, 0.0, Vec{2.0, 0.0});
    CHECK(frobenius_norm(jv - fd) < 1e-5 * std::max(1.0, frobenius_norm(jv)));
}

TEST_CASE("finite differences are used when no analytic Jacobian exists") {
    System s = get("vdp");
    s.jacobian = nullptr;
    const Matrix fd = jacobian_at(s, 0.0, Vec{2.0, 0.0});
    CHECK(fd(1, 0) == doctest::Approx(-1.0).epsilon(1e-8));
    CHECK(fd(1, 1) == doctest::Approx(-3.0).epsilon(1e-8));
}

TEST_CASE("builtin suite covers the expected systems") {
    const std::vector<System> suite = builtin_suite();
    REQUIRE(suite.size() == 7);
    for (const char* name :
         {"decay", "expand", "rotation", "stable_focus", "vdp", "torus4", "lorenz"}) {
        bool found = false;
        for (const System& s : suite) found = found || s.name == name;
        CHECK_MESSAGE(found, name);
    }
    const System vdp = get("vdp");
    CHECK(vdp.dimension == 2);
    CHECK_FALSE(vdp.has_exact());
    CHECK(get("decay").has_exact());
    CHECK_THROWS_AS((void)find_system("nope"), usage_error);
}

TEST_CASE("decay exact flow is the exponential") {
    const System decay = get("decay");
    for (double t : {0.0, 0.5, 1.0, 7.0})
        CHECK(evaluate_exact(decay, t, Vec{1.0})[0] ==
              doctest::Approx(std::exp(-t)).epsilon(1e-15));
}

TEST_CASE("exact flows start at x0 exactly") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    for (const System& s : builtin_suite()) {
        if (!s.has_exact()) continue;
        Vec x0 = s.default_x0;
        for (double& c : x0) c += uni(rng);
        CHECK(evaluate_exact(s, 0.0, x0) == x0);  // bitwise
    }
}

TEST_CASE("analytic Jacobians agree with finite differences near default_x0") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> box(-2.0, 2.0);
    for (const System& s : builtin_suite()) {
        REQUIRE(s.has_jacobian());
        double worst = jacobian_discrepancy(s, 0.0, s.default_x0);
        for (int p = 0; p < 10; ++p) {
            Vec x = s.default_x0;
            for (double& c : x) c += box(rng);
            worst = std::max(worst, jacobian_discrepancy(s, 0.0, x));
        }
        CHECK_MESSAGE(worst < 1e-5, s.name, " worst=", worst);
    }
}

TEST_CASE("exact flows satisfy the ODE") {
    for (const System& s : builtin_suite()) {
        if (!s.has_exact()) continue;
        const double dt = std::cbrt(std::numeric_limits<double>::epsilon());
        double worst = 0.0;
        for (int p = 1; p <= 10; ++p) {
            const double t = 0.35 * p;
            const Vec xp = evaluate_exact(s, t + dt, s.default_x0);
            const Vec xm = evaluate_exact(s, t - dt, s.default_x0);
            const Vec fx = evaluate(s, t, evaluate_exact(s, t, s.default_x0));
            double num = 0.0, den = 0.0;
            for (size_t i = 0; i < xp.size(); ++i) {
                const double dd = (xp[i] - xm[i]) / (2.0 * dt);
                num += (dd - fx[i]) * (dd - fx[i]);
                den += fx[i] * fx[i];
            }
            worst = std::max(worst, std::sqrt(num) / std::max(1.0, std::sqrt(den)));
        }
        CHECK_MESSAGE(worst < 1e-6, s.name, " worst=", worst);
    }
}

TEST_CASE("torus4 trajectories converge onto the unit torus") {
    const System torus = get("torus4");
    const Trajectory tr = integrate(rk4_tableau(), torus, torus.default_x0, 0.0, 50.0, 1e-3);
    const Vec& x = tr.states.back();
    CHECK(std::abs(x[0] * x[0] + x[1] * x[1] - 1.0) < 1e-6);
    CHECK(std::abs(x[2] * x[2] + x[3] * x[3] - 1.0) < 1e-6);
}
