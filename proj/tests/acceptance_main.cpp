// Acceptance suite: drives the CLI binary (argv[1]) end to end plus the
// library property checks, printing one PASS/FAIL line per criterion with
// the measured values. Exit code is the number of failed criteria.

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "odecond/conditioning.hpp"
#include "odecond/io.hpp"
#include "odecond/studies.hpp"
#include "oracles.hpp"

using namespace odecond;
using nlohmann::json;

namespace {

std::string g_cli;
int g_failures = 0;

void report(const std::string& id, bool ok, const std::string& detail) {
    std::printf("%s criterion %s: %s\n", ok ? "PASS" : "FAIL", id.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    const std::string out_file = "acc_stdout_" + std::to_string(counter) + ".txt";
    const std::string err_file = "acc_stderr_" + std::to_string(counter) + ".txt";
    ++counter;
    const std::string command = "\"" + g_cli + "\" " + args + " > " + out_file + " 2> " + err_file;
    const int status = std::system(command.c_str());
    RunResult result;
    result.exit_code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
    result.out = slurp(out_file);
    result.err = slurp(err_file);
    std::remove(out_file.c_str());
    std::remove(err_file.c_str());
    return result;
}

json regime_json(const std::string& flags) {
    const RunResult r = run_cli("regime " + flags + " --json");
    return json::parse(r.out);
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

// --- criteria 1-3: closed-form conditioning ------------------------------

void criterion_closed_forms() {
    {
        const json j = regime_json("--system decay --t-final 40 --h 0.001");
        const double e = j["E_final"].get<double>();
        const std::string cls = j["growth"]["class"].get<std::string>();
        const RunResult plain = run_cli("regime --system decay --t-final 40 --h 0.001");
        const bool token = plain.out.find("class=Constant") != std::string::npos;
        report("1", e >= 0.999 && e <= 1.001 && cls == "Constant" && token && plain.exit_code == 0,
               "decay E(40)=" + fmt(e) + " class=" + cls);
    }
    {
        const json j = regime_json("--system rotation --t-final 50 --h 0.001");
        const double e = j["E_final"].get<double>();
        const std::string cls = j["growth"]["class"].get<std::string>();
        report("2", e >= 49.75 && e <= 50.25 && cls == "Linear",
               "rotation E(50)=" + fmt(e) + " class=" + cls);
    }
    {
        const json j = regime_json("--system expand --t-final 5 --h 0.001");
        const double e = j["E_final"].get<double>();
        const std::string cls = j["growth"]["class"].get<std::string>();
        const double truth = std::exp(5.0) - 1.0;
        report("3", std::abs(e - truth) <= 0.02 * truth && cls == "Exponential",
               "expand E(5)=" + fmt(e) + " (closed form " + fmt(truth) + ") class=" + cls);
    }
}

// --- criterion 4: hyperbolic cycle ----------------------------------------

void criterion_vdp() {
    const json j = regime_json("--system vdp --t-final 200 --h 0.001");
    const std::string cls = j["growth"]["class"].get<std::string>();
    const double r2 = j["growth"]["tail_linear_fit"]["r_squared"].get<double>();

    // E(200)/E(100) with both endpoints evaluated exactly at t=100 and t=200
    const System vdp = find_system("vdp");
    const TransitionSequence seq =
        transition_sequence(rk4_tableau(), vdp, vdp.default_x0, 0.0, 200.0, 0.001);
    const double qs[] = {100.0, 200.0};
    const ConditioningCurve curve = conditioning_curve(seq, qs);
    const double ratio = curve.values[1] / curve.values[0];

    const bool ok = cls == "Linear" && r2 >= 0.99 && ratio >= 1.6 && ratio <= 2.4;
    report("4", ok,
           "vdp class=" + cls + " tail_linear_r2=" + fmt(r2) +
               " E(200)/E(100)=" + fmt(ratio) + " [clauses: class " +
               (cls == "Linear" ? "ok" : "FAIL") + ", r2 " + (r2 >= 0.99 ? "ok" : "FAIL") +
               ", ratio " + (ratio >= 1.6 && ratio <= 2.4 ? "ok" : "FAIL") + "]");
}

// --- criterion 5: quasiperiodic torus --------------------------------------

void criterion_torus() {
    const json j = regime_json("--system torus4 --t-final 200 --h 0.001");
    const std::string cls = j["growth"]["class"].get<std::string>();
    report("5", cls == "Linear", "torus4 class=" + cls);
}

// --- criterion 6: chaotic contrast case ------------------------------------

void criterion_lorenz() {
    const json j = regime_json("--system lorenz --t-final 20 --h 0.0001");
    const std::string cls = j["growth"]["class"].get<std::string>();
    const double rate = j["growth"]["tail_exp_fit"]["rate"].get<double>();
    const double r2 = j["growth"]["tail_exp_fit"]["r_squared"].get<double>();
    const bool ok = cls == "Exponential" && rate >= 0.5 && rate <= 1.3;
    report("6", ok,
           "lorenz class=" + cls + " tail_log_slope=" + fmt(rate) + " exp_r2=" + fmt(r2) +
               " [clauses: class " + (cls == "Exponential" ? "ok" : "FAIL") + ", slope " +
               (rate >= 0.5 && rate <= 1.3 ? "ok" : "FAIL") + "]");
}

// --- criterion 7: observed orders -------------------------------------------

void criterion_orders() {
    struct Case {
        const char* method;
        double lo, hi;
    };
    bool ok = true;
    std::string detail;
    for (const Case& c :
         {Case{"rk4", 3.7, 4.3}, Case{"euler", 0.9, 1.1}, Case{"midpoint", 1.7, 2.3}}) {
        const RunResult r = run_cli(std::string("convergence --system decay --method ") +
                                    c.method + " --t-final 1 --h0 0.1 --levels 4 --json");
        const json j = json::parse(r.out);
        detail += std::string(c.method) + "=[";
        bool first = true;
        for (const json& o : j["observed_orders"]) {
            const double order = o.get<double>();
            ok = ok && order >= c.lo && order <= c.hi;
            detail += (first ? "" : ",") + fmt(order);
            first = false;
        }
        detail += "] ";
    }
    report("7", ok, "decay orders " + detail);
}

// --- criterion 8: bound verification ----------------------------------------

void criterion_bound() {
    struct Case {
        const char* system;
        double T, h0;
    };
    bool ok = true;
    std::string detail;
    for (const Case& c : {Case{"decay", 20.0, 0.05}, Case{"rotation", 50.0, 0.02},
                          Case{"vdp", 10.0, 0.1}}) {
        const RunResult r = run_cli(std::string("bound-check --system ") + c.system +
                                    " --method rk4 --t-final " + fmt(c.T) + " --h0 " + fmt(c.h0) +
                                    " --epsilon 0.01 --levels 4 --json");
        const json j = json::parse(r.out);
        const bool verified = j["verified"].get<bool>();
        const double stability = j["K_stability"].get<double>();
        ok = ok && verified && stability <= 2.0 && r.exit_code == 0;
        detail += std::string(c.system) + ":K_stab=" + fmt(stability) +
                  (verified ? "(verified) " : "(NOT verified) ");
    }
    report("8", ok, detail);
}

// --- criterion 9: property suites -------------------------------------------

bool property_cocycle(std::string& detail) {
    std::mt19937_64 rng(424242);
    double worst = 0.0;
    for (const System& sys : builtin_suite()) {
        const double h = sys.name == "lorenz" ? 0.005 : 0.01;
        const TransitionSequence seq =
            transition_sequence(rk4_tableau(), sys, sys.default_x0, 0.0, 10.0, h);
        const size_t n_steps = seq.steps.size();
        for (int trial = 0; trial < 100; ++trial) {
            size_t idx[3] = {rng() % (n_steps + 1), rng() % (n_steps + 1),
                             rng() % (n_steps + 1)};
            std::sort(std::begin(idx), std::end(idx));
            const ScaledMatrix whole = transition(seq, idx[0], idx[2]);
            const ScaledMatrix right = transition(seq, idx[0], idx[1]);
            const ScaledMatrix left = transition(seq, idx[1], idx[2]);
            Matrix composed(seq.dimension(), seq.dimension());
            multiply_into(left.mantissa, right.mantissa, composed);
            composed *= std::exp(left.log_scale + right.log_scale - whole.log_scale);
            const double rel = frobenius_norm(composed - whole.mantissa) /
                               std::max(1.0, frobenius_norm(whole.mantissa));
            worst = std::max(worst, rel);
        }
    }
    detail += "cocycle_worst=" + fmt(worst) + " ";
    return worst <= 1e-10;
}

bool property_norm_oracle(std::string& detail) {
    std::mt19937_64 rng(515151);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int d = 1 + static_cast<int>(rng() % 6);
        const Matrix m = oracles::random_matrix(d, rng, -3.0, 3.0);
        const double jac = norm2(m);
        const double pow = oracles::spectral_norm_power(m, static_cast<unsigned>(trial + 1));
        worst = std::max(worst, std::abs(jac - pow) / std::max(1.0, jac));
    }
    detail += "norm2_vs_power=" + fmt(worst) + " ";
    return worst <= 1e-10;
}

bool property_jacobians(std::string& detail) {
    std::mt19937_64 rng(616161);
    std::uniform_real_distribution<double> box(-2.0, 2.0);
    double worst = 0.0;
    for (const System& sys : builtin_suite()) {
        worst = std::max(worst, jacobian_discrepancy(sys, 0.0, sys.default_x0));
        for (int p = 0; p < 10; ++p) {
            Vec x = sys.default_x0;
            for (double& c : x) c += box(rng);
            worst = std::max(worst, jacobian_discrepancy(sys, 0.0, x));
        }
    }
    detail += "jacobian_fd=" + fmt(worst) + " ";
    return worst < 1e-5;
}

bool property_scale_invariance(std::string& detail) {
    auto scaled = [](ConditioningCurve c, double factor) {
        for (double& v : c.values) v *= factor;
        for (double& lv : c.log_values) lv += std::log(factor);
        return c;
    };
    bool ok = true;
    struct Case {
        const char* system;
        double T, h;
    };
    for (const Case& c :
         {Case{"decay", 40.0, 0.01}, Case{"rotation", 50.0, 0.01}, Case{"expand", 5.0, 0.001}}) {
        const System sys = find_system(c.system);
        const TransitionSequence seq =
            transition_sequence(rk4_tableau(), sys, sys.default_x0, 0.0, c.T, c.h);
        const ConditioningCurve curve =
            conditioning_curve(seq, uniform_queries(0.0, c.T, 200));
        const GrowthClass base = classify_growth(curve).growth_class;
        ok = ok && classify_growth(scaled(curve, 0.1)).growth_class == base;
        ok = ok && classify_growth(scaled(curve, 10.0)).growth_class == base;
    }
    detail += std::string("scale_invariance=") + (ok ? "ok" : "FAIL") + " ";
    return ok;
}

bool property_determinism(std::string& detail) {
    const System focus = find_system("stable_focus");
    const RegimeResult a =
        regime_experiment(focus, rk4_tableau(), focus.default_x0, 0.0, 20.0, 0.005);
    const RegimeResult b =
        regime_experiment(focus, rk4_tableau(), focus.default_x0, 0.0, 20.0, 0.005);
    bool ok = a.curve.values == b.curve.values && a.curve.log_values == b.curve.log_values;

    const std::string args =
        "condition --system vdp --t-final 10 --h 0.01 --queries 64 --out acc_det.csv";
    ok = ok && run_cli(args).exit_code == 0;
    const std::string first = slurp("acc_det.csv");
    ok = ok && run_cli(args).exit_code == 0;
    ok = ok && slurp("acc_det.csv") == first && !first.empty();
    std::remove("acc_det.csv");
    std::remove("acc_det.csv.json");
    detail += std::string("determinism=") + (ok ? "bitwise" : "FAIL");
    return ok;
}

void criterion_properties() {
    std::string detail;
    bool ok = property_cocycle(detail);
    ok = property_norm_oracle(detail) && ok;
    ok = property_jacobians(detail) && ok;
    ok = property_scale_invariance(detail) && ok;
    ok = property_determinism(detail) && ok;
    report("9", ok, detail);
}

// --- criterion 10: quadrature refinement ------------------------------------

void criterion_quadrature() {
    struct Case {
        const char* system;
        double T, h0;
    };
    bool ok = true;
    std::string detail;
    for (const Case& c : {Case{"decay", 20.0, 0.02}, Case{"rotation", 50.0, 0.1}}) {
        const System sys = find_system(c.system);
        double e_vals[3];
        double h = c.h0;
        for (int k = 0; k < 3; ++k, h /= 2.0) {
            const TransitionSequence seq =
                transition_sequence(rk4_tableau(), sys, sys.default_x0, 0.0, c.T, h);
            const double q[1] = {c.T};
            e_vals[k] = conditioning_curve(seq, q).values.back();
        }
        const double d1 = std::abs(e_vals[0] - e_vals[1]);
        const double d2 = std::abs(e_vals[1] - e_vals[2]);
        const double factor = d2 > 0.0 ? d1 / d2 : std::numeric_limits<double>::infinity();
        const bool in_window = factor >= 3.0 && factor <= 5.0;
        ok = ok && in_window;
        detail += std::string(c.system) + ":factor=" + fmt(factor) +
                  (in_window ? "(ok) " : "(outside [3,5]) ");
    }
    report("10", ok, detail);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: acceptance <path-to-odecond-cli>\n");
        return 64;
    }
    g_cli = argv[1];

    criterion_closed_forms();
    criterion_vdp();
    criterion_torus();
    criterion_lorenz();
    criterion_orders();
    criterion_bound();
    criterion_properties();
    criterion_quadrature();

    std::printf("acceptance: %d criteria failed\n", g_failures);
    return g_failures;
}
