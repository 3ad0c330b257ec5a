// Command-line front end: integrates the built-in systems, propagates the
// variational equation, evaluates the conditioning function E(t), classifies
// its growth, and runs convergence / error-bound studies. Emits CSV plus
// optional JSON sidecars and static SVG charts.

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "odecond/conditioning.hpp"
#include "odecond/errors.hpp"
#include "odecond/io.hpp"
#include "odecond/reference.hpp"
#include "odecond/studies.hpp"

namespace {

using namespace odecond;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitUndetermined = 3;

struct CommonOptions {
    std::string system;
    std::string method = "rk4";
    double t0 = 0.0;
    double t_final = 0.0;
    double h = 0.0;
    double h0 = 0.0;
    int levels = 4;
    double epsilon = 0.01;
    int queries = 200;
    GrowthThresholds thresholds;
    std::string norm = "spectral";
    std::string out;
    std::string in;
    bool json = false;
    bool svg = false;
    bool reference = false;
    bool check = false;
    unsigned long seed = 0;
};

MatrixNorm parse_norm(const std::string& name) {
    if (name == "spectral") return MatrixNorm::spectral;
    if (name == "frobenius") return MatrixNorm::frobenius;
    throw usage_error("unknown norm '" + name + "'; available: spectral frobenius");
}

void add_threshold_flags(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--delta-const", opt.thresholds.delta_const,
                    "constancy-ratio cutoff for the Constant class");
    cmd->add_option("--r2-cutoff", opt.thresholds.r_squared_cutoff,
                    "r-squared cutoff for the Linear/Exponential fits");
    cmd->add_option("--rho-min", opt.thresholds.rho_min,
                    "minimum exponential rate per unit time");
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw usage_error("cannot open '" + path + "' for writing");
    os << contents;
    if (!os) throw numerical_error("failed while writing '" + path + "'");
}

std::string render_csv(const CsvTable& table) {
    std::ostringstream os;
    write_csv(os, table);
    return os.str();
}

// CSV first, then the chart re-read from the emitted bytes so the SVG is a
// function of the file contents alone.
void emit_outputs(const CommonOptions& opt, const CsvTable& table, const nlohmann::json* sidecar,
                  const SvgOptions& svg_options) {
    if (opt.out.empty()) {
        if (opt.svg) throw usage_error("--svg requires --out");
        return;
    }
    write_file(opt.out, render_csv(table));
    if (sidecar) write_file(opt.out + ".json", sidecar->dump(2) + "\n");
    if (opt.svg) {
        std::ifstream is(opt.out, std::ios::binary);
        const CsvTable parsed = read_csv(is);
        std::ostringstream os;
        write_svg(os, parsed, svg_options);
        write_file(opt.out + ".svg", os.str());
    }
}

int run_list_systems(const CommonOptions& opt) {
    const std::vector<System> suite = builtin_suite();
    if (opt.json) {
        nlohmann::json arr = nlohmann::json::array();
        for (const System& s : suite) {
            arr.push_back({{"name", s.name},
                           {"dimension", s.dimension},
                           {"regime", s.regime},
                           {"default_x0", s.default_x0},
                           {"has_jacobian", s.has_jacobian()},
                           {"has_exact", s.has_exact()},
                           {"description", s.description}});
        }
        std::cout << arr.dump(2) << '\n';
    } else {
        std::printf("%-14s %3s  %-11s  %-22s  %s\n", "name", "dim", "regime", "default_x0",
                    "description");
        for (const System& s : suite)
            std::printf("%-14s %3d  %-11s  %-22s  %s\n", s.name.c_str(), s.dimension,
                        s.regime.c_str(), format_point(s.default_x0).c_str(),
                        s.description.c_str());
    }
    if (!opt.check) return kExitOk;

    // Gradient check at default_x0 plus 10 seeded perturbations in a box of
    // half-width 2, and an exact-flow consistency check where available.
    bool ok = true;
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> box(-2.0, 2.0);
    for (const System& s : suite) {
        double worst_jac = 0.0;
        if (s.has_jacobian()) {
            worst_jac = jacobian_discrepancy(s, 0.0, s.default_x0);
            for (int p = 0; p < 10; ++p) {
                Vec x = s.default_x0;
                for (double& c : x) c += box(rng);
                worst_jac = std::max(worst_jac, jacobian_discrepancy(s, 0.0, x));
            }
        }
        double worst_flow = 0.0;
        if (s.has_exact()) {
            const double dt = std::cbrt(std::numeric_limits<double>::epsilon());
            for (int p = 1; p <= 10; ++p) {
                const double t = 0.5 * p;
                const Vec xp = evaluate_exact(s, t + dt, s.default_x0);
                const Vec xm = evaluate_exact(s, t - dt, s.default_x0);
                const Vec x = evaluate_exact(s, t, s.default_x0);
                const Vec fx = evaluate(s, t, x);
                double num = 0.0, den = 0.0;
                for (size_t i = 0; i < xp.size(); ++i) {
                    const double dd = (xp[i] - xm[i]) / (2.0 * dt);
                    num += (dd - fx[i]) * (dd - fx[i]);
                    den += fx[i] * fx[i];
                }
                worst_flow = std::max(worst_flow, std::sqrt(num) / std::max(1.0, std::sqrt(den)));
            }
        }
        const bool pass = worst_jac < 1e-5 && worst_flow < 1e-6;
        ok = ok && pass;
        std::printf("check %-14s jacobian=%.3e flow=%.3e %s\n", s.name.c_str(), worst_jac,
                    worst_flow, pass ? "ok" : "FAIL");
    }
    return ok ? kExitOk : kExitNumerical;
}

int run_integrate(const CommonOptions& opt) {
    const System sys = find_system(opt.system);
    const ButcherTableau& method = method_by_name(opt.method);

    CsvTable table;
    nlohmann::json info;
    if (opt.reference) {
        const std::vector<double> grid = integration_grid(opt.t0, opt.t_final, opt.h);
        const ReferenceResult ref =
            reference_trajectory(sys, sys.default_x0, opt.t0, opt.t_final, grid);
        table = trajectory_table(ref.trajectory);
        info = {{"system", sys.name},
                {"method", ref.trajectory.method_name},
                {"h", opt.h},
                {"points", ref.trajectory.times.size()},
                {"certificate", ref.certificate},
                {"refinements", ref.refinements},
                {"final", ref.trajectory.states.back()}};
        if (!opt.json && !opt.out.empty())
            std::cout << "reference: system=" << sys.name << " points=" << table.rows.size()
                      << " certificate=" << format_double(ref.certificate)
                      << " final=" << format_point(ref.trajectory.states.back()) << '\n';
    } else {
        const Trajectory tr = integrate(method, sys, sys.default_x0, opt.t0, opt.t_final, opt.h);
        table = trajectory_table(tr);
        info = {{"system", sys.name},
                {"method", method.name},
                {"h", opt.h},
                {"steps", tr.step_count()},
                {"final", tr.states.back()}};
        if (!opt.json && !opt.out.empty())
            std::cout << "integrate: system=" << sys.name << " method=" << method.name
                      << " steps=" << tr.step_count()
                      << " final=" << format_point(tr.states.back()) << '\n';
    }
    if (opt.json) std::cout << info.dump(2) << '\n';
    // bare stdout mode emits the CSV itself, suitable for piping
    if (opt.out.empty() && !opt.json) write_csv(std::cout, table);
    emit_outputs(opt, table, nullptr,
                 {"trajectory: " + sys.name + " (" +
                      (opt.reference ? std::string("reference") : opt.method) + ")",
                  "t", "x"});
    return kExitOk;
}

int classification_exit(const GrowthReport& report) {
    return report.growth_class == GrowthClass::undetermined ? kExitUndetermined : kExitOk;
}

int run_condition(const CommonOptions& opt, bool regime_summary) {
    const System sys = find_system(opt.system);
    const ButcherTableau& method = method_by_name(opt.method);
    const RegimeResult result =
        regime_experiment(sys, method, sys.default_x0, opt.t0, opt.t_final, opt.h, opt.queries,
                          opt.thresholds, parse_norm(opt.norm));

    const CsvTable table = conditioning_table(result.curve);
    const nlohmann::json sidecar = to_json(result.curve, result.report);
    if (opt.json) {
        std::cout << sidecar.dump(2) << '\n';
    } else {
        const char* label = regime_summary ? "regime" : "condition";
        std::cout << label << ": system=" << sys.name << " method=" << method.name
                  << " T=" << format_double(opt.t_final) << " h=" << format_double(opt.h)
                  << " E(T)=" << format_double(result.curve.values.back())
                  << " class=" << to_string(result.report.growth_class) << '\n';
    }
    emit_outputs(opt, table, &sidecar, {"conditioning: " + sys.name, "t", "E"});
    return classification_exit(result.report);
}

int run_classify(const CommonOptions& opt) {
    std::ifstream is(opt.in, std::ios::binary);
    if (!is) throw usage_error("cannot open '" + opt.in + "'");
    const ConditioningCurve curve = curve_from_table(read_csv(is));
    const GrowthReport report = classify_growth(curve, opt.thresholds);
    if (opt.json)
        std::cout << to_json(report).dump(2) << '\n';
    else
        std::cout << "class=" << to_string(report.growth_class) << '\n';
    return classification_exit(report);
}

int run_convergence(const CommonOptions& opt) {
    const System sys = find_system(opt.system);
    const ButcherTableau& method = method_by_name(opt.method);
    const ConvergenceStudy study =
        convergence_study(sys, method, sys.default_x0, opt.t0, opt.t_final, opt.h0, opt.levels);

    const CsvTable table = convergence_table(study);
    const nlohmann::json sidecar = to_json(study);
    if (opt.json) {
        std::cout << sidecar.dump(2) << '\n';
    } else {
        std::ostringstream orders;
        orders << '[';
        for (size_t i = 0; i < study.observed_orders.size(); ++i) {
            if (i) orders << ", ";
            orders << format_double(study.observed_orders[i]);
        }
        orders << ']';
        std::cout << "convergence: system=" << sys.name << " method=" << method.name
                  << " orders=" << orders.str()
                  << (study.degenerate ? " (" + study.degenerate_note + ")" : "") << '\n';
    }
    emit_outputs(opt, table, &sidecar,
                 {"convergence: " + sys.name + " / " + method.name, "h", "max_error"});
    return kExitOk;
}

int run_bound_check(const CommonOptions& opt) {
    const System sys = find_system(opt.system);
    const ButcherTableau& method = method_by_name(opt.method);
    const BoundReport report = bound_check(sys, method, sys.default_x0, opt.t0, opt.t_final,
                                           opt.h0, opt.levels, opt.epsilon, opt.thresholds);

    const CsvTable table = bound_table(report);
    const nlohmann::json sidecar = to_json(report);
    if (opt.json) {
        std::cout << sidecar.dump(2) << '\n';
    } else {
        std::cout << "bound-check: system=" << sys.name << " method=" << method.name
                  << " K_stability=" << format_double(report.k_stability)
                  << " growth=" << to_string(report.growth.growth_class)
                  << " verified=" << (report.verified ? "true" : "false") << '\n';
    }
    emit_outputs(opt, table, &sidecar,
                 {"bound-check: " + sys.name + " / " + method.name, "h", "K"});
    return report.verified ? kExitOk : kExitUndetermined;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"conditioning of ODE solutions: E(t) curves, growth classes, and global-error "
                 "studies for fixed-step one-step integrators"};
    app.require_subcommand(1);
    // --h is a step-size option here, so help is long-form only.
    app.set_help_flag("--help", "print help");
    CommonOptions opt;
    auto subcommand = [&app](const std::string& name, const std::string& desc) {
        CLI::App* cmd = app.add_subcommand(name, desc);
        cmd->set_help_flag("--help", "print help");
        return cmd;
    };

    CLI::App* list = subcommand("list-systems", "list the built-in systems");
    list->add_flag("--json", opt.json, "emit JSON instead of a table");
    list->add_flag("--check", opt.check, "run Jacobian and exact-flow consistency checks");
    list->add_option("--seed", opt.seed, "seed for the random check points");

    CLI::App* integrate_cmd = subcommand("integrate", "integrate and emit t,x1..xd CSV");
    integrate_cmd->add_option("--system", opt.system)->required();
    integrate_cmd->add_option("--method", opt.method);
    integrate_cmd->add_option("--t0", opt.t0);
    integrate_cmd->add_option("--t-final", opt.t_final)->required();
    integrate_cmd->add_option("--h", opt.h)->required();
    integrate_cmd->add_flag("--reference", opt.reference,
                            "emit a step-halving certified reference instead");
    integrate_cmd->add_option("--out", opt.out);
    integrate_cmd->add_flag("--json", opt.json);
    integrate_cmd->add_flag("--svg", opt.svg);

    CLI::App* condition = subcommand("condition", "emit the E(t) curve as t,E,logE CSV "
                                                          "with a growth-report JSON sidecar");
    condition->add_option("--system", opt.system)->required();
    condition->add_option("--method", opt.method);
    condition->add_option("--t0", opt.t0);
    condition->add_option("--t-final", opt.t_final)->required();
    condition->add_option("--h", opt.h)->required();
    condition->add_option("--queries", opt.queries);
    condition->add_option("--norm", opt.norm, "spectral (default) or frobenius");
    add_threshold_flags(condition, opt);
    condition->add_option("--out", opt.out);
    condition->add_flag("--json", opt.json);
    condition->add_flag("--svg", opt.svg);

    CLI::App* classify = subcommand("classify", "classify a t,E[,logE] CSV");
    classify->add_option("--in", opt.in)->required();
    add_threshold_flags(classify, opt);
    classify->add_flag("--json", opt.json);

    CLI::App* convergence = subcommand("convergence", "observed-order study");
    convergence->add_option("--system", opt.system)->required();
    convergence->add_option("--method", opt.method);
    convergence->add_option("--t0", opt.t0);
    convergence->add_option("--t-final", opt.t_final)->required();
    convergence->add_option("--h0", opt.h0)->required();
    convergence->add_option("--levels", opt.levels);
    convergence->add_option("--out", opt.out);
    convergence->add_flag("--json", opt.json);
    convergence->add_flag("--svg", opt.svg);

    CLI::App* bound = subcommand("bound-check", "empirical K in the global-error bound");
    bound->add_option("--system", opt.system)->required();
    bound->add_option("--method", opt.method);
    bound->add_option("--t0", opt.t0);
    bound->add_option("--t-final", opt.t_final)->required();
    bound->add_option("--h0", opt.h0)->required();
    bound->add_option("--levels", opt.levels);
    bound->add_option("--epsilon", opt.epsilon);
    add_threshold_flags(bound, opt);
    bound->add_option("--out", opt.out);
    bound->add_flag("--json", opt.json);
    bound->add_flag("--svg", opt.svg);

    CLI::App* regime = subcommand("regime", "full pipeline: E(t) plus growth class");
    regime->add_option("--system", opt.system)->required();
    regime->add_option("--method", opt.method);
    regime->add_option("--t0", opt.t0);
    regime->add_option("--t-final", opt.t_final)->required();
    regime->add_option("--h", opt.h)->required();
    regime->add_option("--queries", opt.queries);
    regime->add_option("--norm", opt.norm, "spectral (default) or frobenius");
    add_threshold_flags(regime, opt);
    regime->add_option("--out", opt.out);
    regime->add_flag("--json", opt.json);
    regime->add_flag("--svg", opt.svg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    if (list->parsed()) return run_list_systems(opt);
    if (integrate_cmd->parsed()) return run_integrate(opt);
    if (condition->parsed()) return run_condition(opt, false);
    if (classify->parsed()) return run_classify(opt);
    if (convergence->parsed()) return run_convergence(opt);
    if (bound->parsed()) return run_bound_check(opt);
    if (regime->parsed()) return run_condition(opt, true);
    return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const usage_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitNumerical;
    }
}
