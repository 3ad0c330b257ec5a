#include "odecond/studies.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "odecond/errors.hpp"

namespace odecond {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Index of level grid point i (step h0/2^k) in the finer grid (step
// h0/2^fine_k). Both grids come from integration_grid(), so interior points
// coincide bitwise and the final points are both t_final.
size_t map_index(size_t i, size_t level_last, size_t fine_last, int shift) {
    if (i == level_last) return fine_last;
    return i << shift;
}

void check_aligned(double a, double b) {
    if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a)))
        throw std::logic_error("study grids misaligned; this is a bug");
}

void check_reference_consistency(double certificate, double min_positive_error,
                                 bool any_positive) {
    if (!any_positive) {
        if (certificate != 0.0)
            throw reference_precision_error(
                "reference certificate is nonzero but every measured error is zero");
        return;
    }
    if (certificate > 0.01 * min_positive_error) {
        std::ostringstream os;
        os << "reference certificate " << certificate
           << " is too large for the smallest measured error " << min_positive_error
           << " (needs a 100x margin); shrink the horizon or coarsen the study";
        throw reference_precision_error(os.str());
    }
}

}  // namespace

ConvergenceStudy convergence_study(const System& sys, const ButcherTableau& method,
                                   std::span<const double> x0, double t0, double t_final,
                                   double h0, int n_levels) {
    if (n_levels < 3) throw usage_error("convergence_study: need at least 3 levels");
    if (!(h0 > 0.0)) throw usage_error("convergence_study: h0 must be positive");
    if (!(t_final > t0)) throw usage_error("convergence_study: t_final must exceed t0");

    ConvergenceStudy study;
    study.system_name = sys.name;
    study.method_name = method.name;
    study.t0 = t0;
    study.t_final = t_final;

    const double h_fine = h0 / std::pow(2.0, n_levels - 1);
    const std::vector<double> fine_times = integration_grid(t0, t_final, h_fine);
    const ReferenceResult ref = reference_trajectory(sys, x0, t0, t_final, fine_times);
    study.reference_certificate = ref.certificate;
    study.reference_refinements = ref.refinements;

    const size_t fine_last = fine_times.size() - 1;
    for (int k = 0; k < n_levels; ++k) {
        const double h = h0 / std::pow(2.0, k);
        ConvergenceLevel level;
        level.h = h;
        try {
            const Trajectory approx = integrate(method, sys, x0, t0, t_final, h);
            const size_t level_last = approx.times.size() - 1;
            const int shift = n_levels - 1 - k;
            double worst = 0.0;
            for (size_t i = 0; i < approx.times.size(); ++i) {
                const size_t fi = map_index(i, level_last, fine_last, shift);
                check_aligned(approx.times[i], fine_times[fi]);
                worst = std::max(worst, distance(approx.states[i], ref.trajectory.states[fi]));
            }
            level.max_error = worst;
        } catch (const blow_up_error& e) {
            level.failed = true;
            level.note = e.what();
        }
        study.levels.push_back(std::move(level));
    }

    bool any_positive = false;
    double min_positive = std::numeric_limits<double>::infinity();
    bool all_zero = true;
    for (const ConvergenceLevel& level : study.levels) {
        if (level.failed) {
            all_zero = false;
            continue;
        }
        if (level.max_error > 0.0) {
            any_positive = true;
            all_zero = false;
            min_positive = std::min(min_positive, level.max_error);
        }
    }
    check_reference_consistency(study.reference_certificate, min_positive, any_positive);

    for (int k = 0; k + 1 < n_levels; ++k) {
        const ConvergenceLevel& a = study.levels[static_cast<size_t>(k)];
        const ConvergenceLevel& b = study.levels[static_cast<size_t>(k) + 1];
        if (a.failed || b.failed || a.max_error <= 0.0 || b.max_error <= 0.0)
            study.observed_orders.push_back(kNaN);
        else
            study.observed_orders.push_back(std::log2(a.max_error / b.max_error));
    }

    if (all_zero && !study.levels.empty()) {
        study.degenerate = true;
        study.degenerate_note = "degenerate: exact on this system";
    }
    return study;
}

BoundReport bound_check(const System& sys, const ButcherTableau& method,
                        std::span<const double> x0, double t0, double t_final, double h0,
                        int n_levels, double epsilon, const GrowthThresholds& thresholds) {
    if (!(epsilon > 0.0)) {
        std::ostringstream os;
        os << "bound_check: the bound requires any epsilon > 0 (it divides by E(t) + epsilon and "
              "E(t0) = 0); got "
           << epsilon;
        throw usage_error(os.str());
    }
    if (n_levels < 3) throw usage_error("bound_check: need at least 3 levels");
    if (!(h0 > 0.0)) throw usage_error("bound_check: h0 must be positive");
    if (!(t_final > t0)) throw usage_error("bound_check: t_final must exceed t0");

    BoundReport report;
    report.system_name = sys.name;
    report.method_name = method.name;
    report.t0 = t0;
    report.t_final = t_final;
    report.epsilon = epsilon;
    report.order = method.order;

    // Shared query grid: the coarsest level's own grid, which every finer
    // level contains.
    const std::vector<double> query_times = integration_grid(t0, t_final, h0);
    if (query_times.size() < 16)
        throw usage_error("bound_check: the h0 grid needs at least 16 points to classify E; "
                          "decrease h0 or lengthen the horizon");

    const double h_fine = h0 / std::pow(2.0, n_levels - 1);
    const ReferenceResult ref = reference_trajectory(sys, x0, t0, t_final, query_times);
    report.reference_certificate = ref.certificate;
    report.reference_refinements = ref.refinements;

    // E from the finest level's transition sequence (rk4): the conditioning
    // of the true solution, shared by every level.
    const TransitionSequence seq = transition_sequence(rk4_tableau(), sys, x0, t0, t_final, h_fine);
    const ConditioningCurve curve = conditioning_curve(seq, query_times);
    report.growth = classify_growth(curve, thresholds);

    bool any_positive = false;
    double min_positive = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n_levels; ++k) {
        const double h = h0 / std::pow(2.0, k);
        BoundLevel level;
        level.h = h;
        try {
            const Trajectory approx = integrate(method, sys, x0, t0, t_final, h);
            const size_t level_last = approx.times.size() - 1;
            const size_t query_last = query_times.size() - 1;
            const double hr = std::pow(h, method.order);
            double worst_ratio = 0.0;
            double worst_error = 0.0;
            for (size_t q = 0; q < query_times.size(); ++q) {
                const size_t ai = (q == query_last) ? level_last : (q << k);
                check_aligned(query_times[q], approx.times[ai]);
                const double err = distance(approx.states[ai], ref.trajectory.states[q]);
                worst_error = std::max(worst_error, err);
                const double denom = (curve.values[q] + epsilon) * hr;
                const double ratio = err / denom;  // E may be inf; ratio is then 0
                if (std::isfinite(ratio)) worst_ratio = std::max(worst_ratio, ratio);
            }
            level.K = worst_ratio;
            if (worst_error > 0.0) {
                any_positive = true;
                min_positive = std::min(min_positive, worst_error);
            }
        } catch (const blow_up_error& e) {
            level.failed = true;
            (void)e;
        }
        report.per_level.push_back(level);
    }
    check_reference_consistency(report.reference_certificate, min_positive, any_positive);

    // Stability of K across halvings; "sufficiently small h" is operational
    // when consecutive K stay within a factor of 2.
    double stability = 0.0;
    int pairs = 0;
    const BoundLevel* prev = nullptr;
    for (const BoundLevel& level : report.per_level) {
        if (level.failed) continue;
        if (prev && prev->K > 0.0 && level.K > 0.0) {
            const double r = prev->K / level.K;
            stability = std::max(stability, std::max(r, 1.0 / r));
            ++pairs;
        }
        prev = &level;
    }
    report.k_stability = stability;
    report.verified = pairs >= 1 && stability <= 2.0;
    return report;
}

RegimeResult regime_experiment(const System& sys, const ButcherTableau& method,
                               std::span<const double> x0, double t0, double t_final, double h,
                               int queries, const GrowthThresholds& thresholds,
                               MatrixNorm norm_kind) {
    const TransitionSequence seq = transition_sequence(method, sys, x0, t0, t_final, h);
    const std::vector<double> qs = uniform_queries(t0, t_final, queries);
    RegimeResult result;
    result.curve = conditioning_curve(seq, qs, norm_kind);
    result.report = classify_growth(result.curve, thresholds);
    return result;
}

}  // namespace odecond
