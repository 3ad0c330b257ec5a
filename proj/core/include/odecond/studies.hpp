#pragma once

#include <span>
#include <string>

#include "odecond/conditioning.hpp"
#include "odecond/reference.hpp"

namespace odecond {

struct ConvergenceLevel {
    double h = 0.0;
    double max_error = 0.0;  // max over this level's own grid
    bool failed = false;     // blow-up at this level; excluded from orders
    std::string note;
};

struct ConvergenceStudy {
    std::string system_name;
    std::string method_name;
    double t0 = 0.0;
    double t_final = 0.0;
    std::vector<ConvergenceLevel> levels;        // h strictly halving
    std::vector<double> observed_orders;         // log2(e(h)/e(h/2)); NaN where undefined
    bool degenerate = false;
    std::string degenerate_note;
    double reference_certificate = 0.0;
    int reference_refinements = 0;
};

/// Errors at h0/2^k for k = 0..n_levels-1 against a certified reference,
/// with observed orders between consecutive levels. Requires n_levels >= 3.
/// Aborts (reference_precision_error) if the reference certificate is not
/// at least 100x smaller than the smallest measured error.
ConvergenceStudy convergence_study(const System& sys, const ButcherTableau& method,
                                   std::span<const double> x0, double t0, double t_final,
                                   double h0, int n_levels);

struct BoundLevel {
    double h = 0.0;
    double K = 0.0;  // max over query times of error / ((E + eps) h^r)
    bool failed = false;
};

struct BoundReport {
    std::string system_name;
    std::string method_name;
    double t0 = 0.0;
    double t_final = 0.0;
    double epsilon = 0.0;
    int order = 0;
    std::vector<BoundLevel> per_level;
    double k_stability = 0.0;  // max over consecutive levels of K ratio either way
    bool verified = false;     // all consecutive K ratios within [1/2, 2]
    GrowthReport growth;       // classification of the E curve used
    double reference_certificate = 0.0;
    int reference_refinements = 0;
};

/// Empirical check of the error bound: per-level K(h) on the coarsest-level
/// query grid, against E computed from the finest level's rk4 transition
/// sequence (E belongs to the true solution, so it is shared across levels).
/// epsilon must be strictly positive.
BoundReport bound_check(const System& sys, const ButcherTableau& method,
                        std::span<const double> x0, double t0, double t_final, double h0,
                        int n_levels, double epsilon, const GrowthThresholds& thresholds = {});

struct RegimeResult {
    ConditioningCurve curve;
    GrowthReport report;
};

/// Full pipeline: integrate + variational propagation + E on a uniform query
/// grid + growth classification.
RegimeResult regime_experiment(const System& sys, const ButcherTableau& method,
                               std::span<const double> x0, double t0, double t_final, double h,
                               int queries = 200, const GrowthThresholds& thresholds = {},
                               MatrixNorm norm_kind = MatrixNorm::spectral);

}  // namespace odecond
