#include "odecond/conditioning.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>
#include <thread>

#include "odecond/errors.hpp"

namespace odecond {

std::vector<double> uniform_queries(double t0, double t_final, int count) {
    if (count < 2) throw usage_error("uniform_queries: need at least 2 points");
    std::vector<double> q(static_cast<size_t>(count));
    const double span = t_final - t0;
    for (int i = 0; i < count; ++i)
        q[static_cast<size_t>(i)] = t0 + span * static_cast<double>(i) / (count - 1);
    q.back() = t_final;
    return q;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Nonnegative running sum held as mant * exp(base); plain double addition
// (base stays 0) until magnitudes force a rebase.
struct ScaledAccumulator {
    double mant = 0.0;
    double base = 0.0;

    void add(double weight, double value_mant, double value_log_off) {
        if (weight == 0.0 || value_mant == 0.0) return;
        if (value_log_off == base) {
            mant += weight * value_mant;
        } else if (value_log_off > base) {
            mant = mant * std::exp(base - value_log_off) + weight * value_mant;
            base = value_log_off;
        } else {
            mant += weight * value_mant * std::exp(value_log_off - base);
        }
        if (mant > 1e100) {
            base += std::log(mant);
            mant = 1.0;
        }
    }

    double log_value() const { return mant <= 0.0 ? -kInf : std::log(mant) + base; }

    double value() const {
        if (base == 0.0) return mant;  // exact plain-summation path
        const double lv = log_value();
        // exponentiate the combined log: exp(base) alone can overflow even
        // when the represented value is within range
        return lv > 709.0 ? kInf : std::exp(lv);
    }
};

size_t nearest_grid_index(const std::vector<double>& times, double t) {
    auto it = std::lower_bound(times.begin(), times.end(), t);
    if (it == times.begin()) return 0;
    if (it == times.end()) return times.size() - 1;
    const size_t hi = static_cast<size_t>(it - times.begin());
    return (t - times[hi - 1] <= times[hi] - t) ? hi - 1 : hi;
}

// E at one query (grid index m), by backward accumulation over the
// transition matrices with lazy rescaling of the running product.
void evaluate_query(const TransitionSequence& seq, size_t m, MatrixNorm kind, double& value,
                    double& log_value) {
    if (m == 0) {
        value = 0.0;
        log_value = -kInf;
        return;
    }
    const int d = seq.dimension();
    const std::vector<double>& times = seq.base.times;
    Matrix p = Matrix::identity(d);
    Matrix tmp(d, d);
    double log_off = 0.0;
    ScaledAccumulator acc;

    // Sample at s = t_m (P = I), then P picks up M_j as j walks down to 0;
    // after multiplying by M_j, P = Phi(t_m, t_j) and the trapezoid weight
    // for that sample is half the surrounding grid spacing.
    acc.add(0.5 * (times[m] - times[m - 1]), 1.0, 0.0);
    for (size_t j = m; j-- > 0;) {
        multiply_into(p, seq.steps[j], tmp);
        std::swap(p, tmp);
        double nrm = matrix_norm(p, kind);
        if (nrm > 1e100 || (nrm > 0.0 && nrm < 1e-100)) {
            p *= 1.0 / nrm;
            log_off += std::log(nrm);
            nrm = 1.0;
        }
        const double weight =
            (j == 0) ? 0.5 * (times[1] - times[0]) : 0.5 * (times[j + 1] - times[j - 1]);
        acc.add(weight, nrm, log_off);
        if (nrm == 0.0) break;  // singular product; every earlier term is zero
    }
    value = acc.value();
    log_value = acc.log_value();
}

}  // namespace

ConditioningCurve conditioning_curve(const TransitionSequence& seq,
                                     std::span<const double> query_times, MatrixNorm norm_kind,
                                     int workers_requested) {
    const std::vector<double>& times = seq.base.times;
    if (times.size() < 2) throw usage_error("conditioning_curve: empty transition sequence");
    const double t0 = times.front();
    const double tf = times.back();
    const double slack = 1e-9 * std::max(1.0, std::max(std::abs(t0), std::abs(tf)));

    ConditioningCurve curve;
    curve.h = seq.base.h;
    curve.system_name = seq.base.system_name;
    curve.method_name = seq.base.method_name;
    curve.original_times.assign(query_times.begin(), query_times.end());

    std::vector<size_t> indices(query_times.size());
    curve.query_times.resize(query_times.size());
    for (size_t q = 0; q < query_times.size(); ++q) {
        const double tq = query_times[q];
        if (!(tq >= t0 - slack) || !(tq <= tf + slack)) {
            std::ostringstream os;
            os << "conditioning_curve: query time " << tq << " outside [" << t0 << ", " << tf
               << "]";
            throw usage_error(os.str());
        }
        indices[q] = nearest_grid_index(times, tq);
        curve.query_times[q] = times[indices[q]];
    }

    curve.values.assign(query_times.size(), 0.0);
    curve.log_values.assign(query_times.size(), -kInf);

    // Work is one matrix product plus one norm per grid step per query.
    // Queries are independent and write to disjoint slots, so the worker
    // count cannot change the results.
    size_t total = 0;
    for (size_t idx : indices) total += idx;
    unsigned workers = 1;
    if (workers_requested > 0) {
        workers = static_cast<unsigned>(workers_requested);
    } else if (total > (1u << 20) && query_times.size() > 1) {
        workers = std::max(1u, std::thread::hardware_concurrency());
    }
    workers = std::min<unsigned>({workers, 16u, static_cast<unsigned>(query_times.size())});

    auto run_range = [&](size_t lo, size_t hi) {
        for (size_t q = lo; q < hi; ++q)
            evaluate_query(seq, indices[q], norm_kind, curve.values[q], curve.log_values[q]);
    };

    if (workers <= 1) {
        run_range(0, query_times.size());
    } else {
        // Interleaved assignment balances the (index-proportional) cost.
        std::vector<std::future<void>> futures;
        futures.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            futures.push_back(std::async(std::launch::async, [&, w] {
                for (size_t q = w; q < indices.size(); q += workers)
                    evaluate_query(seq, indices[q], norm_kind, curve.values[q],
                                   curve.log_values[q]);
            }));
        }
        for (auto& f : futures) f.get();
    }
    return curve;
}

std::string_view to_string(GrowthClass c) {
    switch (c) {
        case GrowthClass::constant: return "Constant";
        case GrowthClass::linear: return "Linear";
        case GrowthClass::exponential: return "Exponential";
        case GrowthClass::undetermined: return "Undetermined";
    }
    return "Undetermined";
}

namespace {

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
    LineFit fit;
    const size_t n = x.size();
    if (n < 2) return fit;
    double xm = 0.0, ym = 0.0;
    for (size_t i = 0; i < n; ++i) {
        xm += x[i];
        ym += y[i];
    }
    xm /= static_cast<double>(n);
    ym /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (x[i] - xm) * (x[i] - xm);
        sxy += (x[i] - xm) * (y[i] - ym);
    }
    if (sxx == 0.0) return fit;
    fit.slope = sxy / sxx;
    fit.intercept = ym - fit.slope * xm;
    double ss_res = 0.0, ss_tot = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double r = y[i] - (fit.slope * x[i] + fit.intercept);
        ss_res += r * r;
        ss_tot += (y[i] - ym) * (y[i] - ym);
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
    return fit;
}

}  // namespace

GrowthReport classify_growth(const ConditioningCurve& curve, const GrowthThresholds& params) {
    const std::vector<double>& ts = curve.query_times;
    const std::vector<double>& es = curve.values;
    if (ts.size() != es.size())
        throw usage_error("classify_growth: query_times and values lengths differ");
    if (ts.size() < 16) throw usage_error("classify_growth: need at least 16 query points");

    const double t0 = ts.front();
    const double T = ts.back();
    if (!(T > t0)) throw usage_error("classify_growth: degenerate time span");
    const double tail_lo = 0.5 * (t0 + T);
    const double tol = 1e-12 * std::max(1.0, std::abs(tail_lo));

    size_t tail_first = 0;
    while (tail_first < ts.size() && ts[tail_first] < tail_lo - tol) ++tail_first;
    const size_t tail_n = ts.size() - tail_first;
    if (tail_n < 3) throw usage_error("classify_growth: tail window has fewer than 3 points");

    GrowthReport report;
    report.thresholds = params;
    report.tail_start = ts[tail_first];
    report.tail_end = T;
    report.tail_count = static_cast<int>(tail_n);

    // E at the query point nearest the midpoint, for the constancy ratio.
    size_t mid_idx = tail_first;
    for (size_t i = 0; i < ts.size(); ++i)
        if (std::abs(ts[i] - tail_lo) < std::abs(ts[mid_idx] - tail_lo)) mid_idx = i;
    const double e_T = es.back();
    const double e_half = es[mid_idx];
    report.constancy_ratio = (e_T != 0.0) ? (e_T - e_half) / e_T : 0.0;

    std::span<const double> tail_t(ts.data() + tail_first, tail_n);
    std::span<const double> tail_e(es.data() + tail_first, tail_n);
    report.tail_linear_fit = least_squares(tail_t, tail_e);

    // Exp fit on (t, log E); skip points whose log is not finite.
    std::vector<double> lt, le;
    lt.reserve(tail_n);
    le.reserve(tail_n);
    for (size_t i = tail_first; i < ts.size(); ++i) {
        if (std::isfinite(curve.log_values[i])) {
            lt.push_back(ts[i]);
            le.push_back(curve.log_values[i]);
        }
    }
    if (lt.size() >= 3) report.tail_exp_fit = least_squares(lt, le);

    const double tail_span = T - tail_lo;
    if (report.constancy_ratio < params.delta_const) {
        report.growth_class = GrowthClass::constant;
    } else if (report.tail_linear_fit.r_squared >= params.r_squared_cutoff &&
               report.tail_exp_fit.slope * tail_span < 1.0) {
        report.growth_class = GrowthClass::linear;
    } else if (report.tail_exp_fit.r_squared >= params.r_squared_cutoff &&
               report.tail_exp_fit.slope > params.rho_min) {
        report.growth_class = GrowthClass::exponential;
    } else {
        report.growth_class = GrowthClass::undetermined;
    }
    return report;
}

}  // namespace odecond
