#include "odecond/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "odecond/errors.hpp"

namespace odecond {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_csv(std::ostream& os, const CsvTable& table) {
    for (size_t i = 0; i < table.header.size(); ++i) {
        if (i) os << ',';
        os << table.header[i];
    }
    os << '\n';
    for (const std::vector<double>& row : table.rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) os << ',';
            os << format_double(row[i]);
        }
        os << '\n';
    }
}

CsvTable read_csv(std::istream& is) {
    CsvTable table;
    std::string line;
    if (!std::getline(is, line)) throw usage_error("read_csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) table.header.push_back(cell);
    if (table.header.empty()) throw usage_error("read_csv: empty header");

    size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        row.reserve(table.header.size());
        std::stringstream ls(line);
        while (std::getline(ls, cell, ',')) {
            try {
                size_t pos = 0;
                row.push_back(std::stod(cell, &pos));
                if (pos != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                std::ostringstream os;
                os << "read_csv: line " << lineno << ": cannot parse '" << cell << "' as a number";
                throw usage_error(os.str());
            }
        }
        if (row.size() != table.header.size()) {
            std::ostringstream os;
            os << "read_csv: line " << lineno << " has " << row.size() << " fields, expected "
               << table.header.size();
            throw usage_error(os.str());
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

CsvTable trajectory_table(const Trajectory& tr) {
    CsvTable table;
    table.header.push_back("t");
    for (int i = 1; i <= tr.dimension(); ++i) table.header.push_back("x" + std::to_string(i));
    table.rows.reserve(tr.times.size());
    for (size_t j = 0; j < tr.times.size(); ++j) {
        std::vector<double> row;
        row.reserve(static_cast<size_t>(tr.dimension()) + 1);
        row.push_back(tr.times[j]);
        row.insert(row.end(), tr.states[j].begin(), tr.states[j].end());
        table.rows.push_back(std::move(row));
    }
    return table;
}

CsvTable conditioning_table(const ConditioningCurve& c) {
    CsvTable table;
    table.header = {"t", "E", "logE"};
    table.rows.reserve(c.query_times.size());
    for (size_t i = 0; i < c.query_times.size(); ++i)
        table.rows.push_back({c.query_times[i], c.values[i], c.log_values[i]});
    return table;
}

CsvTable convergence_table(const ConvergenceStudy& s) {
    CsvTable table;
    table.header = {"h", "max_error", "observed_order"};
    for (size_t k = 0; k < s.levels.size(); ++k) {
        const double order =
            k > 0 ? s.observed_orders[k - 1] : std::numeric_limits<double>::quiet_NaN();
        table.rows.push_back({s.levels[k].h, s.levels[k].max_error, order});
    }
    return table;
}

CsvTable bound_table(const BoundReport& r) {
    CsvTable table;
    table.header = {"h", "K"};
    for (const BoundLevel& level : r.per_level) table.rows.push_back({level.h, level.K});
    return table;
}

ConditioningCurve curve_from_table(const CsvTable& table) {
    if (table.columns() < 2)
        throw usage_error("curve_from_table: expected columns t,E[,logE]");
    ConditioningCurve curve;
    const bool has_log = table.columns() >= 3;
    for (const std::vector<double>& row : table.rows) {
        curve.query_times.push_back(row[0]);
        curve.original_times.push_back(row[0]);
        curve.values.push_back(row[1]);
        curve.log_values.push_back(has_log ? row[2] : std::log(row[1]));
    }
    return curve;
}

nlohmann::json to_json(const GrowthThresholds& t) {
    return {{"delta_const", t.delta_const},
            {"r_squared_cutoff", t.r_squared_cutoff},
            {"rho_min", t.rho_min}};
}

nlohmann::json to_json(const LineFit& f) {
    return {{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared}};
}

namespace {

// JSON has no inf/nan literals; emit them as strings so reports stay valid.
nlohmann::json json_number(double x) {
    if (std::isfinite(x)) return x;
    return format_double(x);
}

}  // namespace

nlohmann::json to_json(const GrowthReport& r) {
    nlohmann::json j;
    j["class"] = std::string(to_string(r.growth_class));
    j["constancy_ratio"] = json_number(r.constancy_ratio);
    j["tail_linear_fit"] = to_json(r.tail_linear_fit);
    j["tail_exp_fit"] = {{"rate", r.tail_exp_fit.slope},
                         {"intercept", r.tail_exp_fit.intercept},
                         {"r_squared", r.tail_exp_fit.r_squared}};
    j["thresholds"] = to_json(r.thresholds);
    j["tail_window"] = {r.tail_start, r.tail_end};
    j["tail_points"] = r.tail_count;
    return j;
}

nlohmann::json to_json(const ConditioningCurve& c, const GrowthReport& r) {
    nlohmann::json j;
    j["system"] = c.system_name;
    j["method"] = c.method_name;
    j["h"] = c.h;
    j["queries"] = c.query_times.size();
    j["E_final"] = json_number(c.values.empty() ? 0.0 : c.values.back());
    j["logE_final"] = json_number(c.log_values.empty() ? 0.0 : c.log_values.back());
    double max_snap = 0.0;
    for (size_t i = 0; i < c.query_times.size(); ++i)
        max_snap = std::max(max_snap, std::abs(c.query_times[i] - c.original_times[i]));
    j["max_snap_distance"] = max_snap;
    j["growth"] = to_json(r);
    return j;
}

nlohmann::json to_json(const ConvergenceStudy& s) {
    nlohmann::json j;
    j["system"] = s.system_name;
    j["method"] = s.method_name;
    j["t0"] = s.t0;
    j["t_final"] = s.t_final;
    j["reference_certificate"] = s.reference_certificate;
    j["reference_refinements"] = s.reference_refinements;
    j["degenerate"] = s.degenerate;
    if (s.degenerate) j["note"] = s.degenerate_note;
    nlohmann::json levels = nlohmann::json::array();
    for (const ConvergenceLevel& level : s.levels) {
        nlohmann::json lj = {{"h", level.h}, {"max_error", level.max_error},
                             {"failed", level.failed}};
        if (!level.note.empty()) lj["note"] = level.note;
        levels.push_back(lj);
    }
    j["levels"] = levels;
    nlohmann::json orders = nlohmann::json::array();
    for (double o : s.observed_orders) orders.push_back(json_number(o));
    j["observed_orders"] = orders;
    return j;
}

nlohmann::json to_json(const BoundReport& r) {
    nlohmann::json j;
    j["system"] = r.system_name;
    j["method"] = r.method_name;
    j["t0"] = r.t0;
    j["t_final"] = r.t_final;
    j["epsilon"] = r.epsilon;
    j["order"] = r.order;
    j["reference_certificate"] = r.reference_certificate;
    j["reference_refinements"] = r.reference_refinements;
    nlohmann::json levels = nlohmann::json::array();
    for (const BoundLevel& level : r.per_level)
        levels.push_back({{"h", level.h}, {"K", json_number(level.K)}, {"failed", level.failed}});
    j["per_level"] = levels;
    j["K_stability"] = json_number(r.k_stability);
    j["verified"] = r.verified;
    j["growth"] = to_json(r.growth);
    return j;
}

namespace {

std::string svg_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string tick_label(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

const char* kSeriesColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                               "#ff7f0e", "#8c564b", "#17becf"};

}  // namespace

void write_svg(std::ostream& os, const CsvTable& table, const SvgOptions& options) {
    if (table.columns() < 2) throw usage_error("write_svg: need at least two columns");
    const int w = options.width, h = options.height;
    const int ml = 72, mr = 24, mt = 40, mb = 56;  // margins
    const double pw = w - ml - mr, ph = h - mt - mb;

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const std::vector<double>& row : table.rows) {
        if (!std::isfinite(row[0])) continue;
        xmin = std::min(xmin, row[0]);
        xmax = std::max(xmax, row[0]);
        for (size_t c = 1; c < row.size(); ++c) {
            if (!std::isfinite(row[c])) continue;
            ymin = std::min(ymin, row[c]);
            ymax = std::max(ymax, row[c]);
        }
    }
    if (!(xmin < xmax)) xmax = xmin + 1.0;
    if (!(ymin < ymax)) ymax = ymin + 1.0;
    if (!std::isfinite(xmin) || !std::isfinite(ymin))
        throw usage_error("write_svg: no finite data to plot");

    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return mt + ph - (y - ymin) / (ymax - ymin) * ph; };

    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
       << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n"
       << "  <rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
    if (!options.title.empty())
        os << "  <text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" "
           << "font-family=\"sans-serif\" font-size=\"16\">" << svg_escape(options.title)
           << "</text>\n";

    // axes
    os << "  <line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw << "\" y2=\""
       << mt + ph << "\" stroke=\"black\"/>\n"
       << "  <line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + ph
       << "\" stroke=\"black\"/>\n";
    const int kTicks = 5;
    for (int i = 0; i <= kTicks; ++i) {
        const double fx = xmin + (xmax - xmin) * i / kTicks;
        const double fy = ymin + (ymax - ymin) * i / kTicks;
        os << "  <line x1=\"" << px(fx) << "\" y1=\"" << mt + ph << "\" x2=\"" << px(fx)
           << "\" y2=\"" << mt + ph + 5 << "\" stroke=\"black\"/>\n"
           << "  <text x=\"" << px(fx) << "\" y=\"" << mt + ph + 20
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
           << tick_label(fx) << "</text>\n"
           << "  <line x1=\"" << ml - 5 << "\" y1=\"" << py(fy) << "\" x2=\"" << ml << "\" y2=\""
           << py(fy) << "\" stroke=\"black\"/>\n"
           << "  <text x=\"" << ml - 8 << "\" y=\"" << py(fy) + 4
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
           << tick_label(fy) << "</text>\n";
    }
    os << "  <text x=\"" << ml + pw / 2 << "\" y=\"" << h - 12
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
       << svg_escape(options.x_label) << "</text>\n"
       << "  <text x=\"16\" y=\"" << mt + ph / 2
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\""
       << "rotate(-90 16 " << mt + ph / 2 << ")\">"
       << svg_escape(options.y_label.empty() ? "value" : options.y_label) << "</text>\n";

    for (size_t c = 1; c < table.columns(); ++c) {
        const char* color = kSeriesColors[(c - 1) % (sizeof(kSeriesColors) / sizeof(char*))];
        os << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (const std::vector<double>& row : table.rows) {
            if (!std::isfinite(row[0]) || !std::isfinite(row[c])) continue;
            if (!first) os << ' ';
            os << px(row[0]) << ',' << py(row[c]);
            first = false;
        }
        os << "\"/>\n";
        os << "  <text x=\"" << ml + pw - 6 << "\" y=\"" << mt + 16 + 16 * (c - 1)
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << color
           << "\">" << svg_escape(table.header[c]) << "</text>\n";
    }
    os << "</svg>\n";
}

}  // namespace odecond
