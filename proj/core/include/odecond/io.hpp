#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "odecond/conditioning.hpp"
#include "odecond/studies.hpp"

namespace odecond {

/// Doubles render as %.17g everywhere below: full 17-significant-digit
/// decimal, so emitted files round-trip losslessly and byte-identically.
std::string format_double(double x);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    size_t columns() const { return header.size(); }
};

void write_csv(std::ostream& os, const CsvTable& table);
CsvTable read_csv(std::istream& is);

CsvTable trajectory_table(const Trajectory& tr);            // t,x1,...,xd
CsvTable conditioning_table(const ConditioningCurve& c);    // t,E,logE
CsvTable convergence_table(const ConvergenceStudy& s);      // h,max_error,observed_order
CsvTable bound_table(const BoundReport& r);                 // h,K

/// Rebuilds a curve from a t,E[,logE] table (CSV input to `classify`).
ConditioningCurve curve_from_table(const CsvTable& table);

nlohmann::json to_json(const GrowthThresholds& t);
nlohmann::json to_json(const LineFit& f);
nlohmann::json to_json(const GrowthReport& r);
nlohmann::json to_json(const ConditioningCurve& c, const GrowthReport& r);
nlohmann::json to_json(const ConvergenceStudy& s);
nlohmann::json to_json(const BoundReport& r);

struct SvgOptions {
    std::string title;
    std::string x_label = "t";
    std::string y_label;
    int width = 840;
    int height = 560;
};

/// Standalone SVG line chart: column 1 is the x axis, every further column
/// becomes one polyline. Non-finite samples are skipped. The chart is drawn
/// from the table alone; nothing is recomputed.
void write_svg(std::ostream& os, const CsvTable& table, const SvgOptions& options);

}  // namespace odecond
