#pragma once

#include <cmath>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace odecond {

/// State vectors are plain double sequences; finiteness is enforced at the
/// operation boundaries that construct or consume them.
using Vec = std::vector<double>;

inline bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

/// Euclidean norm.
inline double norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline double distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

/// "[x1, x2, ...]" — used in error messages only.
inline std::string format_point(std::span<const double> v) {
    std::ostringstream os;
    os << '[';
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) os << ", ";
        os << v[i];
    }
    os << ']';
    return os.str();
}

}  // namespace odecond
