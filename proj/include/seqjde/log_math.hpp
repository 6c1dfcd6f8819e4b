#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace seqjde {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(x) with log(0) = -inf, for nonnegative weights.
inline double safe_log(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

// log(sum_i exp(a_i)); -inf for an empty span or all -inf terms.
inline double log_sum_exp(std::span<const double> a) {
    if (a.empty()) return kNegInf;
    const double mx = *std::max_element(a.begin(), a.end());
    if (mx == kNegInf) return kNegInf;
    if (mx == std::numeric_limits<double>::infinity()) return mx;
    double s = 0.0;
    for (double v : a) s += std::exp(v - mx);
    return mx + std::log(s);
}

}  // namespace seqjde
