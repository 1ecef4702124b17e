// Natural-log probability arithmetic used by the decoder metrics.
#pragma once

#include <algorithm>
#include <cmath>

namespace polar {

// Stand-in for log(0). Low enough that adding a few hundred of them still
// stays far away from any real metric, high enough to avoid -inf arithmetic.
constexpr double kLogZeroFloor = -1e6;

inline bool is_log_zero(double v) { return v <= kLogZeroFloor * 0.5; }

// log(e^a + e^b), stable for any ordering of a and b.
inline double log_sum_exp(double a, double b) {
    if (a < b) std::swap(a, b);
    if (is_log_zero(b)) return a;  // also covers both-zero
    double d = a - b;
    if (d > 36.0) return a;        // exp(-d) below double epsilon of 1
    return a + std::log1p(std::exp(-d));
}

// log(sigmoid(x)) = -log(1 + e^{-x}), stable for large |x|.
inline double log_sigmoid(double x) {
    if (x > 0) return -std::log1p(std::exp(-x));
    return x - std::log1p(std::exp(x));
}

}  // namespace polar
