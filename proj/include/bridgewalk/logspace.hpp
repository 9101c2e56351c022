// logspace.hpp — log-domain probability arithmetic; -inf encodes zero mass.
#pragma once

#include <cmath>
#include <limits>
#include <vector>

namespace bridgewalk {

inline constexpr double log_zero = -std::numeric_limits<double>::infinity();

inline double log_from(double p) { return p > 0.0 ? std::log(p) : log_zero; }

// log(e^x + e^y) without leaving log space.
inline double log_add(double x, double y) {
    if (x == log_zero) return y;
    if (y == log_zero) return x;
    if (y > x) std::swap(x, y);
    return x + std::log1p(std::exp(y - x));
}

// Stable log of a sum of log-domain terms.
inline double log_sum(const std::vector<double>& xs) {
    double m = log_zero;
    for (double x : xs)
        if (x > m) m = x;
    if (m == log_zero) return log_zero;
    double acc = 0.0;
    for (double x : xs) acc += std::exp(x - m);
    return m + std::log(acc);
}

}  // namespace bridgewalk
