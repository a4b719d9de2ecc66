#pragma once

#include "kvb/cascade/constants.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace kvb {

enum class SeriesVerdict { diverging, converging, undetermined };

inline std::string to_string(SeriesVerdict v) {
    switch (v) {
        case SeriesVerdict::diverging: return "diverging";
        case SeriesVerdict::converging: return "converging";
        case SeriesVerdict::undetermined: return "undetermined";
    }
    return "undetermined";
}

struct SeriesReport {
    double s = 0.0;
    double log2_eta_sq = 0.0;
    std::vector<double> log2_terms;         ///< n = 0..n_terms-1
    std::vector<double> log2_partial_sums;
    SeriesVerdict verdict = SeriesVerdict::undetermined;
    double threshold_log2 = 0.0;            ///< log2 of the eta^2 threshold for this s
    bool threshold_met = false;             ///< log2_eta_sq > threshold_log2
};

namespace detail {

inline double log2_add(double a, double b) {
    if (a < b) std::swap(a, b);
    if (std::isinf(b) && b < 0) return a;
    return a + std::log2(1.0 + std::exp2(b - a));
}

}  // namespace detail

/// Partial sums of sum_n 2^{n(2s-1)} (eta^2 2^{-42})^{2^n}, all in log2.
///
/// With q = log2_eta_sq - 42 the consecutive log-ratio is
/// d_n = (2s - 1) + 2^n q, monotone in n. The verdict is read off the last
/// computed ratio: q > 0 and d >= 0 means the terms grow from there on
/// (diverging); q < 0 and d < 0 means every later ratio is below 2^d < 1
/// (converging); q = 0 gives a geometric series with ratio 2^{2s-1}.
/// Anything else is undetermined on the computed range.
inline SeriesReport series_partial_sums(double s, double log2_eta_sq, int n_terms) {
    if (n_terms < 4) throw std::invalid_argument("series needs at least 4 terms");
    if (n_terms > 62) throw std::invalid_argument("series supports at most 62 terms");
    if (!(s > -1.0)) throw std::invalid_argument("series needs s > -1");
    if (!std::isfinite(log2_eta_sq)) throw std::invalid_argument("log2_eta_sq must be finite");
    const auto C = constants();

    SeriesReport r;
    r.s = s;
    r.log2_eta_sq = log2_eta_sq;
    const double q = log2_eta_sq - static_cast<double>(C.c0_log2);
    double acc = -INFINITY;
    for (int n = 0; n < n_terms; ++n) {
        const double term = n * (2 * s - 1) + std::ldexp(q, n);
        r.log2_terms.push_back(term);
        acc = detail::log2_add(acc, term);
        r.log2_partial_sums.push_back(acc);
    }
    const double d = r.log2_terms[n_terms - 1] - r.log2_terms[n_terms - 2];
    if (q > 0.0)
        r.verdict = d >= 0.0 ? SeriesVerdict::diverging : SeriesVerdict::undetermined;
    else if (q < 0.0)
        r.verdict = d < 0.0 ? SeriesVerdict::converging : SeriesVerdict::undetermined;
    else
        r.verdict = 2 * s - 1 >= 0.0 ? SeriesVerdict::diverging : SeriesVerdict::converging;

    r.threshold_log2 = C.eta_sq_threshold_log2(s);
    r.threshold_met = log2_eta_sq > r.threshold_log2;
    return r;
}

}  // namespace kvb
