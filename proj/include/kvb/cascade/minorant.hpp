#pragma once

#include "kvb/cascade/constants.hpp"
#include "kvb/cascade/piecewise_polynomial.hpp"

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace kvb {

/// log2 f_n(t) split into an exact power-of-two exponent and the
/// floating exponential part.
struct Log2F {
    std::int64_t pow2 = 0;  ///< -5 (2^n - 1) + 5 n
    double expo = 0.0;      ///< -(3/2) t 2^{n+4} / ln 2
    double value() const { return static_cast<double>(pow2) + expo; }
};

inline Log2F log2_f_parts(int n, double t) {
    if (n < 0 || n > 56) throw std::invalid_argument("log2_f needs 0 <= n <= 56");
    if (!(t >= 0.0)) throw std::invalid_argument("log2_f needs t >= 0");
    const std::int64_t p = std::int64_t{1} << n;
    // 1.5 * 2^{n+4} = 3 * 2^{n+3} is exact in double
    return {-5 * (p - 1) + 5 * std::int64_t{n}, -std::ldexp(3.0, n + 3) * t / std::numbers::ln2};
}

/// log2 of f_n(t) = e^{-(3/2) t 2^{n+4}} 2^{-5 (2^n - 1)} 2^{5 n}.
inline double log2_f(int n, double t) { return log2_f_parts(n, t).value(); }

namespace detail {

/// log2(t phi(z)), phi(z) = (1 - e^{-z}) / z, for t > 0.
inline double log2_t_phi(double t, double z) {
    const double lt = std::log2(t);
    if (std::abs(z) < 1e-8) return lt + std::log2(1.0 - 0.5 * z);
    if (z > 0.0) return lt + std::log2(-std::expm1(-z)) - std::log2(z);
    return lt + (-z) / std::numbers::ln2 + std::log2(-std::expm1(z)) - std::log2(-z);
}

/// 1 ulp per operation of a slack assembled from `terms` logarithms.
inline double slack_pad(double magnitude, int terms) {
    return terms * std::numeric_limits<double>::epsilon() * std::max(1.0, magnitude);
}

}  // namespace detail

struct InductionSample {
    double t = 0.0;
    mpq_class xi;
    double slack = 0.0;       ///< log2(RHS / LHS)
    bool g_positive = true;   ///< g_n(xi) > 0 evaluated exactly (when g is supplied)
};

struct InductionReport {
    int n = 0;
    double t = 0.0;
    int beta = 3;
    std::vector<InductionSample> samples;
    double min_slack = std::numeric_limits<double>::infinity();
    double tail_slack = 0.0;      ///< log2 of (1 - e^{-(3/2) t 2^{4(n+1)}}) / (1/2)
    mpq_class c1;                 ///< 2 (gamma1 - gamma2)
    mpq_class chain_constant;     ///< C1 (3/2)^{-1} 2^{-16}
    bool chain_exponents = false; ///< -13 - beta = -16 and 8 - beta = 5
    bool passed = false;
    std::optional<InductionSample> witness;

    std::string describe_witness() const {
        if (!witness) return {};
        std::ostringstream os;
        os << "n=" << n << " t=" << witness->t << " xi=" << witness->xi.get_d() << " slack=" << witness->slack;
        return os.str();
    }
};

/// Sample points inside (2^n, 2^{n+1}): Chebyshev nodes of the first kind
/// plus one point 2^{n-20} away from each end. All exact dyadic rationals.
inline std::vector<mpq_class> induction_xi_samples(int n, int samples) {
    if (samples < 1) throw std::invalid_argument("need at least one xi sample");
    const double lo = std::ldexp(1.0, n), hi = std::ldexp(1.0, n + 1);
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    std::vector<mpq_class> xs;
    xs.push_back(mpq_class(lo + std::ldexp(1.0, n - 20)));
    for (int k = 0; k < samples; ++k)
        xs.push_back(mpq_class(mid + half * std::cos((2 * k + 1) * std::numbers::pi / (2.0 * samples))));
    xs.push_back(mpq_class(hi - std::ldexp(1.0, n - 20)));
    return xs;
}

/// Check at time t and sampled xi in (2^n, 2^{n+1}) that
///   f_n(t) g_n(xi) <= (gamma1 - gamma2) 2^{2(n-1)} [int_0^t e^{-(3/2)(t - tau) xi^4} f_{n-1}(tau)^2 dtau] g_n(xi).
/// f_{n-1}^2 carries the same exponential rate B = 3 * 2^{n+3} as f_n, so
/// the ratio of the two sides is (gamma1 - gamma2) 2^{7(n-1)} t phi(((3/2) xi^4 - B) t).
/// Also checks the tail factor bound and the closing constant with beta = 3.
/// g, when given, is g_n and is evaluated exactly at every sample.
inline InductionReport induction_step_check(int n, double t, double gamma1, double gamma2, int samples,
                                            const PiecewisePolynomial* g = nullptr) {
    const auto C = constants();
    if (n < 1) throw std::invalid_argument("induction step needs n >= 1");
    if (!(t >= C.t_star)) throw std::invalid_argument("induction step needs t >= T*");
    if (!(gamma2 < 0.0 && 0.0 < gamma1)) throw std::invalid_argument("induction step needs gamma2 < 0 < gamma1");
    const mpq_class gap = mpq_class(gamma1) - mpq_class(gamma2);
    if (gap < C.c1_min / 2)
        throw std::invalid_argument("induction step needs gamma1 - gamma2 >= c1_min / 2 = " +
                                    mpq_class(C.c1_min / 2).get_str());
    if (n > 40) throw std::invalid_argument("induction step sampling supports n <= 40");

    InductionReport r;
    r.n = n;
    r.t = t;
    r.c1 = 2 * gap;
    r.chain_constant = chain_constant(r.c1);
    r.chain_exponents = (-13 - r.beta == -16) && (8 - r.beta == 5);

    const double B = std::ldexp(3.0, n + 3);
    const double base = std::log2(gap.get_d()) + 7.0 * (n - 1);
    for (const auto& xq : induction_xi_samples(n, samples)) {
        InductionSample s;
        s.t = t;
        s.xi = xq;
        const double xi = xq.get_d();
        const double z = (1.5 * xi * xi * xi * xi - B) * t;
        s.slack = base + detail::log2_t_phi(t, z);
        if (g) s.g_positive = g->evaluate(xq) > 0;
        const bool ok = s.g_positive && s.slack >= detail::slack_pad(std::abs(base) + std::abs(s.slack), 4);
        r.min_slack = std::min(r.min_slack, s.slack);
        if (!ok && !r.witness) r.witness = s;
        r.samples.push_back(std::move(s));
    }
    // (1 - e^{-x}) >= 1/2 with x = (3/2) t 2^{4(n+1)}
    const double x = 1.5 * t * std::ldexp(1.0, 4 * (n + 1));
    r.tail_slack = std::log2(-std::expm1(-x)) + 1.0;
    r.passed = !r.witness && r.tail_slack >= 0.0 && r.chain_constant >= 1 && r.chain_exponents;
    return r;
}

/// Uniform grid of `points` times on [T*, 2 T*].
inline std::vector<double> induction_time_grid(int points) {
    if (points < 2) throw std::invalid_argument("time grid needs at least two points");
    const double ts = constants().t_star;
    std::vector<double> t(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) t[i] = ts + ts * i / (points - 1);
    t.front() = ts;
    t.back() = 2 * ts;
    return t;
}

}  // namespace kvb
