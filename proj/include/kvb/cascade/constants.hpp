#pragma once

#include <gmpxx.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kvb {

/// Fixed constants of the blow-up certificate. T* is kept as the exact
/// multiple t_star_over_ln2 of ln 2 so exponentials e^{-c T*} with rational c
/// reduce to exact powers of two.
struct CertificateConstants {
    double t_star = 0.0;
    mpq_class t_star_over_ln2;  ///< 2/3
    mpz_class c0;               ///< 2^42
    long c0_log2 = 0;
    mpq_class c1_min;           ///< 3 * 2^15
    int beta = 3;

    /// log2 of the eta^2 threshold: 2^{1-2s} c0 for -1 < s < 1/2, c0 for s >= 1/2.
    double eta_sq_threshold_log2(double s) const {
        if (!(s > -1.0)) throw std::invalid_argument("threshold needs s > -1");
        return s < 0.5 ? (1.0 - 2.0 * s) + static_cast<double>(c0_log2) : static_cast<double>(c0_log2);
    }
};

namespace detail {

/// log2 of the series base factor e^{-(3/2) T* 2^5} 2^{-10}, exact.
inline mpq_class series_base_log2(const mpq_class& t_star_over_ln2) {
    return -mpq_class(3, 2) * t_star_over_ln2 * 32 - 10;
}

}  // namespace detail

inline CertificateConstants constants() {
    CertificateConstants c;
    c.t_star_over_ln2 = mpq_class(2, 3);
    c.t_star = 2.0 * std::numbers::ln2 / 3.0;
    const mpq_class e = -detail::series_base_log2(c.t_star_over_ln2);
    if (e.get_den() != 1) throw std::logic_error("c0 exponent is not an integer");
    c.c0_log2 = e.get_num().get_si();
    mpz_ui_pow_ui(c.c0.get_mpz_t(), 2, static_cast<unsigned long>(c.c0_log2));
    // smallest C1 with C1 (2/3) 2^{-16} >= 1
    c.c1_min = mpq_class(3, 2) * mpq_class(65536);
    return c;
}

/// C1 (3/2)^{-1} 2^{-16}; the chain closes when this is >= 1.
inline mpq_class chain_constant(const mpq_class& c1) { return c1 * mpq_class(2, 3) / 65536; }

}  // namespace kvb
