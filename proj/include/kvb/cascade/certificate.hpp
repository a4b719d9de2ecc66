#pragma once

#include "kvb/cascade/cascade.hpp"
#include "kvb/cascade/constants.hpp"
#include "kvb/cascade/minorant.hpp"
#include "kvb/cascade/series.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace kvb {

struct CertifyConfig {
    int n_max = 4;               ///< exact cascade levels 0..n_max
    int induction_n_max = 0;     ///< induction steps 1..max(n_max, induction_n_max)
    double s = 1.0;
    double log2_eta_sq = 43.0;
    double gamma1 = 98304.0;
    double gamma2 = -1.0;
    int samples = 33;            ///< Chebyshev xi samples per level
    int t_points = 8;
    int series_terms = 24;

    bool operator==(const CertifyConfig&) const = default;
};

inline void validate(const CertifyConfig& c) {
    if (c.n_max < 0 || c.n_max > default_cascade_budget)
        throw std::invalid_argument("n_max must lie in [0, " + std::to_string(default_cascade_budget) + "]");
    if (c.induction_n_max < 0 || c.induction_n_max > 40) throw std::invalid_argument("induction_n_max must lie in [0, 40]");
    if (!(c.gamma2 < 0.0 && 0.0 < c.gamma1))
        throw std::invalid_argument("sign condition gamma2 < 0 < gamma1 violated (gamma1 = " + std::to_string(c.gamma1) +
                                    ", gamma2 = " + std::to_string(c.gamma2) + ")");
    if (!(c.s > -1.0)) throw std::invalid_argument("s must exceed -1");
    if (c.samples < 1) throw std::invalid_argument("samples must be positive");
    if (c.t_points < 2) throw std::invalid_argument("t_points must be at least 2");
    if (c.series_terms < 4 || c.series_terms > 62) throw std::invalid_argument("series_terms must lie in [4, 62]");
    if (!std::isfinite(c.log2_eta_sq)) throw std::invalid_argument("log2_eta_sq must be finite");
}

struct CertificateLine {
    std::string name;
    std::string values;
    double slack = 0.0;  ///< log2 margin; 0 for exact identities
    bool pass = false;
};

/// Per-level summary of the cascade certificate.
struct LevelRecord {
    int n = 0;
    mpq_class supp_lo, supp_hi, l1, l2sq;
    double log2_f_tstar = 0.0;
    std::optional<double> induction_min_slack;
    std::optional<bool> induction_pass;
};

struct CertificateReport {
    CertifyConfig config;
    std::vector<LevelRecord> levels;
    std::vector<CertificateLine> checks;
    std::vector<std::string> notes;
    SeriesReport series;
    bool all_pass = false;
    bool blowup_established = false;

    int exit_code() const { return all_pass ? 0 : 1; }
};

namespace detail {

inline std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v == 0.0 ? 0.0 : v);
    return buf;
}

inline std::string fmt_slack(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    return fmt("%.6f", v);
}

/// Exact rational when short, otherwise a 17-digit decimal prefixed with '~'.
inline std::string fmt_exact(const mpq_class& q) {
    auto s = q.get_str();
    if (s.size() <= 40) return s;
    return "~" + fmt("%.17g", q.get_d());
}

inline double log2q(const mpq_class& q) {
    // ratio of big rationals; mpz_get_d_2exp keeps the exponent exact
    long en = 0, ed = 0;
    const double mn = mpz_get_d_2exp(&en, q.get_num_mpz_t());
    const double md = mpz_get_d_2exp(&ed, q.get_den_mpz_t());
    return std::log2(mn / md) + static_cast<double>(en - ed);
}

}  // namespace detail

inline std::string format_check(const CertificateLine& c) {
    std::string s = "CHECK " + c.name;
    if (!c.values.empty()) s += " " + c.values;
    s += " slack=" + detail::fmt_slack(c.slack) + " verdict=" + (c.pass ? "PASS" : "FAIL");
    return s;
}

inline std::vector<std::string> report_lines(const CertificateReport& r) {
    std::vector<std::string> out;
    for (const auto& c : r.checks) out.push_back(format_check(c));
    for (const auto& n : r.notes) out.push_back("NOTE " + n);
    out.push_back(std::string("CERTIFICATE blowup=") + (r.blowup_established ? "established" : "not-established") +
                  " checks=" + (r.all_pass ? "all-pass" : "failed"));
    return out;
}

using CertifyProgress = std::function<void(const std::string&)>;

/// Run every finite check the blow-up argument is assembled from.
/// Never throws on a failed mathematical check; failures become FAIL lines.
inline CertificateReport build_certificate(const CertifyConfig& cfg, const CertifyProgress& progress = {}) {
    validate(cfg);
    const auto C = constants();
    auto say = [&](const std::string& m) {
        if (progress) progress(m);
    };
    CertificateReport r;
    r.config = cfg;
    auto add = [&](std::string name, std::string values, double slack, bool pass) {
        r.checks.push_back({std::move(name), std::move(values), slack, pass});
    };

    // constants
    {
        const double rel = std::abs(C.t_star * 1.5 / std::numbers::ln2 - 1.0);
        const bool c0_ok = C.c0 == (mpz_class(1) << 42) && C.c0_log2 == 42;
        const bool c1_ok = chain_constant(C.c1_min) == 1;
        add("constants",
            "t_star=" + detail::fmt("%.15f", C.t_star) + " c0=2^" + std::to_string(C.c0_log2) +
                " c1_min=" + C.c1_min.get_str(),
            0.0, rel <= 1e-15 && c0_ok && c1_ok);
    }

    // exact cascade
    std::vector<CascadeLevel> levels;
    for (int n = 0; n <= cfg.n_max; ++n) {
        say("cascade level " + std::to_string(n));
        try {
            levels.push_back(make_level(n, n == 0 ? g0() : self_convolve(levels.back().g)));
        } catch (const CascadeVerificationError& e) {
            add("cascade_level", "n=" + std::to_string(n) + " error=\"" + e.what() + "\"", 0.0, false);
            break;
        }
        const auto& L = levels.back();
        const CascadeLevel* prev = n > 0 ? &levels[levels.size() - 2] : nullptr;
        const std::string tag = "n=" + std::to_string(n);
        for (const auto& c : verify_level(L, prev)) {
            double slack = 0.0;
            std::string values = tag;
            if (c.name == "annulus_support") {
                values += " lo=" + L.supp_lo.get_str() + " hi=" + L.supp_hi.get_str();
            } else if (c.name == "unit_mass") {
                values += " l1=" + detail::fmt_exact(L.l1);
            } else if (c.name == "l2_lower_bound") {
                values += " l2sq=" + detail::fmt_exact(L.l2sq) + " bound=" + pow2q(-n).get_str();
                slack = detail::log2q(L.l2sq * pow2q(n));
            } else if (c.name == "cauchy_schwarz") {
                const mpq_class lhs = L.l2sq * (L.supp_hi - L.supp_lo);
                values += " l2sq*len=" + detail::fmt_exact(lhs) + " l1^2=" + detail::fmt_exact(L.l1 * L.l1);
                slack = L.l1 == 0 ? 0.0 : detail::log2q(lhs / (L.l1 * L.l1));
            } else if (c.name == "nonnegative") {
                values += " pieces=" + std::to_string(L.nonnegative.pieces) +
                          " subdivision_depth=" + std::to_string(L.nonnegative.max_depth);
            } else if (!c.detail.empty()) {
                values += " " + c.detail;
            }
            add(c.name, values, slack, c.pass);
        }
        LevelRecord rec;
        rec.n = n;
        rec.supp_lo = L.supp_lo;
        rec.supp_hi = L.supp_hi;
        rec.l1 = L.l1;
        rec.l2sq = L.l2sq;
        rec.log2_f_tstar = log2_f(n, C.t_star);
        r.levels.push_back(std::move(rec));
    }
    r.notes.push_back("l2 lower bound 2^-n follows from unit mass on an interval of length 2^n by Cauchy-Schwarz, C = 1");

    // f_n recursion at t in {0, T*, 1}
    {
        const double f0 = log2_f(0, C.t_star);
        add("f0_at_tstar", "log2_f0=" + detail::fmt("%.12f", f0) + " expected=-16", 0.0, std::abs(f0 + 16.0) <= 16e-12);
    }
    const int f_max = std::max(cfg.n_max, 12);
    for (int n = 1; n <= f_max; ++n) {
        bool ok = true;
        double worst = 0.0;
        for (double t : {0.0, C.t_star, 1.0}) {
            const auto a = log2_f_parts(n, t), b = log2_f_parts(n - 1, t);
            ok = ok && (a.pow2 - 2 * b.pow2 == 5 - 5 * std::int64_t{n});
            const double scale = std::max(std::abs(a.expo), 1e-300);
            const double rel = std::abs(a.expo - 2 * b.expo) / scale;
            worst = std::max(worst, a.expo == 0.0 && b.expo == 0.0 ? 0.0 : rel);
        }
        ok = ok && worst <= 1e-12;
        add("f_recursion", "n=" + std::to_string(n) + " pow2_step=" + std::to_string(5 - 5 * n) +
                               " expo_rel_err=" + detail::fmt("%.3e", worst),
            0.0, ok);
    }

    // closing constant of the induction chain
    const mpq_class gap = mpq_class(cfg.gamma1) - mpq_class(cfg.gamma2);
    {
        const mpq_class c1 = 2 * gap;
        const mpq_class k = chain_constant(c1);
        add("chain_constant", "C1=" + detail::fmt_exact(c1) + " C1*(2/3)*2^-16=" + detail::fmt_exact(k) + " beta=3",
            detail::log2q(k), k >= 1);
    }

    // induction step
    const int ind_max = std::max(cfg.n_max, cfg.induction_n_max);
    const auto times = induction_time_grid(cfg.t_points);
    if (gap < C.c1_min / 2) {
        add("induction_step", "gamma1-gamma2=" + detail::fmt_exact(gap) + " below c1_min/2", 0.0, false);
    } else {
        for (int n = 1; n <= ind_max; ++n) {
            say("induction step " + std::to_string(n));
            const PiecewisePolynomial* g = n < static_cast<int>(levels.size()) ? &levels[n].g : nullptr;
            double min_slack = std::numeric_limits<double>::infinity(), min_tail = min_slack;
            bool ok = true;
            std::size_t count = 0;
            std::string witness;
            for (double t : times) {
                const auto rep = induction_step_check(n, t, cfg.gamma1, cfg.gamma2, cfg.samples, g);
                min_slack = std::min(min_slack, rep.min_slack);
                min_tail = std::min(min_tail, rep.tail_slack);
                count += rep.samples.size();
                if (!rep.passed) {
                    ok = false;
                    if (witness.empty()) witness = rep.describe_witness();
                }
            }
            std::string values = "n=" + std::to_string(n) + " t=[" + detail::fmt("%.6f", times.front()) + "," +
                                 detail::fmt("%.6f", times.back()) + "] samples=" + std::to_string(count) +
                                 " g_exact=" + (g ? "yes" : "no");
            if (!witness.empty()) values += " witness=\"" + witness + "\"";
            add("induction_step", values, min_slack, ok);
            add("tail_factor", "n=" + std::to_string(n) + " bound=1/2", min_tail, min_tail >= 0.0);
            if (n < static_cast<int>(r.levels.size())) {
                r.levels[n].induction_min_slack = min_slack;
                r.levels[n].induction_pass = ok;
            }
        }
    }

    // series
    say("series");
    r.series = series_partial_sums(cfg.s, cfg.log2_eta_sq, cfg.series_terms);
    auto series_line = [&](const std::string& name, const SeriesReport& sr) {
        add(name,
            "s=" + detail::fmt("%g", sr.s) + " log2_eta_sq=" + detail::fmt("%g", sr.log2_eta_sq) +
                " terms=" + std::to_string(sr.log2_terms.size()) + " series=" + to_string(sr.verdict) +
                " log2_last_partial_sum=" + detail::fmt("%.6e", sr.log2_partial_sums.back()) +
                " threshold_log2=" + detail::fmt("%g", sr.threshold_log2) +
                " threshold_met=" + (sr.threshold_met ? "yes" : "no"),
            sr.log2_eta_sq - sr.threshold_log2, sr.verdict != SeriesVerdict::undetermined);
    };
    series_line("series", r.series);
    for (double s : {0.0, 1.0})
        for (double l : {C.c0_log2 - 1.0, C.c0_log2 + 1.0})
            series_line("series_bracket", series_partial_sums(s, l, cfg.series_terms));
    r.notes.push_back("the lower bound is checked for all t >= T*; whether the maximal existence time precedes T* is "
                      "outside the scope of these checks");

    r.all_pass = std::all_of(r.checks.begin(), r.checks.end(), [](const CertificateLine& c) { return c.pass; });
    r.blowup_established =
        r.all_pass && r.series.verdict == SeriesVerdict::diverging && r.series.threshold_met;
    return r;
}

}  // namespace kvb
