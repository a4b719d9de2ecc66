#pragma once

#include "kvb/cascade/minorant.hpp"
#include "kvb/cascade/piecewise_polynomial.hpp"

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <vector>

namespace kvb {

inline constexpr int default_cascade_budget = 8;

/// One level g_n of the convolution cascade with its exact invariants.
struct CascadeLevel {
    int n = 0;
    PiecewisePolynomial g;
    mpq_class supp_lo, supp_hi;
    mpq_class l1;
    mpq_class l2sq;
    bool continuous = false;
    NonnegativityCertificate nonnegative;

    double log2_f_at(double t) const { return log2_f(n, t); }
};

/// A level violated one of the exact lemma checks.
class CascadeVerificationError : public std::runtime_error {
public:
    CascadeVerificationError(std::string lemma, int n, const std::string& what)
        : std::runtime_error(lemma + " violated at n = " + std::to_string(n) + ": " + what),
          lemma_(std::move(lemma)), n_(n) {}

    const std::string& lemma() const { return lemma_; }
    int level() const { return n_; }

private:
    std::string lemma_;
    int n_;
};

/// Indicator of (1, 2).
inline PiecewisePolynomial g0() { return PiecewisePolynomial::indicator(1, 2); }

inline mpq_class pow2q(int e) {
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(e < 0 ? -e : e));
    return e < 0 ? mpq_class(mpz_class(1), p) : mpq_class(p);
}

struct LevelCheck {
    std::string name;   ///< stable identifier, e.g. "annulus_support"
    std::string lemma;  ///< "support lemma", "mass lemma", ...
    bool pass = false;
    std::string detail;
};

inline CascadeLevel make_level(int n, PiecewisePolynomial g, int subdivision_depth = 8) {
    CascadeLevel L;
    L.n = n;
    L.g = std::move(g);
    if (!L.g.tail_vanishes()) throw CascadeVerificationError("support lemma", n, "support is unbounded");
    const auto s = L.g.support();
    if (!s) throw CascadeVerificationError("support lemma", n, "level is identically zero");
    L.supp_lo = s->first;
    L.supp_hi = s->second;
    L.l1 = L.g.integral();
    L.l2sq = l2_norm_sq(L.g);
    L.continuous = L.g.is_continuous();
    L.nonnegative = certify_nonnegative(L.g, subdivision_depth);
    return L;
}

/// Exact checks of one level; prev is level n - 1 when n >= 1.
inline std::vector<LevelCheck> verify_level(const CascadeLevel& L, const CascadeLevel* prev) {
    std::vector<LevelCheck> out;
    const int n = L.n;
    const mpq_class lo = pow2q(n), hi = pow2q(n + 1);
    out.push_back({"annulus_support", "support lemma", L.supp_lo == lo && L.supp_hi == hi,
                   "supp=[" + L.supp_lo.get_str() + "," + L.supp_hi.get_str() + "]"});
    if (prev)
        out.push_back({"support_additivity", "support lemma",
                       L.supp_lo == 2 * prev->supp_lo && L.supp_hi == 2 * prev->supp_hi, ""});
    out.push_back({"unit_mass", "mass lemma", L.l1 == 1, "l1=" + L.l1.get_str()});
    if (prev) out.push_back({"l1_multiplicative", "mass lemma", L.l1 == prev->l1 * prev->l1, ""});
    out.push_back({"l2_lower_bound", "mass lemma", L.l2sq >= pow2q(-n), ""});
    out.push_back({"cauchy_schwarz", "mass lemma", L.l2sq * (L.supp_hi - L.supp_lo) >= L.l1 * L.l1, ""});
    out.push_back({"nonnegative", "support lemma", L.nonnegative.certified,
                   L.nonnegative.witness ? "negative at " + L.nonnegative.witness->get_str() : ""});
    if (n >= 1) out.push_back({"continuous", "support lemma", L.continuous, ""});
    if (prev) {
        const int bound = 2 * prev->g.degree() + 1;
        out.push_back({"degree", "support lemma", L.g.degree() <= bound,
                       "degree=" + std::to_string(L.g.degree()) + " bound=" + std::to_string(bound)});
    }
    return out;
}

/// Levels 0..n_max of g_n = g_{n-1} * g_{n-1}, each verified exactly.
/// The first failed check throws CascadeVerificationError naming the lemma.
inline std::vector<CascadeLevel> cascade_sequence(int n_max, int budget = default_cascade_budget) {
    if (n_max < 0) throw std::invalid_argument("n_max must be nonnegative");
    if (n_max > budget)
        throw std::invalid_argument("n_max = " + std::to_string(n_max) + " exceeds the exact-arithmetic budget " +
                                    std::to_string(budget));
    std::vector<CascadeLevel> levels;
    levels.reserve(static_cast<std::size_t>(n_max) + 1);
    for (int n = 0; n <= n_max; ++n) {
        levels.push_back(make_level(n, n == 0 ? g0() : self_convolve(levels.back().g)));
        const CascadeLevel* prev = n > 0 ? &levels[levels.size() - 2] : nullptr;
        for (const auto& c : verify_level(levels.back(), prev))
            if (!c.pass) throw CascadeVerificationError(c.lemma, n, c.name + (c.detail.empty() ? "" : " " + c.detail));
    }
    return levels;
}

}  // namespace kvb
