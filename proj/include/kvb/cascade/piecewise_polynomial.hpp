#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace kvb {

namespace detail {

inline const std::vector<mpz_class>& factorial_table(std::size_t n) {
    thread_local std::vector<mpz_class> table{mpz_class(1)};
    while (table.size() <= n) table.push_back(table.back() * static_cast<unsigned long>(table.size()));
    return table;
}

inline mpz_class binomial(unsigned long n, unsigned long k) {
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

template <class T>
T power(const T& base, unsigned long e) {
    T r = 1, b = base;
    while (e) {
        if (e & 1u) r *= b;
        e >>= 1u;
        if (e) b *= b;
    }
    return r;
}

/// In place p(y) -> p(y + h), coefficients in ascending powers.
template <class T>
void taylor_shift(std::vector<T>& a, const T& h) {
    if (a.size() < 2 || h == 0) return;
    const std::size_t d = a.size() - 1;
    const bool unit = h == 1;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = d; j-- > i;) {
            if (unit)
                a[j] += a[j + 1];
            else
                a[j] += h * a[j + 1];
        }
}

}  // namespace detail

/// Compactly supported piecewise polynomial with exact rational data, stored
/// as a sum of truncated powers
///   f(x) = sum_knots sum_j c_{knot,j} (x - knot)_+^j,
/// so c_{knot,j} / j! is the jump of the j-th derivative at the knot. The
/// function is right-continuous and 0 left of the first knot.
class PiecewisePolynomial {
public:
    struct Term {
        int power;
        mpq_class coef;
    };
    struct Knot {
        mpq_class at;
        std::vector<Term> jumps;  ///< ascending powers, nonzero coefficients
    };

    PiecewisePolynomial() = default;

    /// Indicator of [a, b).
    static PiecewisePolynomial indicator(const mpq_class& a, const mpq_class& b) {
        if (!(a < b)) throw std::invalid_argument("indicator needs a < b");
        return from_jumps({{a, {{0, 1}}}, {b, {{0, -1}}}});
    }

    /// Build from jumps in any order; merges equal knots and drops zero terms.
    static PiecewisePolynomial from_jumps(const std::vector<Knot>& knots) {
        std::map<mpq_class, std::map<int, mpq_class>> acc;
        for (const auto& k : knots) {
            mpq_class at = k.at;
            at.canonicalize();
            for (const auto& t : k.jumps) {
                if (t.power < 0) throw std::invalid_argument("negative truncated power");
                mpq_class c = t.coef;
                c.canonicalize();
                acc[at][t.power] += c;
            }
        }
        return PiecewisePolynomial(acc);
    }

    /// Build from per-interval polynomials: pieces[i] holds the coefficients
    /// of ascending powers of (x - breakpoints[i]) on [breakpoints[i], breakpoints[i+1]).
    static PiecewisePolynomial from_pieces(const std::vector<mpq_class>& breakpoints,
                                           const std::vector<std::vector<mpq_class>>& pieces) {
        if (breakpoints.size() < 2 || pieces.size() + 1 != breakpoints.size())
            throw std::invalid_argument("from_pieces needs one piece per interval");
        for (std::size_t i = 1; i < breakpoints.size(); ++i)
            if (!(breakpoints[i - 1] < breakpoints[i]))
                throw std::invalid_argument("breakpoints must be strictly increasing");
        std::vector<Knot> knots;
        std::vector<mpq_class> prev;
        auto canonical = [](std::vector<mpq_class> v) {
            for (auto& c : v) c.canonicalize();
            return v;
        };
        for (std::size_t i = 0; i < breakpoints.size(); ++i) {
            if (i > 0) {
                mpq_class h = breakpoints[i] - breakpoints[i - 1];
                h.canonicalize();
                detail::taylor_shift(prev, h);
            }
            const std::vector<mpq_class> empty;
            const auto cur = canonical(i < pieces.size() ? pieces[i] : empty);
            Knot k{breakpoints[i], {}};
            for (std::size_t j = 0; j < std::max(prev.size(), cur.size()); ++j) {
                mpq_class c = (j < cur.size() ? cur[j] : mpq_class(0)) - (j < prev.size() ? prev[j] : mpq_class(0));
                if (c != 0) k.jumps.push_back({static_cast<int>(j), c});
            }
            knots.push_back(std::move(k));
            prev = cur;
        }
        return from_jumps(knots);
    }

    const std::vector<Knot>& knots() const { return knots_; }
    bool is_zero() const { return knots_.empty(); }

    int degree() const {
        int d = -1;
        for (const auto& k : knots_) d = std::max(d, k.jumps.back().power);
        return d;
    }

    std::size_t term_count() const {
        std::size_t n = 0;
        for (const auto& k : knots_) n += k.jumps.size();
        return n;
    }

    std::vector<mpq_class> breakpoints() const {
        std::vector<mpq_class> b;
        b.reserve(knots_.size());
        for (const auto& k : knots_) b.push_back(k.at);
        return b;
    }

    mpq_class evaluate(const mpq_class& x) const {
        mpq_class sum = 0;
        for (const auto& k : knots_) {
            if (x < k.at) break;
            const mpq_class y = x - k.at;
            for (const auto& t : k.jumps) sum += t.coef * detail::power(y, static_cast<unsigned long>(t.power));
        }
        return sum;
    }

    /// Sum of all terms expanded around the last knot: the polynomial that
    /// f equals right of its last knot.
    std::vector<mpq_class> tail_polynomial() const {
        if (knots_.empty()) return {};
        const mpq_class& last = knots_.back().at;
        std::vector<mpq_class> tail(static_cast<std::size_t>(degree()) + 1);
        for (const auto& k : knots_) {
            const mpq_class gap = last - k.at;
            for (const auto& t : k.jumps) {
                const auto j = static_cast<unsigned long>(t.power);
                mpq_class g = 1;  // gap^{j - i}, i descending
                for (unsigned long i = j + 1; i-- > 0;) {
                    tail[i] += t.coef * detail::binomial(j, i) * g;
                    g *= gap;
                }
            }
        }
        return tail;
    }

    /// Recomputes the tail; has_bounded_support() caches it.
    bool tail_vanishes() const {
        const auto t = tail_polynomial();
        return std::all_of(t.begin(), t.end(), [](const mpq_class& c) { return c == 0; });
    }

    bool has_bounded_support() const {
        if (!bounded_) bounded_ = tail_vanishes();
        return *bounded_;
    }

    /// Closure of {f != 0}; nullopt for the zero function.
    std::optional<std::pair<mpq_class, mpq_class>> support() const {
        if (knots_.empty()) return std::nullopt;
        if (!has_bounded_support()) throw std::domain_error("support is unbounded");
        return std::pair{knots_.front().at, knots_.back().at};
    }

    /// Continuous everywhere iff no knot carries a power-0 term.
    bool is_continuous() const {
        return std::none_of(knots_.begin(), knots_.end(), [](const Knot& k) { return k.jumps.front().power == 0; });
    }

    /// Integral over the real line; requires bounded support.
    mpq_class integral() const {
        const auto s = support();
        if (!s) return 0;
        const mpq_class& r = s->second;
        mpq_class sum = 0;
        for (const auto& k : knots_)
            for (const auto& t : k.jumps) {
                const auto e = static_cast<unsigned long>(t.power + 1);
                sum += t.coef * detail::power(mpq_class(r - k.at), e) / e;
            }
        return sum;
    }

    /// x -> f(-x). Uses (-x - c)_+^j = (-1)^j (x + c)_-^j = (-1)^j [(x + c)^j - (x + c)_+^j]
    /// and that the polynomial parts cancel for compact support.
    PiecewisePolynomial reflected() const {
        if (!has_bounded_support()) throw std::domain_error("reflection needs bounded support");
        std::map<mpq_class, std::map<int, mpq_class>> acc;
        for (const auto& k : knots_)
            for (const auto& t : k.jumps) {
                const mpq_class c = (t.power % 2 == 0) ? mpq_class(-t.coef) : t.coef;
                acc[-k.at][t.power] += c;
            }
        PiecewisePolynomial r(acc);
        r.bounded_ = true;
        return r;
    }

    /// Per-interval coefficients in ascending powers of (x - breakpoints[i]).
    std::vector<std::vector<mpq_class>> pieces() const {
        std::vector<std::vector<mpq_class>> out;
        if (knots_.size() < 2) return out;
        std::vector<mpq_class> cur(static_cast<std::size_t>(degree()) + 1);
        for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
            if (i > 0) detail::taylor_shift(cur, mpq_class(knots_[i].at - knots_[i - 1].at));
            for (const auto& t : knots_[i].jumps) cur[static_cast<std::size_t>(t.power)] += t.coef;
            out.push_back(cur);
        }
        return out;
    }

    bool operator==(const PiecewisePolynomial& o) const {
        if (knots_.size() != o.knots_.size()) return false;
        for (std::size_t i = 0; i < knots_.size(); ++i) {
            const auto& a = knots_[i];
            const auto& b = o.knots_[i];
            if (a.at != b.at || a.jumps.size() != b.jumps.size()) return false;
            for (std::size_t j = 0; j < a.jumps.size(); ++j)
                if (a.jumps[j].power != b.jumps[j].power || a.jumps[j].coef != b.jumps[j].coef) return false;
        }
        return true;
    }

private:
    explicit PiecewisePolynomial(const std::map<mpq_class, std::map<int, mpq_class>>& acc) {
        for (const auto& [at, terms] : acc) {
            Knot k{at, {}};
            for (const auto& [p, c] : terms)
                if (c != 0) k.jumps.push_back({p, c});
            if (!k.jumps.empty()) knots_.push_back(std::move(k));
        }
    }

    std::vector<Knot> knots_;
    mutable std::optional<bool> bounded_;

    friend PiecewisePolynomial convolve(const PiecewisePolynomial&, const PiecewisePolynomial&);
};

/// Exact convolution, termwise by
///   (x - a)_+^j * (x - b)_+^k = j! k! / (j + k + 1)! (x - a - b)_+^{j + k + 1}.
inline PiecewisePolynomial convolve(const PiecewisePolynomial& f, const PiecewisePolynomial& g) {
    if (f.is_zero() || g.is_zero()) return {};
    if (!f.has_bounded_support() || !g.has_bounded_support())
        throw std::domain_error("convolution needs compactly supported factors");
    const auto& fact = detail::factorial_table(static_cast<std::size_t>(f.degree() + g.degree() + 1));
    std::vector<PiecewisePolynomial::Knot> out;
    out.reserve(f.knots().size() * g.knots().size());
    for (const auto& a : f.knots())
        for (const auto& b : g.knots()) {
            PiecewisePolynomial::Knot k{a.at + b.at, {}};
            for (const auto& s : a.jumps)
                for (const auto& t : b.jumps) {
                    const int p = s.power + t.power + 1;
                    mpq_class w(fact[s.power] * fact[t.power], fact[p]);
                    w.canonicalize();
                    k.jumps.push_back({p, s.coef * t.coef * w});
                }
            out.push_back(std::move(k));
        }
    auto r = PiecewisePolynomial::from_jumps(out);
    r.bounded_ = true;
    return r;
}

inline PiecewisePolynomial self_convolve(const PiecewisePolynomial& p) { return convolve(p, p); }

/// Exact integral of f^2, as (f * f(-.))(0).
inline mpq_class l2_norm_sq(const PiecewisePolynomial& f) {
    if (f.is_zero()) return 0;
    return convolve(f, f.reflected()).evaluate(0);
}

struct NonnegativityCertificate {
    bool certified = false;
    std::size_t pieces = 0;
    int max_depth = 0;                 ///< deepest Bernstein subdivision needed
    std::optional<mpq_class> witness;  ///< point with f < 0, when one was found
};

namespace detail {

/// Sign certificate for a polynomial in Bernstein form on [0, 1] with
/// integer coefficients sharing one positive scale. Midpoint subdivision
/// keeps the scale uniform by multiplying each half by 2^d.
inline bool bernstein_nonnegative(std::vector<mpz_class> b, int depth, int max_depth, int& used,
                                  mpq_class lo, mpq_class width, std::optional<mpq_class>& witness) {
    used = std::max(used, depth);
    if (std::all_of(b.begin(), b.end(), [](const mpz_class& c) { return c >= 0; })) return true;
    if (b.front() < 0) {
        witness = lo;
        return false;
    }
    if (b.back() < 0) {
        witness = lo + width;
        return false;
    }
    if (depth >= max_depth) return false;
    const std::size_t d = b.size() - 1;
    std::vector<mpz_class> left(d + 1), right(d + 1);
    // de Casteljau at 1/2 without division; row r carries scale 2^r
    std::vector<mpz_class> row = b;
    for (std::size_t r = 0; r <= d; ++r) {
        left[r] = row.front() << static_cast<mp_bitcnt_t>(d - r);
        right[d - r] = row.back() << static_cast<mp_bitcnt_t>(d - r);
        for (std::size_t i = 0; i + 1 < row.size(); ++i) row[i] += row[i + 1];
        row.pop_back();
    }
    const mpq_class half = width / 2;
    return bernstein_nonnegative(std::move(left), depth + 1, max_depth, used, lo, half, witness) &&
           bernstein_nonnegative(std::move(right), depth + 1, max_depth, used, lo + half, half, witness);
}

}  // namespace detail

/// Certify f >= 0 on the whole line. Each piece is moved to integer
/// coefficients on an integer lattice, converted to Bernstein form over its
/// interval and checked coefficientwise, subdividing up to max_depth times
/// where the coarse form is inconclusive.
inline NonnegativityCertificate certify_nonnegative(const PiecewisePolynomial& f, int max_depth = 8) {
    NonnegativityCertificate cert;
    if (f.is_zero()) {
        cert.certified = true;
        return cert;
    }
    if (!f.has_bounded_support()) return cert;

    // x = z / q puts every knot on the integers
    mpz_class q = 1;
    for (const auto& k : f.knots()) mpz_lcm(q.get_mpz_t(), q.get_mpz_t(), k.at.get_den().get_mpz_t());
    const auto d = static_cast<std::size_t>(f.degree());

    // c (x - a)^j = c q^{-j} (z - q a)^j; D clears every denominator
    mpz_class D = 1;
    std::vector<std::vector<std::pair<std::size_t, mpq_class>>> scaled(f.knots().size());
    std::vector<mpz_class> zk(f.knots().size());
    for (std::size_t i = 0; i < f.knots().size(); ++i) {
        const auto& k = f.knots()[i];
        zk[i] = mpq_class(k.at * q).get_num();
        for (const auto& t : k.jumps) {
            mpq_class c = t.coef / mpq_class(detail::power(q, static_cast<unsigned long>(t.power)));
            mpz_lcm(D.get_mpz_t(), D.get_mpz_t(), c.get_den().get_mpz_t());
            scaled[i].push_back({static_cast<std::size_t>(t.power), c});
        }
    }

    const auto& fact = detail::factorial_table(d);
    std::vector<mpz_class> weight(d + 1);  // j! (d - j)!, proportional to 1 / C(d, j)
    for (std::size_t j = 0; j <= d; ++j) weight[j] = fact[j] * fact[d - j];

    std::vector<mpz_class> cur(d + 1);
    for (std::size_t i = 0; i + 1 < zk.size(); ++i) {
        if (i > 0) detail::taylor_shift(cur, mpz_class(zk[i] - zk[i - 1]));
        for (const auto& [p, c] : scaled[i]) cur[p] += mpq_class(c * D).get_num();

        const mpz_class w = zk[i + 1] - zk[i];
        std::vector<mpz_class> b(d + 1);
        mpz_class wp = 1;
        for (std::size_t j = 0; j <= d; ++j) {
            b[j] = cur[j] * wp * weight[j];
            wp *= w;
        }
        // Bernstein coefficients b_i = sum_j C(i, j) e_j by repeated prefix sums
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t j = d; j > r; --j) b[j] += b[j - 1];
        ++cert.pieces;
        const mpq_class lo(zk[i], q), width(w, q);
        if (!detail::bernstein_nonnegative(std::move(b), 0, max_depth, cert.max_depth, lo, width, cert.witness))
            return cert;
    }
    cert.certified = true;
    return cert;
}

}  // namespace kvb
