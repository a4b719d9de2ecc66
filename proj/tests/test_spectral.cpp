#include <catch_amalgamated.hpp>

#include "kvb/spectral/grid.hpp"
#include "kvb/spectral/field.hpp"
#include "kvb/spectral/operators.hpp"
#include "kvb/spectral/symbols.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace kvb;
using Catch::Approx;

namespace {

constexpr double pi = std::numbers::pi;

// Random Hermitian field whose modes satisfy |k| <= k_max.
SpectralField random_band_limited(const GridSpec& g, int k_max, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    SpectralField f(g);
    f.at_wavenumber(0) = nd(rng);
    for (int k = 1; k <= k_max; ++k) {
        const Complex c(nd(rng), nd(rng));
        f.at_wavenumber(k) = c;
        f.at_wavenumber(-k) = std::conj(c);
    }
    return f;
}

// Direct O(N^2) convolution dxi * sum_k a_k b_{m-k}, wavenumbers taken on Z
// (no wrap-around); result restricted to the grid.
SpectralField direct_convolution(const SpectralField& a, const SpectralField& b) {
    const auto& g = a.grid();
    const int h = g.n_modes / 2;
    SpectralField out(g);
    for (int m = -h; m < h; ++m) {
        Complex acc = 0.0;
        for (int k = -h; k < h; ++k) {
            const int l = m - k;
            if (l < -h || l >= h) continue;
            acc += a.at_wavenumber(k) * b.at_wavenumber(l);
        }
        out.at_wavenumber(m) = acc * g.dxi();
    }
    return out;
}

SpectralField single_mode(const GridSpec& g, int k, Complex c = 1.0) {
    SpectralField f(g);
    f.at_wavenumber(k) = c;
    if (k != 0) f.at_wavenumber(-k) = std::conj(c);
    return f;
}

}  // namespace

TEST_CASE("build_grid frequency layout", "[spectral][grid]") {
    const auto g = build_grid(8, pi, 2.0 / 3.0);
    CHECK(g.dxi() == Approx(1.0).epsilon(1e-15));
    std::vector<double> freqs;
    for (std::size_t i = 0; i < g.size(); ++i) freqs.push_back(g.frequency(i));
    std::sort(freqs.begin(), freqs.end());
    for (int k = -4; k <= 3; ++k) CHECK(freqs[k + 4] == Approx(k).margin(1e-14));

    CHECK(build_grid(256, 16 * pi).dxi() == Approx(1.0 / 16).epsilon(1e-15));
}

TEST_CASE("build_grid rejects bad parameters", "[spectral][grid]") {
    CHECK_THROWS_WITH(build_grid(7, pi), Catch::Matchers::ContainsSubstring("n_modes must be even"));
    CHECK_THROWS(build_grid(6, pi));
    CHECK_THROWS(build_grid(16, 0.0));
    CHECK_THROWS(build_grid(16, -1.0));
    CHECK_THROWS(build_grid(16, pi, 0.0));
    CHECK_THROWS(build_grid(16, pi, 1.5));
}

TEST_CASE("dealias band follows the two-thirds rule", "[spectral][grid]") {
    const auto g = build_grid(12, pi);
    // |k| < 12/3 = 4; k = 4 would alias 4 + 4 - 12 = -4 back into the band.
    CHECK(g.in_dealias_band(g.index_of(3)));
    CHECK_FALSE(g.in_dealias_band(g.index_of(4)));
    CHECK_FALSE(g.in_dealias_band(g.index_of(-6)));
    const auto full = build_grid(12, pi, 1.0);
    CHECK(full.in_dealias_band(full.index_of(5)));
    CHECK_FALSE(full.in_dealias_band(full.index_of(-6)));
}

TEST_CASE("dissipation_symbol values", "[spectral][symbols]") {
    const auto g = build_grid(8, pi);
    const auto i1 = g.index_of(1), i2 = g.index_of(2), i0 = g.index_of(0);

    const auto s0 = dissipation_symbol(g, 0.0, SymbolVariant::nonlocal);
    CHECK(s0.m_real[i1] == Approx(0.0).margin(1e-14));
    CHECK(s0.m_real[i0] == 0.0);

    const auto s1 = dissipation_symbol(g, 1.0, SymbolVariant::nonlocal);
    CHECK(s1.m_real[i2] == Approx(20.0));
    CHECK(s1.m_real[i2] <= 1.5 * 16.0);
    CHECK(s1.m_imag[i2] == 0.0);

    const auto sl = dissipation_symbol(g, 1.0, SymbolVariant::local_dispersive);
    CHECK(sl.m_real[i2] == Approx(12.0));
    CHECK(sl.m_imag[i2] == Approx(-8.0));

    CHECK_THROWS(dissipation_symbol(g, -0.1, SymbolVariant::nonlocal));
}

TEST_CASE("quartic bound on the dissipative symbol", "[spectral][symbols][property]") {
    const auto g = build_grid(1024, 64 * pi);
    SECTION("alpha in [0,1] holds on every mode") {
        for (double alpha : {0.0, 0.25, 0.5, 0.9, 1.0})
            CHECK(symbol_bound_excess(dissipation_symbol(g, alpha, SymbolVariant::nonlocal)) <= 1e-12);
    }
    SECTION("alpha > 1 holds on every mode up to 3 + sqrt(11)") {
        for (double alpha : {1.5, 2.0, 4.0, 6.0, 6.3})
            CHECK(symbol_bound_excess(dissipation_symbol(g, alpha, SymbolVariant::nonlocal)) <= 1e-12);
    }
    SECTION("alpha > 1 holds for |xi| >= 1 at any alpha") {
        for (double alpha : {7.0, 20.0, 100.0})
            CHECK(symbol_bound_excess(dissipation_symbol(g, alpha, SymbolVariant::nonlocal), 1.0) <= 1e-9);
    }
    SECTION("the (3/2)(alpha+1) bound fails at small |xi| for large alpha") {
        // alpha = 7, xi = 0.3: m = -0.09 + 0.189 + 0.0081 > 12 * 0.0081.
        CHECK(nonlocal_symbol(0.3, 7.0) > symbol_bound_constant(7.0) * std::pow(0.3, 4));
    }
}

TEST_CASE("semigroup_factor", "[spectral][symbols]") {
    const auto g = build_grid(8, pi);
    const auto s = dissipation_symbol(g, 1.0, SymbolVariant::nonlocal);
    CHECK(semigroup_factor(s, 3.7).factors[g.index_of(0)] == Complex(1.0));
    CHECK(std::abs(semigroup_factor(s, 0.1).factors[g.index_of(2)] - std::exp(-2.0)) < 1e-15);

    const auto s0 = dissipation_symbol(g, 0.0, SymbolVariant::nonlocal);
    CHECK(std::abs(semigroup_factor(s0, 1.0).factors[g.index_of(1)] - 1.0) < 1e-15);

    const auto id = semigroup_factor(s, 0.0);
    for (const auto& f : id.factors) CHECK(f == Complex(1.0));

    CHECK_THROWS(semigroup_factor(s, -1e-3));
}

TEST_CASE("semigroup property and growth bound", "[spectral][symbols][property]") {
    const auto g = build_grid(64, 4 * pi);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ut(0.0, 0.5), ua(0.0, 3.0);
    for (int trial = 0; trial < 25; ++trial) {
        const double t1 = ut(rng), t2 = ut(rng);
        const auto variant = trial % 2 ? SymbolVariant::nonlocal : SymbolVariant::local_dispersive;
        const auto s = dissipation_symbol(g, ua(rng), variant);
        const auto a = semigroup_factor(s, t1), b = semigroup_factor(s, t2),
                   ab = semigroup_factor(s, t1 + t2);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto prod = a.factors[i] * b.factors[i];
            CHECK(std::abs(prod - ab.factors[i]) <= 1e-12 * std::max(1.0, std::abs(ab.factors[i])));
            CHECK(std::abs(ab.factors[i]) <= std::exp((t1 + t2) / 4.0) * (1 + 1e-15));
        }
    }
}

TEST_CASE("fractional_derivative and second_derivative", "[spectral][operators]") {
    const auto g = build_grid(16, pi);
    std::mt19937_64 rng(11);
    const auto f = random_band_limited(g, 4, rng);

    CHECK(sup_mode_distance(fractional_derivative(f, 0.0), f) == 0.0);

    const auto d = fractional_derivative(single_mode(g, 3), 2.0);
    CHECK(d.at_wavenumber(3).real() == Approx(9.0));

    const auto twice = fractional_derivative(fractional_derivative(f, 1.0), 1.0);
    CHECK(sup_mode_distance(twice, fractional_derivative(f, 2.0)) < 1e-12);

    CHECK(second_derivative(single_mode(g, 2)).at_wavenumber(2).real() == Approx(-4.0));
    CHECK(second_derivative(SpectralField(g)).max_abs() == 0.0);
    CHECK(sup_mode_distance(-1.0 * second_derivative(f), fractional_derivative(f, 2.0)) < 1e-12);

    CHECK(hermitian_defect(fractional_derivative(f, 1.5)) < 1e-14);

    SECTION("negative orders need a mean-mode policy") {
        CHECK_THROWS(fractional_derivative(f, -1.0));
        const auto z = fractional_derivative(f, -1.0, ZeroModePolicy::zero);
        CHECK(z.at_wavenumber(0) == Complex(0.0));
        CHECK(std::abs(z.at_wavenumber(2) - f.at_wavenumber(2) / 2.0) < 1e-14);
        auto mean_free = f;
        mean_free.at_wavenumber(0) = 0.0;
        CHECK_NOTHROW(fractional_derivative(mean_free, -0.5));
    }
}

TEST_CASE("transform round trip and Parseval", "[spectral][transform][property]") {
    std::mt19937_64 rng(3);
    for (int n : {8, 32, 256, 512}) {
        const auto g = build_grid(n, 16 * pi);
        const auto f = random_band_limited(g, n / 2 - 1, rng);
        const auto u = to_physical(f);
        const auto back = to_spectral(g, std::span<const double>(u));
        CHECK(sup_mode_distance(back, f) <= 1e-12 * f.max_abs());
        CHECK(physical_l2_norm(g, u) == Approx(l2_norm(f)).epsilon(1e-10));
        CHECK(imaginary_residue(f) < 1e-13);
    }
}

TEST_CASE("pointwise_product", "[spectral][operators]") {
    SECTION("constant one is the identity") {
        const auto g = build_grid(32, pi);
        std::mt19937_64 rng(5);
        const auto b = random_band_limited(g, 5, rng);
        const std::vector<double> ones(g.size(), 1.0);
        const auto one = to_spectral(g, std::span<const double>(ones));
        CHECK(sup_mode_distance(pointwise_product(one, b), b) < 1e-12);
    }
    SECTION("cos x times cos 2x lands on |xi| in {1, 3}") {
        const auto g = build_grid(16, pi);
        const auto p = pointwise_product(single_mode(g, 1), single_mode(g, 2));
        for (int k = -8; k < 8; ++k) {
            const double expect = (std::abs(k) == 1 || std::abs(k) == 3) ? g.dxi() : 0.0;
            CHECK(std::abs(p.at_wavenumber(k) - expect) < 1e-13);
        }
    }
    SECTION("agrees with the direct convolution oracle on half-band data") {
        std::mt19937_64 rng(17);
        for (int n : {16, 64, 128}) {
            const auto g = build_grid(n, 8 * pi);
            const int half_band = static_cast<int>(g.dealias_fraction * n / 4) - 1;
            for (int trial = 0; trial < 10; ++trial) {
                const auto a = random_band_limited(g, half_band, rng);
                const auto b = random_band_limited(g, half_band, rng);
                const auto p = pointwise_product(a, b);
                CHECK(sup_mode_distance(p, direct_convolution(a, b)) <= 1e-10 * std::max(1.0, p.max_abs()));
                CHECK(sup_mode_distance(p, pointwise_product(b, a)) <= 1e-13 * std::max(1.0, p.max_abs()));
                CHECK(hermitian_defect(p) < 1e-12);
            }
        }
    }
    SECTION("spillover past the band is zeroed, matching a double-resolution oracle") {
        const auto g = build_grid(24, pi);  // band |k| < 8
        const auto fine = build_grid(48, pi);  // same dxi, no truncation up to |k| < 16
        std::mt19937_64 rng(23);
        const auto a = random_band_limited(g, 7, rng);
        const auto b = random_band_limited(g, 7, rng);
        SpectralField af(fine), bf(fine);
        for (int k = -7; k <= 7; ++k) {
            af.at_wavenumber(k) = a.at_wavenumber(k);
            bf.at_wavenumber(k) = b.at_wavenumber(k);
        }
        const auto p = pointwise_product(a, b);
        const auto pf = pointwise_product(af, bf);
        for (int k = -12; k < 12; ++k) {
            const bool kept = std::abs(k) < 8;
            const Complex expect = kept ? pf.at_wavenumber(k) : Complex(0.0);
            CHECK(std::abs(p.at_wavenumber(k) - expect) < 1e-12 * pf.max_abs());
        }
        // the fine product has real energy beyond the coarse band
        CHECK(std::abs(pf.at_wavenumber(12)) > 1e-3);
    }
    SECTION("grid mismatch") {
        CHECK_THROWS(pointwise_product(SpectralField(build_grid(16, pi)), SpectralField(build_grid(32, pi))));
    }
}

TEST_CASE("sobolev_norm", "[spectral][norms]") {
    const auto g = build_grid(512, 16 * pi);
    CHECK(sobolev_norm(SpectralField(g), 1.0, true) == 0.0);

    const auto m = single_mode(g, 5, Complex(0.3, -0.4));
    CHECK(sobolev_norm(m, 0.0, true) == Approx(sobolev_norm(m, 0.0, false)));
    CHECK(sobolev_norm_sq(m, 0.0, true) == Approx(2 * 0.25 * g.dxi()));
    const double xi = 5 * g.dxi();
    CHECK(sobolev_norm_sq(m, 1.0, true) == Approx(2 * 0.25 * xi * xi * g.dxi()));
    CHECK(sobolev_norm_sq(m, -1.0, false) == Approx(2 * 0.25 / (1 + xi * xi) * g.dxi()));

    SECTION("homogeneous negative order skips the mean") {
        auto c = single_mode(g, 0, 2.0);
        CHECK(sobolev_norm(c, -0.5, true) == 0.0);
        CHECK(sobolev_norm_sq(c, 0.0, true) == Approx(4.0 * g.dxi()));
    }
    SECTION("indicator on (1,2) approaches its line integral") {
        // one-sided quadrature of eta^2 1_{(1,2)}: count * dxi -> 1 as dxi -> 0
        for (int refine : {1, 2, 4}) {
            const auto gg = build_grid(512 * refine, 16 * refine * pi);
            SpectralField f(gg);
            int count = 0;
            for (std::size_t i = 0; i < gg.size(); ++i) {
                const double x = gg.frequency(i);
                if (std::abs(x) > 1.0 + 1e-12 && std::abs(x) < 2.0 - 1e-12) {
                    f[i] = 1.0;
                    if (x > 0) ++count;
                }
            }
            CHECK(count == 16 * refine - 1);
            const double two_sided = sobolev_norm_sq(f, 0.0, true);
            CHECK(two_sided == Approx(2.0 * (1.0 - gg.dxi())).epsilon(1e-14));
        }
    }
    SECTION("non-finite coefficients report the blow-up sentinel") {
        auto bad = m;
        bad[3] = Complex(std::nan(""), 0.0);
        CHECK(std::isinf(sobolev_norm(bad, 0.0, false)));
    }
}
