#include <catch_amalgamated.hpp>

#include "kvb/solver/etd.hpp"
#include "kvb/solver/model.hpp"
#include "kvb/solver/picard.hpp"
#include "kvb/solver/simulation.hpp"
#include "kvb/solver/xs_norm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace kvb;
using Catch::Approx;

namespace {

constexpr double pi = std::numbers::pi;

GridSpec standard_grid() { return build_grid(512, 16 * pi); }

// Discrete convolution sum over nonnegative data, no FFT involved:
// gamma1 (|xi| u * |xi| u) - gamma2 (u * xi^2 u), times dxi.
SpectralField direct_nonlinearity(const SpectralField& u, const ModelParams& p) {
    const auto& g = u.grid();
    const int h = g.n_modes / 2;
    SpectralField out(g);
    for (int m = -h; m < h; ++m) {
        Complex acc = 0.0;
        for (int k = -h; k < h; ++k) {
            const int l = m - k;
            if (l < -h || l >= h) continue;
            const double xk = k * g.dxi(), xl = l * g.dxi();
            acc += (p.gamma1 * std::abs(xk) * std::abs(xl) - p.gamma2 * xl * xl) * u.at_wavenumber(k) *
                   u.at_wavenumber(l);
        }
        out.at_wavenumber(m) = acc * g.dxi();
    }
    return dealias(out);
}

}  // namespace

TEST_CASE("initial_datum", "[solver][datum]") {
    const auto g = standard_grid();
    const auto u0 = initial_datum(g, 1.0);
    int positive = 0, total = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(u0[i].real() >= 0.0);
        if (u0[i] != Complex(0.0)) {
            ++total;
            if (g.frequency(i) > 0) ++positive;
            CHECK(u0[i] == Complex(1.0));
        }
    }
    // open interval (1,2) at dxi = 1/16: xi in {17/16, ..., 31/16}
    CHECK(positive == 15);
    CHECK(total == 30);
    CHECK(u0.at_wavenumber(16) == Complex(0.0));
    CHECK(u0.at_wavenumber(32) == Complex(0.0));
    CHECK(u0.at_wavenumber(17) == Complex(1.0));
    CHECK(u0.at_wavenumber(31) == Complex(1.0));
    CHECK(hermitian_defect(u0) == 0.0);

    CHECK_THROWS(initial_datum(g, 0.0));
    CHECK_THROWS(initial_datum(build_grid(64, 4 * pi), 1.0));  // dxi = 1/4
}

TEST_CASE("nonlinearity", "[solver][nonlinearity]") {
    const auto g = standard_grid();
    const ModelParams p{0.0, 1.0, -1.0, SymbolVariant::nonlocal};
    CHECK(nonlinearity(SpectralField(g), p).max_abs() == 0.0);
    CHECK(nonlinearity(initial_datum(g, 1.0), ModelParams{0.0, 0.0, 0.0, SymbolVariant::nonlocal}).max_abs() == 0.0);

    SECTION("matches the composition of dealiased products") {
        const auto u = initial_datum(g, 0.7);
        for (auto variant : {SymbolVariant::nonlocal, SymbolVariant::local_dispersive}) {
            const ModelParams q{0.0, 1.3, -0.4, variant};
            const auto d1 = variant == SymbolVariant::nonlocal ? fractional_derivative(u, 1.0) : first_derivative(u);
            auto expect = pointwise_product(d1, d1);
            expect *= q.gamma1;
            auto second = pointwise_product(u, second_derivative(u));
            second *= q.gamma2;
            expect += second;
            CHECK(sup_mode_distance(nonlinearity(u, q), expect) < 1e-13 * expect.max_abs());
        }
    }

    SECTION("positive regime: Fourier output nonnegative, supported in |xi| < 4") {
        const auto u = initial_datum(g, 1.0);
        const auto n = nonlinearity(u, p);
        const auto oracle = direct_nonlinearity(u, p);
        CHECK(sup_mode_distance(n, oracle) < 1e-12 * oracle.max_abs());
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double xi = std::abs(g.frequency(i));
            CHECK(oracle[i].real() >= 0.0);
            CHECK(n[i].real() >= -1e-13 * oracle.max_abs());
            if (xi >= 4.0) CHECK(std::abs(n[i]) < 1e-13 * oracle.max_abs());
        }
        // strictly positive on the sum band (2,4)
        CHECK(n.at_wavenumber(48).real() > 0.0);
        CHECK(hermitian_defect(n) < 1e-13 * n.max_abs());
    }
}

TEST_CASE("phi functions are continuous across the series switch", "[solver][etd]") {
    for (double r : {0.4999, 0.5001}) {
        for (double ang : {0.0, 1.0, pi}) {
            const Complex z = std::polar(r, ang);
            const Complex e1 = (std::exp(z) - 1.0) / z;
            const Complex e2 = (std::exp(z) - 1.0 - z) / (z * z);
            CHECK(std::abs(phi1(z) - e1) < 1e-14);
            CHECK(std::abs(phi2(z) - e2) < 1e-14);
        }
    }
    CHECK(phi1(0.0) == Complex(1.0));
    CHECK(phi2(0.0) == Complex(0.5));
}

TEST_CASE("step_etd is exact on the linear part", "[solver][etd]") {
    const auto g = standard_grid();
    const ModelParams lin{0.5, 0.0, 0.0, SymbolVariant::nonlocal};
    const auto u0 = initial_datum(g, 1.0);
    const auto one = step_etd(u0, lin, 0.01);
    const auto exact = semigroup_factor(dissipation_symbol(g, 0.5, SymbolVariant::nonlocal), 0.01).apply(u0);
    CHECK(sup_mode_distance(one, exact) == 0.0);

    SECTION("many steps reproduce the semigroup at t = 1 to 1e-12 relative") {
        for (auto variant : {SymbolVariant::nonlocal, SymbolVariant::local_dispersive}) {
            const ModelParams q{0.5, 0.0, 0.0, variant};
            const auto u = integrate_etd(u0, q, 1.0, 1e-3);
            const auto e = semigroup_factor(dissipation_symbol(g, 0.5, variant), 1.0).apply(u0);
            for (std::size_t i = 0; i < g.size(); ++i)
                CHECK(std::abs(u[i] - e[i]) <= 1e-12 * std::max(std::abs(e[i]), 1e-300));
        }
    }
    CHECK_THROWS(step_etd(u0, lin, 0.0));
}

TEST_CASE("ETD self-convergence under dt halving", "[solver][etd][convergence]") {
    const auto g = standard_grid();
    const ModelParams p{0.0, 1.0, -1.0, SymbolVariant::nonlocal};
    const auto u0 = initial_datum(g, 0.5);
    const double T = 0.1;
    const auto a = integrate_etd(u0, p, T, 0.01);
    const auto b = integrate_etd(u0, p, T, 0.005);
    const auto c = integrate_etd(u0, p, T, 0.0025);
    const double ratio = sup_mode_distance(a, b) / sup_mode_distance(b, c);
    const double expect = std::pow(2.0, EtdStepper::order);
    CHECK(ratio == Approx(expect).epsilon(0.2));
}

TEST_CASE("explicit-Euler-in-integrand step vs first Picard iterate", "[solver][etd][picard]") {
    const auto g = standard_grid();
    const ModelParams p{0.0, 1.0, -1.0, SymbolVariant::nonlocal};
    const auto u0 = initial_datum(g, 0.5);
    const auto sym = dissipation_symbol(g, 0.0, SymbolVariant::nonlocal);
    double prev = 0.0;
    for (double dt : {1e-3, 5e-4}) {
        // E u0 + dt phi1 N(u0): the Duhamel integral with N frozen at its left end
        const auto n0 = nonlinearity(u0, p);
        auto euler = semigroup_factor(sym, dt).apply(u0);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const Complex z = -dt * sym.m_real[i];
            euler[i] += dt * phi1(z) * n0[i];
        }
        const auto pic = picard_iterate(u0, p, dt, 1, 2);
        const double d = sup_mode_distance(euler, pic.final_iterate().back());
        CHECK(d < dt * n0.max_abs());
        if (prev > 0.0) CHECK(prev / d == Approx(4.0).epsilon(0.25));
        prev = d;
    }
}

TEST_CASE("picard_iterate", "[solver][picard]") {
    const auto g = standard_grid();
    const ModelParams p{0.0, 1.0, -1.0, SymbolVariant::nonlocal};

    SECTION("zero datum stays zero") {
        const auto r = picard_iterate(SpectralField(g), p, 0.01, 1, 5);
        for (const auto& f : r.final_iterate()) CHECK(f.max_abs() == 0.0);
    }
    SECTION("iterates keep nonnegative Fourier data") {
        const auto r = picard_iterate(initial_datum(g, 1.0), p, 0.05, 4, 33);
        for (const auto& it : r.iterates)
            for (const auto& f : it) CHECK(fourier_min(f) >= -1e-12 * f.max_abs());
        CHECK(r.contracting);
        CHECK(r.successive_distance.size() == 4);
    }
    SECTION("agrees with ETD on a short horizon for small data") {
        const auto u0 = initial_datum(g, 0.1);
        const auto r = picard_iterate(u0, p, 0.01, 4, 65);
        const auto e = integrate_etd(u0, p, 0.01, 1e-3);
        CHECK(sup_mode_distance(r.final_iterate().back(), e) <= 1e-6);
    }
    SECTION("divergence is reported") {
        // large data over a long horizon: the fixed-point map is not a contraction
        const auto r = picard_iterate(initial_datum(g, 16.0), p, 0.5, 4, 9);
        CHECK_FALSE(r.contracting);
    }
    CHECK_THROWS(picard_iterate(SpectralField(g), p, 0.01, 0, 5));
}

TEST_CASE("xs_norm_diagnostic", "[solver][norms]") {
    const auto g = standard_grid();
    std::vector<double> times{0.0, 0.5, 1.0};
    std::vector<SpectralField> zero(3, SpectralField(g));
    CHECK(xs_norm_diagnostic(times, zero, {1.0, 1.0}) == 0.0);
    CHECK_THROWS(xs_norm_diagnostic({}, {}, {0.0, 1.0}));
    CHECK_THROWS(xs_norm_diagnostic(times, zero, {-1.0, 1.0}));

    SECTION("s = 0 reduces to 2 sup L2 + sup t^{1/4} ||u_x||") {
        const auto u0 = initial_datum(g, 1.0);
        const auto sym = dissipation_symbol(g, 0.0, SymbolVariant::nonlocal);
        std::vector<SpectralField> states;
        double sup_l2 = 0.0, sup_dx = 0.0;
        for (double t : times) {
            states.push_back(semigroup_factor(sym, t).apply(u0));
            sup_l2 = std::max(sup_l2, l2_norm(states.back()));
            sup_dx = std::max(sup_dx, std::pow(t, 0.25) * sobolev_norm(states.back(), 1.0, true));
        }
        CHECK(xs_norm_diagnostic(times, states, {0.0, 1.0}) == Approx(2 * sup_l2 + sup_dx));
    }
    SECTION("linear evolution is bounded by 3 e^{1/4} ||u0||_{H^1} for s = 1, T0 = 1") {
        // per mode |e^{-t m}| <= e^{t/4}, and t^{1/4}, t^{1/2} <= 1 on [0,1]
        const auto u0 = initial_datum(g, 1.0);
        const auto sym = dissipation_symbol(g, 0.0, SymbolVariant::nonlocal);
        std::vector<double> ts;
        std::vector<SpectralField> states;
        for (int i = 0; i <= 100; ++i) {
            ts.push_back(i * 0.01);
            states.push_back(semigroup_factor(sym, ts.back()).apply(u0));
        }
        const double x = xs_norm_diagnostic(ts, states, {1.0, 1.0});
        CHECK(std::isfinite(x));
        CHECK(x <= 3.0 * std::exp(0.25) * sobolev_norm(u0, 1.0, false));
    }
}

TEST_CASE("run_simulation monitors and contracts", "[solver][simulation]") {
    SimConfig c;
    c.grid = standard_grid();
    c.params = {0.0, 1.0, -1.0, SymbolVariant::nonlocal};
    c.eta = 1.0;
    c.t_end = 0.2;
    c.dt = 1e-3;
    c.output_every = 10;
    c.monitors.hs = 1.0;
    c.monitors.hdot = 0.5;
    c.monitors.xs = 0.0;

    const auto r = run_simulation(c);
    REQUIRE_FALSE(r.blew_up);
    CHECK(r.steps_taken == 200);
    CHECK(r.times.size() == 21);
    CHECK(r.times.back() == Approx(0.2));
    for (std::size_t i = 1; i < r.times.size(); ++i) CHECK(r.times[i] > r.times[i - 1]);
    CHECK(r.hs_norm.size() == r.times.size());
    CHECK(r.hdot_norm.size() == r.times.size());
    CHECK(r.xs_norm.size() == r.times.size());
    CHECK(std::is_sorted(r.xs_norm.begin(), r.xs_norm.end()));
    for (double m : r.positivity_ratio) CHECK(m >= -1e-8);

    SECTION("validation") {
        auto bad = c;
        bad.dt = bad.t_end;
        CHECK_THROWS(run_simulation(bad));
        bad = c;
        bad.blowup_threshold = 0.1;
        CHECK_THROWS(run_simulation(bad));
    }
    SECTION("partial final step lands on t_end") {
        auto odd = c;
        odd.t_end = 0.0105;
        odd.output_every = 1;
        const auto s = run_simulation(odd);
        CHECK(s.times.back() == odd.t_end);
        CHECK(s.steps_taken == 11);
    }
    SECTION("picard cross-check on the first output interval") {
        auto small = c;
        small.eta = 0.1;
        small.picard_iters = 4;
        small.t_end = 0.05;
        const auto s = run_simulation(small);
        REQUIRE(s.picard);
        CHECK(s.picard->horizon == Approx(0.01));
        CHECK(s.picard->sup_difference <= 1e-6);
        CHECK(s.picard->contracting);
    }
}

TEST_CASE("blow-up is reported, not thrown", "[solver][simulation]") {
    SimConfig c;
    c.grid = standard_grid();
    c.params = {0.0, 1.0, -1.0, SymbolVariant::nonlocal};
    c.eta = 8.0;
    c.t_end = 1.0;
    c.dt = 1e-3;
    c.output_every = 5;
    const auto r = run_simulation(c);
    CHECK(r.blew_up);
    REQUIRE(r.t_blowup);
    CHECK(*r.t_blowup < c.t_end);
    for (std::size_t i = 0; i + 1 < r.l2_norm.size(); ++i) CHECK(std::isfinite(r.l2_norm[i]));
}

TEST_CASE("linear exactness through run_simulation", "[solver][simulation]") {
    SimConfig c;
    c.grid = standard_grid();
    c.params = {1.0, 0.0, 0.0, SymbolVariant::nonlocal};
    c.t_end = 0.5;
    c.dt = 1e-3;
    c.output_every = 100;
    c.keep_states = true;
    const auto r = run_simulation(c);
    const auto sym = dissipation_symbol(c.grid, 1.0, SymbolVariant::nonlocal);
    const auto u0 = initial_datum(c.grid, 1.0);
    for (std::size_t k = 0; k < r.times.size(); ++k) {
        const auto e = semigroup_factor(sym, r.times[k]).apply(u0);
        for (std::size_t i = 0; i < c.grid.size(); ++i)
            CHECK(std::abs(r.states[k][i] - e[i]) <= 1e-12 * std::max(std::abs(e[i]), 1e-300));
    }
}

TEST_CASE("physical field stays real", "[solver][simulation][property]") {
    for (auto variant : {SymbolVariant::nonlocal, SymbolVariant::local_dispersive}) {
        SimConfig c;
        c.grid = standard_grid();
        c.params = {0.7, 1.0, -0.5, variant};
        c.t_end = 0.1;
        c.dt = 1e-3;
        c.output_every = 20;
        c.keep_states = true;
        const auto r = run_simulation(c);
        for (const auto& s : r.states) CHECK(imaginary_residue(s) <= 1e-10);
    }
}

TEST_CASE("minorant at level 0 bounds the solver from below", "[solver][cascade-consistency]") {
    // u-hat(t, xi) >= eta e^{-24 t} on (1,2) for t >= T*, given positivity.
    SimConfig c;
    c.grid = standard_grid();
    c.params = {0.0, 1.0, -1.0, SymbolVariant::nonlocal};
    c.eta = 0.25;
    c.t_end = 0.7;
    c.dt = 1e-3;
    c.output_every = 50;
    c.keep_states = true;
    const auto r = run_simulation(c);
    REQUIRE_FALSE(r.blew_up);
    const double t_star = 2.0 * std::log(2.0) / 3.0;
    int checked = 0;
    for (std::size_t k = 0; k < r.times.size(); ++k) {
        if (r.times[k] < t_star) continue;
        const double minorant = c.eta * std::exp(-1.5 * r.times[k] * 16.0);
        const auto& u = r.states[k];
        for (std::size_t i = 0; i < c.grid.size(); ++i) {
            const double xi = c.grid.frequency(i);
            if (xi > 1.0 + 1e-12 && xi < 2.0 - 1e-12) {
                CHECK(u[i].real() >= minorant - 1e-12);
                ++checked;
            }
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("blow-up time is non-increasing in eta", "[solver][simulation][property]") {
    double prev = std::numeric_limits<double>::infinity();
    for (double eta : {1.0, 2.0, 4.0, 8.0, 16.0}) {
        SimConfig c;
        c.grid = standard_grid();
        c.params = {0.0, 1.0, -1.0, SymbolVariant::nonlocal};
        c.eta = eta;
        c.t_end = 1.0;
        c.dt = 1e-3;
        c.output_every = 100;
        const auto r = run_simulation(c);
        REQUIRE(r.blew_up);
        CHECK(*r.t_blowup <= prev);
        prev = *r.t_blowup;
    }
}
