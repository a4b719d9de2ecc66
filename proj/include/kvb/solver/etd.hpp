#pragma once

#include "kvb/solver/model.hpp"
#include "kvb/spectral/symbols.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace kvb {

/// phi_k(z) = sum_{m >= 0} z^m / (m + k)!, k in {1, 2}.
/// Series near the origin, closed form elsewhere.
inline Complex phi1(Complex z) {
    if (std::abs(z) < 0.5) {
        Complex term = 1.0, sum = 0.0;
        for (int m = 0; m < 24; ++m) {
            sum += term;
            term *= z / double(m + 2);
        }
        return sum;
    }
    return (std::exp(z) - 1.0) / z;
}

inline Complex phi2(Complex z) {
    if (std::abs(z) < 0.5) {
        Complex term = 0.5, sum = 0.0;
        for (int m = 0; m < 24; ++m) {
            sum += term;
            term *= z / double(m + 3);
        }
        return sum;
    }
    return (std::exp(z) - 1.0 - z) / (z * z);
}

/// Two-stage exponential Runge-Kutta step (Cox-Matthews ETD2RK):
///   a       = E u + dt phi1 N(u)
///   u_next  = E u + dt (phi1 - phi2) N(u) + dt phi2 N(a)
/// with E = e^{-dt m}. Stiff order 2; exact on the linear part. Every weight
/// is a positive combination when m is real, so nonnegative Fourier data
/// stays nonnegative whenever N does.
class EtdStepper {
public:
    static constexpr int order = 2;

    EtdStepper(const SymbolSet& symbols, ModelParams params, double dt)
        : grid_(symbols.grid), params_(params), dt_(dt) {
        if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
        const auto n = grid_.size();
        expo_.resize(n);
        w_first_.resize(n);
        w_second_.resize(n);
        w_stage_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const Complex z = -dt * Complex(symbols.m_real[i], symbols.m_imag[i]);
            const Complex p1 = phi1(z), p2 = phi2(z);
            expo_[i] = std::exp(z);
            w_stage_[i] = dt * p1;
            w_first_[i] = dt * (p1 - p2);
            w_second_[i] = dt * p2;
        }
    }

    double dt() const { return dt_; }
    const ModelParams& params() const { return params_; }

    SpectralField step(const SpectralField& u) const {
        require_same_grid(grid_, u.grid());
        const bool linear = params_.gamma1 == 0.0 && params_.gamma2 == 0.0;
        if (linear) {
            SpectralField out(u);
            for (std::size_t i = 0; i < out.size(); ++i) out[i] *= expo_[i];
            return out;
        }
        const auto nu = nonlinearity(u, params_);
        SpectralField a(grid_);
        for (std::size_t i = 0; i < a.size(); ++i) a[i] = expo_[i] * u[i] + w_stage_[i] * nu[i];
        const auto na = nonlinearity(a, params_);
        SpectralField out(grid_);
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = expo_[i] * u[i] + w_first_[i] * nu[i] + w_second_[i] * na[i];
        return out;
    }

private:
    GridSpec grid_;
    ModelParams params_;
    double dt_;
    std::vector<Complex> expo_, w_stage_, w_first_, w_second_;
};

inline SpectralField step_etd(const SpectralField& state, const ModelParams& params, double dt) {
    const auto symbols = dissipation_symbol(state.grid(), params.alpha, params.variant);
    return EtdStepper(symbols, params, dt).step(state);
}

/// Integrate from 0 to t_end with uniform steps (the last one shortened).
inline SpectralField integrate_etd(SpectralField u, const ModelParams& params, double t_end, double dt) {
    if (!(t_end >= 0.0)) throw std::invalid_argument("t_end must be nonnegative");
    const auto symbols = dissipation_symbol(u.grid(), params.alpha, params.variant);
    const EtdStepper stepper(symbols, params, dt);
    const auto full = static_cast<long>(std::floor(t_end / dt * (1 + 1e-12)));
    for (long s = 0; s < full; ++s) u = stepper.step(u);
    const double rest = t_end - full * dt;
    if (rest > 1e-12 * dt) u = EtdStepper(symbols, params, rest).step(u);
    return u;
}

}  // namespace kvb
