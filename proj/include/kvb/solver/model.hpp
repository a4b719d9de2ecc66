#pragma once

#include "kvb/spectral/field.hpp"
#include "kvb/spectral/operators.hpp"
#include "kvb/spectral/symbols.hpp"

#include <cmath>
#include <stdexcept>

namespace kvb {

/// Coefficients of
///   u_t + u_xx + alpha D3 u + u_xxxx = gamma1 (D1 u)^2 + gamma2 u u_xx
/// where (D1, D3) = ((-d^2)^{1/2}, (-d^2)^{3/2}) for the nonlocal variant and
/// (d/dx, d^3/dx^3) for the local-dispersive one.
struct ModelParams {
    double alpha = 0.0;
    double gamma1 = 1.0;
    double gamma2 = -1.0;
    SymbolVariant variant = SymbolVariant::nonlocal;

    bool operator==(const ModelParams&) const = default;
};

/// gamma2 < 0 < gamma1: the sign regime in which the nonlinear term maps
/// nonnegative Fourier data to nonnegative Fourier data.
inline bool positive_regime(const ModelParams& p) { return p.gamma2 < 0.0 && 0.0 < p.gamma1; }

/// The two parameter families with global energy control for the local equation.
inline bool energy_regime(const ModelParams& p) {
    return p.gamma2 == 0.5 * p.gamma1 || p.gamma2 == 0.0;
}

/// Indicator datum eta * 1_{1 < |xi| < 2}, mirrored so the physical field is
/// real. Modes exactly at |xi| = 1 or 2 are left out.
inline SpectralField initial_datum(const GridSpec& grid, double eta) {
    if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
    if (grid.dxi() > 0.125 * (1.0 + 1e-12))
        throw std::invalid_argument("grid too coarse: need dxi <= 1/8 to resolve the band (1,2)");
    if (grid.xi_max() * grid.dealias_fraction <= 2.0)
        throw std::invalid_argument("grid too coarse: band (1,2) exceeds the dealiased range");
    SpectralField f(grid);
    const double tol = 1e-12 * grid.dxi();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double a = std::abs(grid.frequency(i));
        if (a > 1.0 + tol && a < 2.0 - tol) f[i] = eta;
    }
    return f;
}

/// Right-hand side nonlinearity gamma1 (D1 u)^2 + gamma2 u u_xx, dealiased.
/// Computed in one physical-space pass; equivalent to
/// gamma1 * pointwise_product(D1 u, D1 u) + gamma2 * pointwise_product(u, u_xx).
inline SpectralField nonlinearity(const SpectralField& u, const ModelParams& p) {
    const auto& g = u.grid();
    if (p.gamma1 == 0.0 && p.gamma2 == 0.0) return SpectralField(g);
    const auto ud = dealias(u);
    const auto d1 = p.variant == SymbolVariant::nonlocal ? fractional_derivative(ud, 1.0)
                                                         : first_derivative(ud);
    const auto w = to_physical(d1);
    const auto v = to_physical(ud);
    const auto vxx = to_physical(second_derivative(ud));
    std::vector<double> n(g.size());
    for (std::size_t j = 0; j < n.size(); ++j) n[j] = p.gamma1 * w[j] * w[j] + p.gamma2 * v[j] * vxx[j];
    return dealias(to_spectral(g, std::span<const double>(n)));
}

}  // namespace kvb
