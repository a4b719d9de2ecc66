#pragma once

#include "kvb/spectral/field.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace kvb {

enum class SymbolVariant {
    nonlocal,          ///< alpha |xi|^3 dissipation, nonlinearity built on |xi|
    local_dispersive,  ///< alpha d^3/dx^3 dispersion, nonlinearity built on d/dx
};

inline std::string_view to_string(SymbolVariant v) {
    return v == SymbolVariant::nonlocal ? "nonlocal" : "local-dispersive";
}

inline SymbolVariant parse_variant(std::string_view s) {
    if (s == "nonlocal") return SymbolVariant::nonlocal;
    if (s == "local-dispersive" || s == "local_dispersive" || s == "local")
        return SymbolVariant::local_dispersive;
    throw std::invalid_argument("unknown symbol variant '" + std::string(s) + "'");
}

/// Linear symbol m(xi) = m_real + i m_imag of the evolution
/// d_t u-hat = -m(xi) u-hat + (nonlinear terms).
struct SymbolSet {
    GridSpec grid;
    double alpha = 0.0;
    SymbolVariant variant = SymbolVariant::nonlocal;
    std::vector<double> m_real;
    std::vector<double> m_imag;
};

inline double nonlocal_symbol(double xi, double alpha) {
    const double a = std::abs(xi);
    const double xi2 = xi * xi;
    return -xi2 + alpha * a * xi2 + xi2 * xi2;
}

inline SymbolSet dissipation_symbol(const GridSpec& grid, double alpha, SymbolVariant variant) {
    if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be nonnegative");
    SymbolSet s{grid, alpha, variant, std::vector<double>(grid.size()), std::vector<double>(grid.size())};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double xi = grid.frequency(i);
        const double xi2 = xi * xi;
        if (variant == SymbolVariant::nonlocal) {
            s.m_real[i] = nonlocal_symbol(xi, alpha);
        } else {
            // d^3/dx^3 has symbol (i xi)^3 = -i xi^3.
            s.m_real[i] = -xi2 + xi2 * xi2;
            s.m_imag[i] = -alpha * xi2 * xi;
        }
    }
    return s;
}

/// Constant c(alpha) with -xi^2 + alpha|xi|^3 + xi^4 <= c xi^4:
/// 3/2 for alpha in [0,1], (3/2)(alpha+1) above.
inline double symbol_bound_constant(double alpha) {
    return alpha <= 1.0 ? 1.5 : 1.5 * (alpha + 1.0);
}

/// Largest m_real(xi) - c(alpha) xi^4 over the grid modes with |xi| >= xi_floor.
/// Nonpositive means the quartic bound holds there.
inline double symbol_bound_excess(const SymbolSet& s, double xi_floor = 0.0) {
    const double c = symbol_bound_constant(s.alpha);
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s.grid.size(); ++i) {
        const double xi = s.grid.frequency(i);
        if (std::abs(xi) < xi_floor) continue;
        const double xi4 = xi * xi * xi * xi;
        worst = std::max(worst, s.m_real[i] - c * xi4);
    }
    return worst;
}

/// Per-mode multiplier applied to a spectral field.
struct SpectralMultiplier {
    GridSpec grid;
    std::vector<Complex> factors;

    SpectralField apply(const SpectralField& f) const {
        require_same_grid(grid, f.grid());
        SpectralField out(f);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] *= factors[i];
        return out;
    }
};

/// Fourier symbol of the linear semigroup, e^{-t (m_real + i m_imag)}.
inline SpectralMultiplier semigroup_factor(const SymbolSet& s, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("semigroup time must be nonnegative");
    SpectralMultiplier m{s.grid, std::vector<Complex>(s.grid.size())};
    for (std::size_t i = 0; i < m.factors.size(); ++i)
        m.factors[i] = std::exp(Complex(-t * s.m_real[i], -t * s.m_imag[i]));
    return m;
}

}  // namespace kvb
