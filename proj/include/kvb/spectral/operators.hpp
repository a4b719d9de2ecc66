#pragma once

#include "kvb/spectral/field.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace kvb {

enum class ZeroModePolicy {
    reject,  ///< negative orders refuse fields with a nonzero mean
    zero,    ///< negative orders zero the mean mode
};

/// (-d^2/dx^2)^{sigma/2}: multiply each mode by |xi|^sigma.
inline SpectralField fractional_derivative(SpectralField f, double sigma,
                                           ZeroModePolicy policy = ZeroModePolicy::reject) {
    const auto& g = f.grid();
    if (sigma < 0.0) {
        auto& mean = f.at_wavenumber(0);
        if (policy == ZeroModePolicy::reject && mean != Complex(0.0))
            throw std::invalid_argument("negative-order derivative of a field with nonzero mean");
        mean = 0.0;
    }
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (sigma < 0.0 && g.wavenumber(i) == 0) continue;
        f[i] *= std::pow(std::abs(g.frequency(i)), sigma);
    }
    return f;
}

inline SpectralField first_derivative(SpectralField f) {
    for (std::size_t i = 0; i < f.size(); ++i) f[i] *= Complex(0.0, f.grid().frequency(i));
    // The Nyquist mode has no real-valued derivative.
    f.at_wavenumber(-f.grid().n_modes / 2) = 0.0;
    return f;
}

inline SpectralField second_derivative(SpectralField f) {
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double xi = f.grid().frequency(i);
        f[i] *= -xi * xi;
    }
    return f;
}

/// Dealiased product: transform of (a b) with both factors and the result
/// restricted to the dealiasing band. Equals the convolution
/// dxi * sum_k a_k b_{m-k} whenever no energy wraps around the grid.
inline SpectralField pointwise_product(const SpectralField& a, const SpectralField& b) {
    require_same_grid(a.grid(), b.grid());
    const auto ua = to_physical_complex(dealias(a));
    const auto ub = to_physical_complex(dealias(b));
    std::vector<Complex> prod(ua.size());
    for (std::size_t j = 0; j < prod.size(); ++j) prod[j] = ua[j] * ub[j];
    return dealias(to_spectral(a.grid(), std::span<const Complex>(prod)));
}

/// Squared Sobolev norm, sum_k w(xi_k) |c_k|^2 dxi with w = |xi|^{2s}
/// (homogeneous) or (1 + xi^2)^s. For homogeneous norms the mean mode carries
/// weight 0 when s > 0 or s < 0 and weight 1 when s = 0.
/// Returns +infinity when any coefficient is not finite.
inline double sobolev_norm_sq(const SpectralField& f, double s, bool homogeneous) {
    const auto& g = f.grid();
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const auto& c = f[i];
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            return std::numeric_limits<double>::infinity();
        const double xi = g.frequency(i);
        double w;
        if (homogeneous) {
            if (xi == 0.0) w = (s == 0.0) ? 1.0 : 0.0;
            else w = std::pow(std::abs(xi), 2.0 * s);
        } else {
            w = std::pow(1.0 + xi * xi, s);
        }
        acc += w * std::norm(c);
    }
    return acc * g.dxi();
}

inline double sobolev_norm(const SpectralField& f, double s, bool homogeneous) {
    return std::sqrt(sobolev_norm_sq(f, s, homogeneous));
}

inline double l2_norm(const SpectralField& f) { return sobolev_norm(f, 0.0, false); }

/// min_k Re c_k.
inline double fourier_min(const SpectralField& f) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& c : f.coeffs()) m = std::min(m, c.real());
    return m;
}

}  // namespace kvb
