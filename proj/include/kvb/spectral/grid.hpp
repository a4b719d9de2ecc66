#pragma once

#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <string>

namespace kvb {

/// Uniform periodic grid on [-half_width, half_width) together with its
/// Fourier dual. Mode storage follows the FFT convention: index i holds
/// wavenumber i for i < n_modes/2 and i - n_modes otherwise.
struct GridSpec {
    int n_modes = 0;
    double half_width = 0.0;
    double dealias_fraction = 2.0 / 3.0;

    /// Frequency spacing pi / half_width.
    double dxi() const { return std::numbers::pi / half_width; }
    double dx() const { return 2.0 * half_width / n_modes; }
    std::size_t size() const { return static_cast<std::size_t>(n_modes); }

    int wavenumber(std::size_t i) const {
        const int k = static_cast<int>(i);
        return k < n_modes / 2 ? k : k - n_modes;
    }
    double frequency(std::size_t i) const { return wavenumber(i) * dxi(); }

    std::size_t index_of(int k) const {
        if (k < -n_modes / 2 || k >= n_modes / 2)
            throw std::out_of_range("wavenumber " + std::to_string(k) + " not on grid");
        return static_cast<std::size_t>(k >= 0 ? k : k + n_modes);
    }

    /// Largest represented |frequency| (the Nyquist frequency).
    double xi_max() const { return (n_modes / 2) * dxi(); }

    /// Mode survives dealiasing iff |k| < dealias_fraction * n_modes / 2.
    /// The Nyquist mode never survives.
    bool in_dealias_band(std::size_t i) const {
        const int k = wavenumber(i);
        if (k == -n_modes / 2) return false;
        return std::abs(k) < dealias_fraction * (n_modes / 2);
    }

    bool operator==(const GridSpec&) const = default;
};

inline GridSpec build_grid(int n_modes, double half_width, double dealias_fraction = 2.0 / 3.0) {
    if (n_modes % 2 != 0) throw std::invalid_argument("n_modes must be even");
    if (n_modes < 8) throw std::invalid_argument("n_modes must be at least 8");
    if (!(half_width > 0.0) || !std::isfinite(half_width))
        throw std::invalid_argument("half_width must be positive");
    if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0))
        throw std::invalid_argument("dealias_fraction must lie in (0, 1]");
    return GridSpec{n_modes, half_width, dealias_fraction};
}

inline void require_same_grid(const GridSpec& a, const GridSpec& b) {
    if (!(a == b)) throw std::invalid_argument("grid mismatch between spectral fields");
}

}  // namespace kvb
