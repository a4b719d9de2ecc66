#pragma once

#include "kvb/spectral/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

namespace kvb {

using Complex = std::complex<double>;

/// Fourier coefficients of a field on a periodic grid.
///
/// Coefficients are samples of the continuous transform, under the
/// convention u(x) = \int \hat u(\xi) e^{i x \xi} d\xi, so that the transform
/// of a product is the plain convolution of transforms. On the grid this
/// means u(x_j) = dxi * sum_k c_k e^{i xi_k x_j}.
class SpectralField {
public:
    SpectralField() = default;
    explicit SpectralField(GridSpec grid) : grid_(grid), coeffs_(grid.size()) {}
    SpectralField(GridSpec grid, std::vector<Complex> coeffs)
        : grid_(grid), coeffs_(std::move(coeffs)) {
        if (coeffs_.size() != grid_.size())
            throw std::invalid_argument("coefficient count does not match grid");
    }

    const GridSpec& grid() const { return grid_; }
    std::size_t size() const { return coeffs_.size(); }

    std::span<const Complex> coeffs() const { return coeffs_; }
    std::span<Complex> coeffs() { return coeffs_; }

    const Complex& operator[](std::size_t i) const { return coeffs_[i]; }
    Complex& operator[](std::size_t i) { return coeffs_[i]; }

    Complex at_wavenumber(int k) const { return coeffs_[grid_.index_of(k)]; }
    Complex& at_wavenumber(int k) { return coeffs_[grid_.index_of(k)]; }

    bool is_finite() const {
        return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Complex& c) {
            return std::isfinite(c.real()) && std::isfinite(c.imag());
        });
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
        return m;
    }

    SpectralField& operator+=(const SpectralField& o) {
        require_same_grid(grid_, o.grid_);
        for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
        return *this;
    }
    SpectralField& operator-=(const SpectralField& o) {
        require_same_grid(grid_, o.grid_);
        for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
        return *this;
    }
    SpectralField& operator*=(Complex s) {
        for (auto& c : coeffs_) c *= s;
        return *this;
    }

    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(Complex s, SpectralField a) { return a *= s; }

private:
    GridSpec grid_{};
    std::vector<Complex> coeffs_;
};

/// Largest coefficient-wise distance between two fields on the same grid.
inline double sup_mode_distance(const SpectralField& a, const SpectralField& b) {
    require_same_grid(a.grid(), b.grid());
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

namespace detail {

inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

// FFTW plans for one transform length. Planning is serialized because the
// FFTW planner is not reentrant; execution through the new-array interface is.
class FftPlans {
public:
    explicit FftPlans(int n) : n_(n) {
        std::vector<Complex> in(n), out(n);
        auto* pin = reinterpret_cast<fftw_complex*>(in.data());
        auto* pout = reinterpret_cast<fftw_complex*>(out.data());
        std::lock_guard lock(fftw_planner_mutex());
        forward_ = fftw_plan_dft_1d(n, pin, pout, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
        backward_ = fftw_plan_dft_1d(n, pin, pout, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    FftPlans(const FftPlans&) = delete;
    FftPlans& operator=(const FftPlans&) = delete;
    ~FftPlans() {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
    }

    // out_k = sum_j in_j e^{-2 pi i jk/n}; unnormalized.
    void forward(const Complex* in, Complex* out) const {
        fftw_execute_dft(forward_, const_cast<fftw_complex*>(reinterpret_cast<const fftw_complex*>(in)),
                         reinterpret_cast<fftw_complex*>(out));
    }
    // out_j = sum_k in_k e^{+2 pi i jk/n}; unnormalized.
    void backward(const Complex* in, Complex* out) const {
        fftw_execute_dft(backward_, const_cast<fftw_complex*>(reinterpret_cast<const fftw_complex*>(in)),
                         reinterpret_cast<fftw_complex*>(out));
    }
    int size() const { return n_; }

private:
    int n_;
    fftw_plan forward_{};
    fftw_plan backward_{};
};

inline const FftPlans& plans_for(int n) {
    thread_local std::map<int, std::unique_ptr<FftPlans>> cache;
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<FftPlans>(n);
    return *slot;
}

}  // namespace detail

/// Physical grid points x_j = -half_width + j dx.
inline std::vector<double> physical_points(const GridSpec& grid) {
    std::vector<double> x(grid.size());
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = -grid.half_width + j * grid.dx();
    return x;
}

/// Complex physical values; the imaginary part vanishes for Hermitian fields.
inline std::vector<Complex> to_physical_complex(const SpectralField& f) {
    const auto& g = f.grid();
    std::vector<Complex> shifted(g.size()), out(g.size());
    // e^{i xi_k x_j} = (-1)^k e^{2 pi i kj/N} because x_0 = -half_width.
    for (std::size_t i = 0; i < g.size(); ++i)
        shifted[i] = (i % 2 == 0 ? g.dxi() : -g.dxi()) * f[i];
    detail::plans_for(g.n_modes).backward(shifted.data(), out.data());
    return out;
}

inline std::vector<double> to_physical(const SpectralField& f) {
    const auto z = to_physical_complex(f);
    std::vector<double> u(z.size());
    std::transform(z.begin(), z.end(), u.begin(), [](const Complex& c) { return c.real(); });
    return u;
}

inline SpectralField to_spectral(const GridSpec& grid, std::span<const Complex> u) {
    if (u.size() != grid.size()) throw std::invalid_argument("sample count does not match grid");
    std::vector<Complex> out(grid.size());
    detail::plans_for(grid.n_modes).forward(u.data(), out.data());
    const double scale = 1.0 / (grid.n_modes * grid.dxi());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= (i % 2 == 0 ? scale : -scale);
    return SpectralField(grid, std::move(out));
}

inline SpectralField to_spectral(const GridSpec& grid, std::span<const double> u) {
    std::vector<Complex> z(u.begin(), u.end());
    return to_spectral(grid, std::span<const Complex>(z));
}

/// max_j |Im u(x_j)| / max_j |u(x_j)|; zero for the zero field.
inline double imaginary_residue(const SpectralField& f) {
    const auto z = to_physical_complex(f);
    double im = 0.0, mag = 0.0;
    for (const auto& c : z) {
        im = std::max(im, std::abs(c.imag()));
        mag = std::max(mag, std::abs(c));
    }
    return mag > 0.0 ? im / mag : 0.0;
}

/// Largest violation of c(-k) = conj(c(k)) over all paired modes.
inline double hermitian_defect(const SpectralField& f) {
    const auto& g = f.grid();
    double d = 0.0;
    for (int k = 1; k < g.n_modes / 2; ++k)
        d = std::max(d, std::abs(f.at_wavenumber(-k) - std::conj(f.at_wavenumber(k))));
    d = std::max(d, std::abs(f.at_wavenumber(0).imag()));
    return d;
}

/// Physical L2 norm scaled to match the spectral quadrature:
/// sqrt( sum_j |u_j|^2 dx / (2 pi) ) equals sqrt( sum_k |c_k|^2 dxi ).
inline double physical_l2_norm(const GridSpec& grid, std::span<const double> u) {
    double acc = 0.0;
    for (double v : u) acc += v * v;
    return std::sqrt(acc * grid.dx() / (2.0 * std::numbers::pi));
}

/// Zero every mode outside the dealiasing band.
inline SpectralField dealias(SpectralField f) {
    const auto& g = f.grid();
    for (std::size_t i = 0; i < f.size(); ++i)
        if (!g.in_dealias_band(i)) f[i] = 0.0;
    return f;
}

}  // namespace kvb
