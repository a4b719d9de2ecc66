#pragma once

#include "kvb/solver/model.hpp"
#include "kvb/spectral/symbols.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace kvb {

struct PicardResult {
    std::vector<double> times;                          ///< quadrature nodes, times[0] = 0
    std::vector<std::vector<SpectralField>> iterates;   ///< iterates[k][i] = u_k(times[i]); k = 0 is the free evolution
    std::vector<double> successive_distance;            ///< sup_{t, xi} |u_k - u_{k-1}|, k = 1..n_iters
    bool contracting = true;                            ///< distances strictly decrease (or hit zero)
    bool finite = true;

    const std::vector<SpectralField>& final_iterate() const { return iterates.back(); }
};

/// Fixed-point iteration of the Duhamel map
///   u_{k+1}(t) = e^{-t m} u0 + int_0^t e^{-(t - tau) m} N(u_k(tau)) dtau
/// on n_quad uniform nodes in [0, t_end], the time integral by the composite
/// trapezoid rule. The zeroth iterate is the free evolution e^{-t m} u0.
inline PicardResult picard_iterate(const SpectralField& u0, const ModelParams& params, double t_end,
                                   int n_iters, int n_quad) {
    if (n_iters < 1) throw std::invalid_argument("picard_iterate needs n_iters >= 1");
    if (n_quad < 2) throw std::invalid_argument("picard_iterate needs n_quad >= 2");
    if (!(t_end > 0.0)) throw std::invalid_argument("t_end must be positive");

    const auto& g = u0.grid();
    const auto symbols = dissipation_symbol(g, params.alpha, params.variant);
    const int q = n_quad - 1;
    const double h = t_end / q;

    PicardResult r;
    r.times.resize(n_quad);
    for (int i = 0; i < n_quad; ++i) r.times[i] = i * h;

    // lag[l] = e^{-l h m}
    std::vector<SpectralMultiplier> lag;
    lag.reserve(n_quad);
    for (int l = 0; l <= q; ++l) lag.push_back(semigroup_factor(symbols, l * h));

    std::vector<SpectralField> free(n_quad);
    for (int i = 0; i <= q; ++i) free[i] = lag[i].apply(u0);
    r.iterates.push_back(free);

    for (int k = 1; k <= n_iters; ++k) {
        const auto& prev = r.iterates.back();
        std::vector<SpectralField> forcing(n_quad);
        for (int j = 0; j <= q; ++j) forcing[j] = nonlinearity(prev[j], params);

        std::vector<SpectralField> next(free);
        for (int i = 1; i <= q; ++i) {
            auto& target = next[i];
            for (int j = 0; j <= i; ++j) {
                const double w = (j == 0 || j == i) ? 0.5 * h : h;
                const auto& f = lag[i - j].factors;
                const auto& nj = forcing[j];
                for (std::size_t m = 0; m < target.size(); ++m) target[m] += w * f[m] * nj[m];
            }
        }

        double dist = 0.0;
        for (int i = 0; i <= q; ++i) {
            if (!next[i].is_finite()) r.finite = false;
            dist = std::max(dist, sup_mode_distance(next[i], prev[i]));
        }
        if (!std::isfinite(dist)) r.finite = false;
        if (!r.successive_distance.empty()) {
            const double last = r.successive_distance.back();
            if (!(dist < last || dist == 0.0)) r.contracting = false;
        }
        r.successive_distance.push_back(dist);
        r.iterates.push_back(std::move(next));
    }
    if (!r.finite) r.contracting = false;
    return r;
}

}  // namespace kvb
