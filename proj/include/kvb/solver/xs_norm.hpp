#pragma once

#include "kvb/spectral/operators.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>

namespace kvb {

/// Parameters of the well-posedness norm
///   sup_t ||u||_{H^s} + sup_{t>0} t^{|s|/4} ||u||_{L2} + sup_{t>0} t^{(|s|+1)/4} ||u_x||_{L2}
/// on (0, T0].
struct XsNormSpec {
    double s = 0.0;
    double T0 = 1.0;
};

inline void validate(const XsNormSpec& spec) {
    if (!(spec.s > -1.0)) throw std::invalid_argument("X^s norm needs s > -1");
    if (!(spec.T0 > 0.0)) throw std::invalid_argument("X^s norm needs T0 > 0");
}

/// Running X^s norm over samples fed in time order.
class XsNormAccumulator {
public:
    explicit XsNormAccumulator(double s) : s_(s) {
        if (!(s > -1.0)) throw std::invalid_argument("X^s norm needs s > -1");
    }

    void add(double t, const SpectralField& u) {
        const double a = std::abs(s_);
        sup_hs_ = std::max(sup_hs_, sobolev_norm(u, s_, false));
        sup_l2_ = std::max(sup_l2_, std::pow(t, a / 4.0) * l2_norm(u));
        sup_dx_ = std::max(sup_dx_, std::pow(t, (a + 1.0) / 4.0) * sobolev_norm(u, 1.0, true));
        ++count_;
    }

    double value() const { return sup_hs_ + sup_l2_ + sup_dx_; }
    std::size_t count() const { return count_; }

private:
    double s_;
    double sup_hs_ = 0.0, sup_l2_ = 0.0, sup_dx_ = 0.0;
    std::size_t count_ = 0;
};

/// X^s_{T0} norm of a sampled trajectory; samples after T0 are ignored.
/// With s = 0 the weight t^0 is 1, including at t = 0.
inline double xs_norm_diagnostic(std::span<const double> times, std::span<const SpectralField> states,
                                 const XsNormSpec& spec) {
    validate(spec);
    if (times.empty() || times.size() != states.size())
        throw std::invalid_argument("X^s diagnostic needs a nonempty trajectory");
    if (times.back() < spec.T0 * (1.0 - 1e-12))
        throw std::invalid_argument("trajectory does not reach T0");
    XsNormAccumulator acc(spec.s);
    for (std::size_t i = 0; i < times.size(); ++i)
        if (times[i] <= spec.T0 * (1.0 + 1e-12)) acc.add(times[i], states[i]);
    return acc.value();
}

}  // namespace kvb
