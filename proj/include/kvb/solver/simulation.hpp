#pragma once

#include "kvb/solver/etd.hpp"
#include "kvb/solver/model.hpp"
#include "kvb/solver/picard.hpp"
#include "kvb/solver/xs_norm.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace kvb {

struct MonitorSet {
    bool l2 = true;
    std::optional<double> hs;    ///< inhomogeneous H^s order
    std::optional<double> hdot;  ///< homogeneous H^s order
    std::optional<double> xs;    ///< running X^s norm order
    bool fourier_min = true;
    bool blowup = true;          ///< stop once the L2 norm crosses the threshold

    bool operator==(const MonitorSet&) const = default;
};

struct SimConfig {
    GridSpec grid;
    ModelParams params;
    double eta = 1.0;
    double t_end = 1.0;
    double dt = 1e-3;
    MonitorSet monitors;
    std::optional<double> blowup_threshold;  ///< absolute L2 level; default blowup_factor * ||u0||
    double blowup_factor = 1e12;
    int picard_iters = 0;   ///< > 0: cross-check the first output interval against Picard
    int picard_nodes = 65;
    int output_every = 1;   ///< record every n-th step
    bool keep_states = false;

    bool operator==(const SimConfig&) const = default;
};

struct PicardCheck {
    double horizon = 0.0;
    int iterations = 0;
    double sup_difference = 0.0;  ///< |ETD - final Picard iterate| at the horizon
    bool contracting = true;
};

struct TrajectoryReport {
    MonitorSet monitors;
    std::vector<double> times;
    std::vector<double> l2_norm, hs_norm, hdot_norm, xs_norm, fourier_min;
    std::vector<double> positivity_ratio;  ///< min_k Re u-hat / max_k |u-hat| per sample
    std::vector<SpectralField> states;     ///< only with keep_states
    bool blew_up = false;
    std::optional<double> t_blowup;
    long steps_taken = 0;
    double initial_l2 = 0.0;
    double blowup_threshold = 0.0;
    std::optional<PicardCheck> picard;
};

inline void validate(const SimConfig& c) {
    if (!(c.eta > 0.0)) throw std::invalid_argument("eta must be positive");
    if (!(c.t_end > 0.0)) throw std::invalid_argument("t_end must be positive");
    if (!(c.dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (!(c.dt < c.t_end)) throw std::invalid_argument("dt must be smaller than t_end");
    if (c.output_every < 1) throw std::invalid_argument("output_every must be >= 1");
    if (c.picard_iters < 0) throw std::invalid_argument("picard_iters must be >= 0");
    if (c.monitors.xs && !(*c.monitors.xs > -1.0)) throw std::invalid_argument("xs monitor needs s > -1");
    if (!(c.params.alpha >= 0.0)) throw std::invalid_argument("alpha must be nonnegative");
}

namespace detail {

inline double positivity_ratio(const SpectralField& u) {
    const double m = u.max_abs();
    return m > 0.0 ? fourier_min(u) / m : 0.0;
}

}  // namespace detail

/// Integrate the mild formulation with ETD2RK from the indicator datum.
/// Blow-up is reported, not thrown: the run stops at the first step whose L2
/// norm is not finite or exceeds the threshold.
inline TrajectoryReport run_simulation(const SimConfig& config) {
    validate(config);
    const auto u0 = initial_datum(config.grid, config.eta);
    const auto symbols = dissipation_symbol(config.grid, config.params.alpha, config.params.variant);

    TrajectoryReport r;
    r.monitors = config.monitors;
    r.initial_l2 = l2_norm(u0);
    r.blowup_threshold = config.blowup_threshold.value_or(config.blowup_factor * r.initial_l2);
    if (!(r.blowup_threshold > r.initial_l2))
        throw std::invalid_argument("blowup_threshold must exceed the initial L2 norm");

    std::optional<XsNormAccumulator> xs;
    if (config.monitors.xs) xs.emplace(*config.monitors.xs);

    auto record = [&](double t, const SpectralField& u, double l2) {
        r.times.push_back(t);
        if (xs) xs->add(t, u);
        if (config.monitors.l2) r.l2_norm.push_back(l2);
        if (config.monitors.hs) r.hs_norm.push_back(sobolev_norm(u, *config.monitors.hs, false));
        if (config.monitors.hdot) r.hdot_norm.push_back(sobolev_norm(u, *config.monitors.hdot, true));
        if (xs) r.xs_norm.push_back(xs->value());
        if (config.monitors.fourier_min) r.fourier_min.push_back(fourier_min(u));
        r.positivity_ratio.push_back(detail::positivity_ratio(u));
        if (config.keep_states) r.states.push_back(u);
    };

    const long full = static_cast<long>(std::floor(config.t_end / config.dt * (1 + 1e-12)));
    const double rest = config.t_end - full * config.dt;
    const bool partial = rest > 1e-9 * config.dt;
    const long total = full + (partial ? 1 : 0);

    const EtdStepper stepper(symbols, config.params, config.dt);
    std::optional<EtdStepper> last;
    if (partial) last.emplace(symbols, config.params, rest);

    SpectralField u = u0;
    record(0.0, u, r.initial_l2);
    std::optional<SpectralField> at_first_output;
    double first_output_time = 0.0;

    for (long s = 1; s <= total; ++s) {
        const bool is_last = s == total;
        u = (is_last && partial) ? last->step(u) : stepper.step(u);
        const double t = (is_last && partial) ? config.t_end : s * config.dt;
        r.steps_taken = s;
        const double l2 = l2_norm(u);
        const bool escaped = !std::isfinite(l2) || (config.monitors.blowup && l2 > r.blowup_threshold);
        if (escaped) {
            r.blew_up = true;
            r.t_blowup = t;
            if (std::isfinite(l2) && u.is_finite()) record(t, u, l2);
            break;
        }
        if (s % config.output_every == 0 || is_last) {
            record(t, u, l2);
            if (!at_first_output) {
                at_first_output = u;
                first_output_time = t;
            }
        }
    }

    if (config.picard_iters > 0 && at_first_output) {
        const auto pic = picard_iterate(u0, config.params, first_output_time, config.picard_iters,
                                        config.picard_nodes);
        r.picard = PicardCheck{first_output_time, config.picard_iters,
                               sup_mode_distance(pic.final_iterate().back(), *at_first_output),
                               pic.contracting};
    }
    return r;
}

}  // namespace kvb
