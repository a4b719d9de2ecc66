#pragma once

#include "kvb/cascade/certificate.hpp"
#include "kvb/harness/config.hpp"
#include "kvb/harness/csv.hpp"
#include "kvb/harness/svg_plot.hpp"
#include "kvb/solver/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace kvb {

inline constexpr const char* tool_version = "0.1.0";

enum ExitCode : int {
    exit_ok = 0,
    exit_check_failed = 1,  ///< a mathematical check or regression bound failed
    exit_config = 2,
    exit_io = 3,
};

struct RunOptions {
    std::string out_dir;          ///< overrides Scenario::output_dir when set
    bool quiet = false;
    std::ostream* log = &std::cerr;
};

struct RunRecord {
    std::string scenario_hash;
    std::string started_utc, finished_utc;
    std::string tool_version = kvb::tool_version;
    std::string outcome;
    int exit_code = exit_ok;
    std::string out_dir;
    std::vector<std::string> files;  ///< names relative to out_dir, in emission order
};

namespace detail {

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline std::string opt_cell(const std::vector<double>& v, std::size_t i) {
    return i < v.size() ? csv_real(v[i]) : std::string();
}

/// Configuration echo as '#'-prefixed lines, output location excluded.
inline std::string header_echo(const Scenario& s) {
    Scenario c = s;
    c.output_dir.clear();
    std::istringstream in(serialize(c));
    std::string line, out = "# kvb " + to_string(s.kind) + "\n";
    while (std::getline(in, line))
        if (!line.empty()) out += "# " + line + "\n";
    return out;
}

struct SweepPoint {
    std::size_t index = 0;
    double value = 0.0;
    bool blew_up = false;
    double t_blowup = 0.0;
    double t_final = 0.0;
    double max_l2 = 0.0;
    long steps = 0;
};

}  // namespace detail

/// FNV-1a of the canonical configuration text, output location excluded.
inline std::string scenario_hash(const Scenario& s) {
    Scenario c = s;
    c.output_dir.clear();
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(detail::fnv1a(serialize(c))));
    return buf;
}

/// Run one sweep point per value on a pool of worker threads; the result
/// is ordered by axis value regardless of completion order.
inline std::vector<detail::SweepPoint> run_sweep_points(const SimConfig& base, const SweepAxis& axis,
                                                        const std::function<void(const std::string&)>& say = {}) {
    const std::size_t n = axis.values.size();
    std::vector<detail::SweepPoint> out(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    std::mutex say_mutex;
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers = std::min<std::size_t>(n, axis.workers > 0 ? static_cast<std::size_t>(axis.workers) : hw);

    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                auto cfg = apply_sweep_value(base, axis.param, axis.values[i]);
                cfg.keep_states = false;
                const auto r = run_simulation(cfg);
                auto& p = out[i];
                p.index = i;
                p.value = axis.values[i];
                p.blew_up = r.blew_up;
                p.t_blowup = r.t_blowup.value_or(NAN);
                p.t_final = r.times.empty() ? 0.0 : r.times.back();
                for (double v : r.l2_norm) p.max_l2 = std::max(p.max_l2, v);
                p.steps = r.steps_taken;
                if (say) {
                    std::lock_guard lock(say_mutex);
                    say(axis.param + " = " + csv_real(axis.values[i]) + (r.blew_up ? " escaped" : " bounded"));
                }
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::stable_sort(out.begin(), out.end(),
                     [](const detail::SweepPoint& a, const detail::SweepPoint& b) { return a.value < b.value; });
    return out;
}

/// Execute a validated scenario and write its artifacts into the output
/// directory. CSV and report files are byte-identical across reruns of the
/// same configuration; only run_record.txt carries timestamps.
inline RunRecord run_scenario(const Scenario& s, const RunOptions& opt = {}) {
    validate(s);
    RunRecord rec;
    rec.started_utc = detail::utc_now();
    rec.scenario_hash = scenario_hash(s);
    rec.out_dir = !opt.out_dir.empty() ? opt.out_dir : (!s.output_dir.empty() ? s.output_dir : ".");
    std::error_code ec;
    std::filesystem::create_directories(rec.out_dir, ec);
    if (ec) throw IoError(rec.out_dir, "cannot create output directory (" + ec.message() + ")");

    auto path = [&](const std::string& name) {
        rec.files.push_back(name);
        return (std::filesystem::path(rec.out_dir) / name).string();
    };
    auto say = [&](const std::string& m) {
        if (!opt.quiet && opt.log) *opt.log << "[" << to_string(s.kind) << "] " << m << "\n";
    };
    const std::string echo = detail::header_echo(s);

    switch (s.kind) {
        case ScenarioKind::certify: {
            const auto report = build_certificate(*s.cert, say);
            std::string text = echo;
            for (const auto& l : report_lines(report)) text += l + "\n";
            write_text(path("report.txt"), text);

            CsvTable t(csv_schema::certificate);
            for (const auto& L : report.levels)
                t.add_row({std::to_string(L.n), L.supp_lo.get_str(), L.supp_hi.get_str(), detail::fmt_exact(L.l1),
                           detail::fmt_exact(L.l2sq), pow2q(-L.n).get_str(), csv_real(L.log2_f_tstar),
                           L.induction_min_slack ? csv_real(*L.induction_min_slack) : "",
                           L.induction_pass ? (*L.induction_pass ? "PASS" : "FAIL") : ""});
            t.write(path("certificate.csv"));

            if (s.plot) {
                PlotSeries bars{"induction min slack (log2)", {}, {}};
                for (const auto& L : report.levels)
                    if (L.induction_min_slack) {
                        bars.x.push_back(L.n);
                        bars.y.push_back(*L.induction_min_slack);
                    }
                if (!bars.x.empty())
                    emit_plot({bars}, path("slack.svg"),
                              {"induction step slack per level", "n", "log2 slack", false, true});
            }
            rec.exit_code = report.exit_code();
            rec.outcome = std::string("checks=") + (report.all_pass ? "all-pass" : "failed") +
                          " blowup=" + (report.blowup_established ? "established" : "not-established");
            break;
        }
        case ScenarioKind::simulate: {
            say("integrating to t = " + csv_real(s.sim->t_end));
            const auto r = run_simulation(*s.sim);
            CsvTable t(csv_schema::trajectory);
            for (std::size_t i = 0; i < r.times.size(); ++i)
                t.add_row({csv_real(r.times[i]), detail::opt_cell(r.l2_norm, i), detail::opt_cell(r.hs_norm, i),
                           detail::opt_cell(r.hdot_norm, i), detail::opt_cell(r.xs_norm, i),
                           detail::opt_cell(r.fourier_min, i), detail::opt_cell(r.positivity_ratio, i)});
            t.write(path("trajectory.csv"));

            std::string sum = echo;
            sum += "blew_up = " + std::string(r.blew_up ? "true" : "false") + "\n";
            sum += "t_blowup = " + (r.t_blowup ? csv_real(*r.t_blowup) : std::string("none")) + "\n";
            sum += "steps = " + std::to_string(r.steps_taken) + "\n";
            sum += "initial_l2 = " + csv_real(r.initial_l2) + "\n";
            sum += "blowup_threshold = " + csv_real(r.blowup_threshold) + "\n";
            if (r.picard) {
                sum += "picard_horizon = " + csv_real(r.picard->horizon) + "\n";
                sum += "picard_sup_difference = " + csv_real(r.picard->sup_difference) + "\n";
                sum += "picard_contracting = " + std::string(r.picard->contracting ? "true" : "false") + "\n";
            }
            write_text(path("summary.txt"), sum);
            if (s.plot && !r.l2_norm.empty())
                emit_plot({{"L2 norm", r.times, r.l2_norm}}, path("norms.svg"),
                          {"L2 norm", "t", "||u||", true, false});
            rec.outcome = r.blew_up ? "escaped at t = " + csv_real(*r.t_blowup) : "completed";
            break;
        }
        case ScenarioKind::sweep: {
            const auto pts = run_sweep_points(*s.sim, *s.sweep, say);
            CsvTable t(csv_schema::sweep);
            PlotSeries ser{"escape time", {}, {}};
            for (const auto& p : pts) {
                t.add_row({s.sweep->param, csv_real(p.value), p.blew_up ? "1" : "0",
                           p.blew_up ? csv_real(p.t_blowup) : "", csv_real(p.t_final), csv_real(p.max_l2),
                           std::to_string(p.steps)});
                if (p.blew_up) {
                    ser.x.push_back(p.value);
                    ser.y.push_back(p.t_blowup);
                }
            }
            t.write(path("sweep.csv"));
            if (s.plot && !ser.x.empty())
                emit_plot({ser}, path("sweep.svg"), {"threshold escape time", s.sweep->param, "t", false, false});
            const auto escaped = std::count_if(pts.begin(), pts.end(), [](const auto& p) { return p.blew_up; });
            rec.outcome = std::to_string(escaped) + " of " + std::to_string(pts.size()) + " points escaped";
            break;
        }
        case ScenarioKind::regress_global: {
            auto cfg = *s.sim;
            cfg.monitors.l2 = true;
            cfg.monitors.hdot = 1.0;
            say("integrating to t = " + csv_real(cfg.t_end));
            const auto r = run_simulation(cfg);
            const double l0 = r.l2_norm.front() * r.l2_norm.front();
            const double d0 = r.hdot_norm.front() * r.hdot_norm.front();
            CsvTable t(csv_schema::regress);
            bool ok = !r.blew_up;
            double worst = INFINITY;
            PlotSeries val{"||u||^2", {}, {}}, bound{"||u0||^2 e^{4t}", {}, {}};
            for (std::size_t i = 0; i < r.times.size(); ++i) {
                const double g = std::exp(4.0 * r.times[i]);
                const double l = r.l2_norm[i] * r.l2_norm[i], d = r.hdot_norm[i] * r.hdot_norm[i];
                const double lb = l0 * g, db = d0 * g;
                const double lm = lb - l, dm = db - d;
                // margins are compared with a rounding allowance relative to the bound
                ok = ok && lm >= -1e-12 * lb && dm >= -1e-12 * db;
                worst = std::min(worst, lm / lb);
                t.add_row({csv_real(r.times[i]), csv_real(l), csv_real(lb), csv_real(lm), csv_real(d), csv_real(db),
                           csv_real(dm)});
                val.x.push_back(r.times[i]);
                val.y.push_back(l);
                bound.x.push_back(r.times[i]);
                bound.y.push_back(lb);
            }
            t.write(path("regress.csv"));
            if (s.plot) emit_plot({val, bound}, path("regress.svg"), {"energy bound", "t", "||u||^2", true, false});
            rec.exit_code = ok ? exit_ok : exit_check_failed;
            rec.outcome = std::string(ok ? "bound holds" : "bound violated") +
                          " min_relative_margin=" + csv_real(worst) + (r.blew_up ? " escaped" : "");
            break;
        }
    }

    rec.finished_utc = detail::utc_now();
    std::string rr;
    rr += "scenario_hash = " + rec.scenario_hash + "\n";
    rr += "kind = " + to_string(s.kind) + "\n";
    rr += "tool_version = " + rec.tool_version + "\n";
    rr += "started = " + rec.started_utc + "\n";
    rr += "finished = " + rec.finished_utc + "\n";
    rr += "outcome = " + rec.outcome + "\n";
    rr += "exit_code = " + std::to_string(rec.exit_code) + "\n";
    for (const auto& f : rec.files) rr += "file = " + f + "\n";
    write_text((std::filesystem::path(rec.out_dir) / "run_record.txt").string(), rr);
    say(rec.outcome);
    return rec;
}

}  // namespace kvb
