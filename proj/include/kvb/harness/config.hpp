#pragma once

#include "kvb/cascade/certificate.hpp"
#include "kvb/solver/simulation.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kvb {

enum class ScenarioKind { certify, simulate, sweep, regress_global };

inline std::string to_string(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::certify: return "certify";
        case ScenarioKind::simulate: return "simulate";
        case ScenarioKind::sweep: return "sweep";
        case ScenarioKind::regress_global: return "regress_global";
    }
    return "certify";
}

struct SweepAxis {
    std::string param;  ///< eta, gamma1, gamma2, alpha or dt
    std::vector<double> values;
    int workers = 0;    ///< 0: one per hardware thread, capped by the point count

    bool operator==(const SweepAxis&) const = default;
};

struct Scenario {
    ScenarioKind kind = ScenarioKind::certify;
    std::optional<SimConfig> sim;
    std::optional<CertifyConfig> cert;
    std::optional<SweepAxis> sweep;
    std::string output_dir;  ///< optional; the command line may override it
    bool plot = true;

    bool operator==(const Scenario&) const = default;
};

/// Syntax error, tagged with the 1-based line number.
class ConfigParseError : public std::runtime_error {
public:
    ConfigParseError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

/// Well-formed configuration that violates a constraint.
class ConfigSemanticError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline std::optional<double> parse_plain_real(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
    return v;
}

/// Reals as "1.5", "-2e-3", "2/3", "16pi", "16*pi", "pi/2".
inline std::optional<double> parse_real(std::string_view s) {
    s = trim(s);
    if (const auto slash = s.find('/'); slash != std::string_view::npos) {
        const auto a = parse_real(s.substr(0, slash));
        const auto b = parse_real(s.substr(slash + 1));
        if (!a || !b || *b == 0.0) return std::nullopt;
        return *a / *b;
    }
    if (s.size() >= 2 && s.substr(s.size() - 2) == "pi") {
        auto head = trim(s.substr(0, s.size() - 2));
        if (!head.empty() && head.back() == '*') head = trim(head.substr(0, head.size() - 1));
        if (head.empty()) return std::numbers::pi;
        if (head == "-") return -std::numbers::pi;
        const auto a = parse_plain_real(head);
        if (!a) return std::nullopt;
        return *a * std::numbers::pi;
    }
    return parse_plain_real(s);
}

inline std::optional<long> parse_int(std::string_view s) {
    s = trim(s);
    long v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

inline std::optional<bool> parse_bool(std::string_view s) {
    s = trim(s);
    if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
    if (s == "false" || s == "no" || s == "off" || s == "0") return false;
    return std::nullopt;
}

inline std::string fmt_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Entry {
    std::string value;
    int line = 0;
};

using Section = std::map<std::string, Entry>;

inline const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> k{
        {"scenario", {"kind", "output_dir", "plot"}},
        {"certify",
         {"n_max", "induction_n_max", "s", "log2_eta_sq", "gamma1", "gamma2", "samples", "t_points", "series_terms"}},
        {"simulate",
         {"n_modes", "half_width", "dealias", "variant", "alpha", "gamma1", "gamma2", "eta", "t_end", "dt",
          "output_every", "blowup_factor", "blowup_threshold", "picard_iters", "picard_nodes", "monitor_l2",
          "monitor_hs", "monitor_hdot", "monitor_xs", "monitor_fourier_min", "monitor_blowup"}},
        {"sweep", {"param", "values", "workers"}},
    };
    return k;
}

class SectionReader {
public:
    SectionReader(const std::string& name, const Section& s) : name_(name), s_(s) {}

    bool has(const std::string& key) const { return s_.count(key) > 0; }

    double real(const std::string& key, double fallback) const {
        const auto it = s_.find(key);
        if (it == s_.end()) return fallback;
        const auto v = parse_real(it->second.value);
        if (!v) throw ConfigParseError(it->second.line, "[" + name_ + "] " + key + ": expected a number, got '" +
                                                            it->second.value + "'");
        return *v;
    }

    std::optional<double> opt_real(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        return real(key, 0.0);
    }

    int integer(const std::string& key, int fallback) const {
        const auto it = s_.find(key);
        if (it == s_.end()) return fallback;
        const auto v = parse_int(it->second.value);
        if (!v || *v < INT32_MIN || *v > INT32_MAX)
            throw ConfigParseError(it->second.line, "[" + name_ + "] " + key + ": expected an integer, got '" +
                                                        it->second.value + "'");
        return static_cast<int>(*v);
    }

    bool boolean(const std::string& key, bool fallback) const {
        const auto it = s_.find(key);
        if (it == s_.end()) return fallback;
        const auto v = parse_bool(it->second.value);
        if (!v) throw ConfigParseError(it->second.line, "[" + name_ + "] " + key + ": expected true or false, got '" +
                                                            it->second.value + "'");
        return *v;
    }

    std::string text(const std::string& key, const std::string& fallback) const {
        const auto it = s_.find(key);
        return it == s_.end() ? fallback : it->second.value;
    }

    std::vector<double> reals(const std::string& key) const {
        const auto it = s_.find(key);
        if (it == s_.end()) return {};
        std::vector<double> out;
        std::string_view rest = it->second.value;
        while (true) {
            const auto comma = rest.find(',');
            const auto item = rest.substr(0, comma);
            const auto v = parse_real(item);
            if (!v) throw ConfigParseError(it->second.line, "[" + name_ + "] " + key + ": bad list item '" +
                                                                std::string(trim(item)) + "'");
            out.push_back(*v);
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        return out;
    }

    int line(const std::string& key) const {
        const auto it = s_.find(key);
        return it == s_.end() ? 0 : it->second.line;
    }

private:
    std::string name_;
    const Section& s_;
};

inline SimConfig read_sim(const SectionReader& r) {
    SimConfig c;
    const int n_modes = r.integer("n_modes", 512);
    const double half_width = r.real("half_width", 16 * std::numbers::pi);
    const double dealias_fraction = r.real("dealias", 2.0 / 3.0);
    try {
        c.grid = build_grid(n_modes, half_width, dealias_fraction);
    } catch (const std::invalid_argument& e) {
        throw ConfigSemanticError(std::string("[simulate] grid: ") + e.what());
    }
    try {
        c.params.variant = parse_variant(r.text("variant", "nonlocal"));
    } catch (const std::invalid_argument& e) {
        throw ConfigParseError(r.line("variant"), e.what());
    }
    c.params.alpha = r.real("alpha", 0.0);
    c.params.gamma1 = r.real("gamma1", 1.0);
    c.params.gamma2 = r.real("gamma2", -1.0);
    c.eta = r.real("eta", 1.0);
    c.t_end = r.real("t_end", 1.0);
    c.dt = r.real("dt", 1e-3);
    c.output_every = r.integer("output_every", 1);
    c.blowup_factor = r.real("blowup_factor", 1e12);
    c.blowup_threshold = r.opt_real("blowup_threshold");
    c.picard_iters = r.integer("picard_iters", 0);
    c.picard_nodes = r.integer("picard_nodes", 65);
    c.monitors.l2 = r.boolean("monitor_l2", true);
    c.monitors.hs = r.opt_real("monitor_hs");
    c.monitors.hdot = r.opt_real("monitor_hdot");
    c.monitors.xs = r.opt_real("monitor_xs");
    c.monitors.fourier_min = r.boolean("monitor_fourier_min", true);
    c.monitors.blowup = r.boolean("monitor_blowup", true);
    return c;
}

inline CertifyConfig read_cert(const SectionReader& r) {
    CertifyConfig c;
    c.n_max = r.integer("n_max", c.n_max);
    c.induction_n_max = r.integer("induction_n_max", c.induction_n_max);
    c.s = r.real("s", c.s);
    c.log2_eta_sq = r.real("log2_eta_sq", c.log2_eta_sq);
    c.gamma1 = r.real("gamma1", c.gamma1);
    c.gamma2 = r.real("gamma2", c.gamma2);
    c.samples = r.integer("samples", c.samples);
    c.t_points = r.integer("t_points", c.t_points);
    c.series_terms = r.integer("series_terms", c.series_terms);
    return c;
}

inline const std::set<std::string>& sweep_params() {
    static const std::set<std::string> p{"eta", "gamma1", "gamma2", "alpha", "dt"};
    return p;
}

}  // namespace detail

/// Apply one sweep value to a base configuration.
inline SimConfig apply_sweep_value(SimConfig c, const std::string& param, double v) {
    if (param == "eta") c.eta = v;
    else if (param == "gamma1") c.params.gamma1 = v;
    else if (param == "gamma2") c.params.gamma2 = v;
    else if (param == "alpha") c.params.alpha = v;
    else if (param == "dt") c.dt = v;
    else throw std::invalid_argument("unknown sweep parameter '" + param + "'");
    return c;
}

/// Constraint checks shared by the parser and run_scenario.
inline void validate(const Scenario& s) {
    auto need = [&](bool present, const char* what) {
        if (!present) throw ConfigSemanticError(std::string("kind ") + to_string(s.kind) + " requires " + what);
    };
    auto forbid = [&](bool present, const char* what) {
        if (present) throw ConfigSemanticError(std::string("kind ") + to_string(s.kind) + " does not use " + what);
    };
    auto check_sim = [](const SimConfig& c) {
        try {
            validate(c);
        } catch (const std::invalid_argument& e) {
            throw ConfigSemanticError(std::string("[simulate] ") + e.what());
        }
    };
    switch (s.kind) {
        case ScenarioKind::certify:
            need(s.cert.has_value(), "a [certify] section");
            forbid(s.sim.has_value(), "a [simulate] section");
            forbid(s.sweep.has_value(), "a [sweep] section");
            try {
                validate(*s.cert);
            } catch (const std::invalid_argument& e) {
                throw ConfigSemanticError(std::string("[certify] ") + e.what());
            }
            break;
        case ScenarioKind::simulate:
            need(s.sim.has_value(), "a [simulate] section");
            forbid(s.cert.has_value(), "a [certify] section");
            forbid(s.sweep.has_value(), "a [sweep] section");
            check_sim(*s.sim);
            break;
        case ScenarioKind::sweep:
            need(s.sim.has_value(), "a [simulate] section");
            need(s.sweep.has_value(), "a [sweep] section");
            forbid(s.cert.has_value(), "a [certify] section");
            if (!detail::sweep_params().count(s.sweep->param))
                throw ConfigSemanticError("[sweep] param must be one of eta, gamma1, gamma2, alpha, dt");
            if (s.sweep->values.empty()) throw ConfigSemanticError("[sweep] values must not be empty");
            if (s.sweep->workers < 0) throw ConfigSemanticError("[sweep] workers must be >= 0");
            for (double v : s.sweep->values) check_sim(apply_sweep_value(*s.sim, s.sweep->param, v));
            break;
        case ScenarioKind::regress_global:
            need(s.sim.has_value(), "a [simulate] section");
            forbid(s.cert.has_value(), "a [certify] section");
            forbid(s.sweep.has_value(), "a [sweep] section");
            check_sim(*s.sim);
            if (!energy_regime(s.sim->params))
                throw ConfigSemanticError("regress_global needs gamma2 = gamma1/2 or gamma2 = 0 (energy regime)");
            break;
    }
}

/// Parse `key = value` text with [section] headers and '#' comments.
inline Scenario parse_config(const std::string& text) {
    std::map<std::string, detail::Section> sections;
    std::map<std::string, int> section_line;
    std::string current;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigParseError(lineno, "unterminated section header");
            current = std::string(detail::trim(line.substr(1, line.size() - 2)));
            if (!detail::known_keys().count(current)) throw ConfigParseError(lineno, "unknown section [" + current + "]");
            if (sections.count(current)) throw ConfigParseError(lineno, "duplicate section [" + current + "]");
            sections[current];
            section_line[current] = lineno;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigParseError(lineno, "expected key = value");
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string value(detail::trim(line.substr(eq + 1)));
        if (key.empty()) throw ConfigParseError(lineno, "empty key");
        if (current.empty()) throw ConfigParseError(lineno, "key '" + key + "' outside of any section");
        if (!detail::known_keys().at(current).count(key))
            throw ConfigParseError(lineno, "unknown key '" + key + "' in [" + current + "]");
        if (value.empty()) throw ConfigParseError(lineno, "empty value for '" + key + "'");
        auto& sec = sections[current];
        if (sec.count(key)) throw ConfigParseError(lineno, "duplicate key '" + key + "'");
        sec[key] = {value, lineno};
    }

    if (!sections.count("scenario")) throw ConfigSemanticError("missing [scenario] section");
    const detail::SectionReader sc("scenario", sections["scenario"]);
    if (!sc.has("kind")) throw ConfigSemanticError("[scenario] kind is required");
    Scenario s;
    const std::string kind = sc.text("kind", "");
    if (kind == "certify") s.kind = ScenarioKind::certify;
    else if (kind == "simulate") s.kind = ScenarioKind::simulate;
    else if (kind == "sweep") s.kind = ScenarioKind::sweep;
    else if (kind == "regress" || kind == "regress_global") s.kind = ScenarioKind::regress_global;
    else throw ConfigParseError(sc.line("kind"), "unknown kind '" + kind + "'");
    s.output_dir = sc.text("output_dir", "");
    s.plot = sc.boolean("plot", true);

    if (sections.count("certify")) s.cert = detail::read_cert(detail::SectionReader("certify", sections["certify"]));
    if (sections.count("simulate")) s.sim = detail::read_sim(detail::SectionReader("simulate", sections["simulate"]));
    if (sections.count("sweep")) {
        const detail::SectionReader r("sweep", sections["sweep"]);
        SweepAxis a;
        a.param = r.text("param", "eta");
        a.values = r.reals("values");
        a.workers = r.integer("workers", 0);
        s.sweep = a;
    }
    validate(s);
    return s;
}

/// Canonical text form; parse_config(serialize(s)) == s.
inline std::string serialize(const Scenario& s) {
    using detail::fmt_real;
    std::ostringstream os;
    os << "[scenario]\n";
    os << "kind = " << to_string(s.kind) << "\n";
    if (!s.output_dir.empty()) os << "output_dir = " << s.output_dir << "\n";
    os << "plot = " << (s.plot ? "true" : "false") << "\n";
    if (s.cert) {
        const auto& c = *s.cert;
        os << "\n[certify]\n";
        os << "n_max = " << c.n_max << "\n";
        os << "induction_n_max = " << c.induction_n_max << "\n";
        os << "s = " << fmt_real(c.s) << "\n";
        os << "log2_eta_sq = " << fmt_real(c.log2_eta_sq) << "\n";
        os << "gamma1 = " << fmt_real(c.gamma1) << "\n";
        os << "gamma2 = " << fmt_real(c.gamma2) << "\n";
        os << "samples = " << c.samples << "\n";
        os << "t_points = " << c.t_points << "\n";
        os << "series_terms = " << c.series_terms << "\n";
    }
    if (s.sim) {
        const auto& c = *s.sim;
        os << "\n[simulate]\n";
        os << "n_modes = " << c.grid.n_modes << "\n";
        os << "half_width = " << fmt_real(c.grid.half_width) << "\n";
        os << "dealias = " << fmt_real(c.grid.dealias_fraction) << "\n";
        os << "variant = " << to_string(c.params.variant) << "\n";
        os << "alpha = " << fmt_real(c.params.alpha) << "\n";
        os << "gamma1 = " << fmt_real(c.params.gamma1) << "\n";
        os << "gamma2 = " << fmt_real(c.params.gamma2) << "\n";
        os << "eta = " << fmt_real(c.eta) << "\n";
        os << "t_end = " << fmt_real(c.t_end) << "\n";
        os << "dt = " << fmt_real(c.dt) << "\n";
        os << "output_every = " << c.output_every << "\n";
        os << "blowup_factor = " << fmt_real(c.blowup_factor) << "\n";
        if (c.blowup_threshold) os << "blowup_threshold = " << fmt_real(*c.blowup_threshold) << "\n";
        os << "picard_iters = " << c.picard_iters << "\n";
        os << "picard_nodes = " << c.picard_nodes << "\n";
        os << "monitor_l2 = " << (c.monitors.l2 ? "true" : "false") << "\n";
        if (c.monitors.hs) os << "monitor_hs = " << fmt_real(*c.monitors.hs) << "\n";
        if (c.monitors.hdot) os << "monitor_hdot = " << fmt_real(*c.monitors.hdot) << "\n";
        if (c.monitors.xs) os << "monitor_xs = " << fmt_real(*c.monitors.xs) << "\n";
        os << "monitor_fourier_min = " << (c.monitors.fourier_min ? "true" : "false") << "\n";
        os << "monitor_blowup = " << (c.monitors.blowup ? "true" : "false") << "\n";
    }
    if (s.sweep) {
        os << "\n[sweep]\n";
        os << "param = " << s.sweep->param << "\n";
        os << "values = ";
        for (std::size_t i = 0; i < s.sweep->values.size(); ++i)
            os << (i ? ", " : "") << fmt_real(s.sweep->values[i]);
        os << "\n";
        os << "workers = " << s.sweep->workers << "\n";
    }
    return os.str();
}

}  // namespace kvb
