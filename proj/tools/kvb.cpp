#include "kvb/kvb.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

namespace {

struct Args {
    std::string config;
    std::string out;
    bool quiet = false;
};

CLI::App* add_mode(CLI::App& app, const std::string& name, const std::string& help, Args& a) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", a.config, "scenario file")->required();
    sub->add_option("--out", a.out, "output directory")->required();
    sub->add_flag("--quiet", a.quiet, "suppress progress messages");
    return sub;
}

kvb::ScenarioKind kind_of(const std::string& sub) {
    if (sub == "certify") return kvb::ScenarioKind::certify;
    if (sub == "simulate") return kvb::ScenarioKind::simulate;
    if (sub == "sweep") return kvb::ScenarioKind::sweep;
    return kvb::ScenarioKind::regress_global;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kuramoto-Velarde blow-up certificate and spectral solver"};
    app.set_version_flag("--version", kvb::tool_version);
    app.require_subcommand(1);
    Args a;
    add_mode(app, "certify", "exact blow-up certificate", a);
    add_mode(app, "simulate", "single pseudo-spectral run", a);
    add_mode(app, "sweep", "parameter sweep of escape times", a);
    add_mode(app, "regress", "energy bound regression in a global regime", a);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kvb::exit_config;
    }
    const std::string mode = app.get_subcommands().front()->get_name();

    kvb::Scenario scenario;
    try {
        scenario = kvb::parse_config(kvb::read_text(a.config));
        if (scenario.kind != kind_of(mode))
            throw kvb::ConfigSemanticError("scenario kind is " + kvb::to_string(scenario.kind) +
                                           " but the subcommand is " + mode);
    } catch (const kvb::IoError& e) {
        std::cerr << "kvb: " << e.what() << "\n";
        return kvb::exit_io;
    } catch (const std::exception& e) {
        std::cerr << "kvb: " << a.config << ": " << e.what() << "\n";
        return kvb::exit_config;
    }

    try {
        const auto rec = kvb::run_scenario(scenario, {a.out, a.quiet, &std::cerr});
        if (!a.quiet) std::cerr << "kvb: " << rec.outcome << " (" << rec.out_dir << ")\n";
        return rec.exit_code;
    } catch (const kvb::IoError& e) {
        std::cerr << "kvb: " << e.what() << "\n";
        return kvb::exit_io;
    } catch (const kvb::ConfigSemanticError& e) {
        std::cerr << "kvb: " << a.config << ": " << e.what() << "\n";
        return kvb::exit_config;
    } catch (const std::invalid_argument& e) {
        std::cerr << "kvb: " << a.config << ": " << e.what() << "\n";
        return kvb::exit_config;
    } catch (const std::exception& e) {
        std::cerr << "kvb: " << e.what() << "\n";
        return kvb::exit_check_failed;
    }
}
