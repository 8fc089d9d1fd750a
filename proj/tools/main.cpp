#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "vhrd/commands.hpp"
#include "vhrd/errors.hpp"
#include "vhrd/scenario.hpp"

namespace {

using CommandFn = void (*)(const vhrd::Scenario&, const std::string&);

struct Dispatch {
    const char* name;
    const char* help;
    CommandFn fn;
};

constexpr Dispatch kCommands[] = {
    {"r0", "reproduction number report (direct, factored, kappa0, limits)", vhrd::cmd_r0},
    {"equilibria", "nodewise equilibrium profiles", vhrd::cmd_equilibria},
    {"simulate", "time integration until steady state", vhrd::cmd_simulate},
    {"sweep", "parameter sweep of r0 and kappa0", vhrd::cmd_sweep},
    {"ode", "well-mixed companion model trajectory", vhrd::cmd_ode},
    {"verify", "residual-check a previously written equilibria.csv", vhrd::cmd_verify},
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"vector-host reaction-diffusion laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    CommandFn selected = nullptr;
    for (const auto& cmd : kCommands) {
        CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
        sub->add_option("--config", config_path, "scenario JSON file")->required();
        sub->add_option("--out", out_dir, "output directory (default: current)");
        CommandFn fn = cmd.fn;
        sub->callback([&selected, fn]() { selected = fn; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        vhrd::Scenario scenario = vhrd::load_scenario(config_path);
        selected(scenario, out_dir);
        return 0;
    } catch (const vhrd::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const vhrd::SolverError& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
