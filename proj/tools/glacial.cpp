// Command-line front end for the glacial-cycle switching model.
//
//   glacial <command> [--config FILE] [--out DIR] [--set key=value ...]
//
// Exit status: 0 success, 1 usage or configuration error, 2 numerical failure.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "glacial/config.hpp"
#include "glacial/errors.hpp"
#include "glacial/experiments.hpp"

namespace {

using Command = std::vector<std::string> (*)(const glacial::RunConfig&, std::ostream&);

struct Invocation {
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> overrides;
    bool allow_inadmissible = false;
};

glacial::RunConfig resolve(const Invocation& inv) {
    glacial::RunConfig config = inv.config_path.empty() ? glacial::RunConfig{} : glacial::load_config(inv.config_path);
    for (const auto& s : inv.overrides) glacial::apply_override(config, s);
    if (!inv.out_dir.empty()) config.output.dir = inv.out_dir;
    if (inv.allow_inadmissible) config.orbit.allow_inadmissible_epsilon = true;
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Filippov glacial-cycle model: equilibria, trajectories, periodic orbits and sweeps"};
    app.require_subcommand(1);

    Invocation inv;
    Command selected = nullptr;
    auto add = [&](const char* name, const char* help, Command cmd) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", inv.config_path, "key = value configuration file")->check(CLI::ExistingFile);
        sub->add_option("--out", inv.out_dir, "output directory (overrides output.dir)");
        sub->add_option("--set", inv.overrides, "override a setting, key=value; repeatable")->allow_extra_args(false);
        sub->callback([&selected, cmd] { selected = cmd; });
        return sub;
    };
    add("equilibria", "equilibria of both regimes with stability and classification", glacial::cmd_equilibria);
    add("simulate", "integrate the switching system from simulate.{w,eta,xi}", glacial::cmd_simulate);
    add("orbit", "locate the periodic orbit and write one closed period", glacial::cmd_orbit)
        ->add_flag("--allow-inadmissible-epsilon", inv.allow_inadmissible,
                   "search even when epsilon is at or above the tangency bound");
    add("sweep-b0", "classify the long-term behaviour along a sweep of b0", glacial::cmd_sweep_b0);
    add("nullclines", "sample F, G, the tangency curves and gamma over [0, 1]", glacial::cmd_nullclines);
    add("check-epsilon", "report the tangency bound on epsilon", glacial::cmd_check_epsilon);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const glacial::RunConfig config = resolve(inv);
        const auto files = selected(config, std::cout);
        for (const auto& f : files) std::cout << "wrote " << config.output.dir << '/' << f << '\n';
        return 0;
    } catch (const glacial::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const glacial::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
