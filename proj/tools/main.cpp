#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"latinhib: analysis and simulation of compartmental lateral-inhibition networks"};
    app.require_subcommand(1);

    std::string config;
    latinhib::cli::CommandOptions opt;
    std::string out_dir = ".";

    const std::pair<const char*, const char*> commands[] = {
        {"analyze", "fixed points of the reduced maps and the patterning verdict"},
        {"simulate", "integrate the full network from the seeded start"},
        {"sweep", "patterning region over p_Ri and channel length"},
        {"validate", "run the property checks on the configured network"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("config", config, "JSON config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", opt.seed, "seed for picking the perturbed compartment (0: first A)");
        sub->add_option("--threads", opt.threads, "worker threads for sweeps (0: all cores)");
        sub->add_option("--out-dir", out_dir, "directory for CSV/JSON output");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : latinhib::cli::exit_config;
    }

    opt.out_dir = out_dir;
    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return latinhib::cli::run(command, config, opt, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
