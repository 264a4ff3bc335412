// degenlab <solve|sweep|verify|mms|report> <config> [--cells M] [--output dir] [--solution file]
#include "degenlab/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace degenlab;

    CLI::App app{"Degenerate-coercivity radial elliptic lab"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::optional<int> cells;
    std::optional<std::string> output;
    std::optional<std::string> solution;

    const std::pair<const char*, const char*> commands[] = {
        {"solve", "solve one problem and write the solution"},
        {"sweep", "run the parameter sweep of the [sweep] section"},
        {"verify", "run every applicable check; exit 1 if any fails"},
        {"mms", "mesh refinement study against a manufactured solution"},
        {"report", "regenerate summary.md from records.csv"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("config", config_path, "config file")->required();
        sub->add_option("--cells", cells, "override [mesh] cells");
        sub->add_option("--output", output, "override [output] directory");
        if (std::string(name) == "solve" || std::string(name) == "verify")
            sub->add_option("--solution", solution, "solution file (solve: write, verify: read)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    Config config;
    try {
        config = load_config(config_path);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return kExitIo;
    }
    if (cells) {
        if (*cells < 8) {
            std::cerr << "--cells must be >= 8\n";
            return kExitConfig;
        }
        config.mesh.cells = *cells;
    }
    if (output) config.output_directory = *output;

    return dispatch(command, config, DispatchOptions{solution}, std::cout);
}
