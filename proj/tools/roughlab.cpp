#include "roughlab/experiments.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"roughlab: rough path experiments driven by key = value configs"};
    roughlab::RunOptions options;
    std::uint64_t seed = 0;
    bool list = false;

    app.add_option("--config", options.config_path, "experiment configuration file");
    auto* seed_opt = app.add_option("--seed", seed, "overrides the seed in the config");
    app.add_option("--workers", options.workers, "worker threads; 0 uses every core")->check(CLI::NonNegativeNumber);
    app.add_option("--out", options.out_dir, "output directory")->envname("ROUGHLAB_OUT");
    app.add_flag("--list", list, "print the experiment catalogue");
    auto* list_cmd = app.add_subcommand("list", "print the experiment catalogue");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return roughlab::kExitUsage;
    }

    if (list || list_cmd->parsed()) {
        std::cout << roughlab::list_experiments();
        return roughlab::kExitOk;
    }
    if (options.config_path.empty()) {
        std::cerr << "missing --config (see --help)\n";
        return roughlab::kExitUsage;
    }
    if (seed_opt->count() > 0) options.seed = seed;
    return roughlab::run(options, std::cout, std::cerr);
}
