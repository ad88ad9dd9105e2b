// herdsim: run one command from a JSON configuration.

#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "herd/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Herd and pack behavior population models"};
    herd::cli::Invocation inv;
    std::string config;
    std::string out = ".";
    std::uint64_t seed = 0;
    app.add_option("command", inv.command,
                   "simulate | equilibria | regimes | sweep | basins | compare | extinction-check")
        ->required();
    app.add_option("--config", config, "JSON configuration file")->required();
    app.add_option("--out", out, "output directory");
    auto* seed_opt = app.add_option("--seed", seed, "seed recorded in the run metadata");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : herd::cli::kExitConfig;
    }
    inv.config = config;
    inv.out = out;
    if (seed_opt->count() > 0) inv.seed = seed;
    return herd::cli::run(inv, std::cerr);
}
