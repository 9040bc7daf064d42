#include "cli_commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace hausdorff::cli;
    CLI::App app{"Hausdorff operator boundedness toolkit"};
    app.require_subcommand(1);

    Options opt;
    for (const auto& [name, help] : commands()) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", opt.config, "TOML run configuration")->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out, "report path (default: stdout)");
        sub->add_option("--csv", opt.csv, "growth table path (default: report path with .csv)");
        sub->add_option("--tol", opt.tol, "quadrature tolerance override");
        sub->add_option("--seed", opt.seed, "seed override");
        sub->add_option("--k", opt.k, "smoothness order override");
        sub->add_flag("--timings", opt.timings, "include wall-clock timings in the report");
        sub->callback([&opt, name = name] { opt.command = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitError;
    }
    return run(opt, std::cout, std::cerr);
}
