#include <iostream>

#include <CLI11.hpp>

#include "cli/commands.hpp"

#ifndef PAIRDEG_VERSION
#define PAIRDEG_VERSION "0.0.0"
#endif

namespace {

enum Exit { kOk = 0, kNumeric = 1, kConfig = 2 };

}  // namespace

int main(int argc, char** argv) {
    using namespace pairdeg;

    CLI::App app{"Degeneracies of the complex-coupled multi-level pairing model"};
    app.set_version_flag("--version", PAIRDEG_VERSION);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    int threads = 1;
    app.add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

    struct Command {
        const char* name;
        const char* help;
        int (*run)(const cli::CommandContext&);
    };
    const Command commands[] = {
        {"atlas", "classified degeneracies and |D(g)| heatmap", cli::cmd_atlas},
        {"sweep", "degeneracy trajectories over gamma", cli::cmd_sweep},
        {"encircle", "phases and periods around a loop", cli::cmd_encircle},
        {"cut", "spectrum and pairing energies along a cut", cli::cmd_cut},
        {"selftest", "run the reproduction checks", cli::cmd_selftest},
    };
    for (const auto& c : commands) {
        auto* sub = app.add_subcommand(c.name, c.help);
        // Global flags are accepted after the subcommand name too.
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        cli::CommandContext ctx;
        ctx.config = config_path.empty() ? cli::RunConfig{} : cli::load_config(config_path);
        ctx.out_dir = out_dir;
        ctx.threads = threads;
        ctx.meta = OutputMeta{"pairdeg", PAIRDEG_VERSION, cli::config_hash(ctx.config)};
        ctx.log = &std::cout;
        for (const auto& c : commands)
            if (app.got_subcommand(c.name)) return c.run(ctx);
    } catch (const cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const InvalidModel& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const NumericFailure& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumeric;
    }
    return kOk;
}
