#include <CLI11.hpp>
#include <omp.h>

#include <iostream>
#include <optional>

#include "mswl/cli.hpp"
#include "mswl/error.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Charge transfer soliton experiments for the energy critical wave equation"};
    app.require_subcommand(0, 1);
    app.fallthrough();

    std::string config_path, out_dir;
    std::optional<std::uint64_t> seed;
    int threads = 0;
    bool print_config = false;
    app.add_option("--config", config_path, "JSON experiment config")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory (overrides the config)");
    app.add_option("--seed", seed, "random seed (overrides the config)");
    app.add_option("--threads", threads, "OpenMP threads, 0 keeps the runtime default")->check(CLI::NonNegativeNumber);
    app.add_flag("--print-config", print_config, "print the resolved config and exit");
    for (const auto& n : mswl::subcommand_names()) app.add_subcommand(n);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        mswl::ExperimentConfig cfg = config_path.empty() ? mswl::parse_config("{}") : mswl::load_config(config_path);
        if (!out_dir.empty()) cfg.output = out_dir;
        if (seed) cfg.seed = *seed;
        if (threads > 0) omp_set_num_threads(threads);
        if (print_config) {
            std::cout << mswl::config_json(cfg).dump(2) << '\n';
            return 0;
        }
        const auto subs = app.get_subcommands();
        if (subs.empty()) {
            std::cerr << app.help();
            return mswl::exit_code(mswl::ErrorKind::invalid_argument);
        }
        const auto report = mswl::run_subcommand(subs.front()->get_name(), cfg, cfg.output);
        std::cout << report.summary.dump() << '\n';
        for (const auto& a : report.artifacts) std::cout << a.string() << '\n';
        return 0;
    } catch (const mswl::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return mswl::exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
