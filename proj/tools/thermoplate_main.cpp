#include <algorithm>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "thermoplate/acceptance.hpp"
#include "thermoplate/common.hpp"
#include "thermoplate/config.hpp"
#include "thermoplate/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumeric = 2;

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    int threads = 0;
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON configuration file");
    cmd->add_option("--out", args.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--seed", args.seed, "override the RNG seed");
    cmd->add_option("--threads", args.threads, "worker threads (0 = env/default)");
    cmd->add_flag("--quiet", args.quiet, "suppress progress output");
}

thermoplate::config::Config resolve_config(const CommonArgs& args) {
    thermoplate::config::Config cfg = args.config_path.empty()
                                          ? thermoplate::config::default_config()
                                          : thermoplate::config::load_config(args.config_path);
    if (args.seed) {
        cfg.seed = *args.seed;
    }
    int threads = args.threads;
    if (threads <= 0) {
        if (const char* env = std::getenv("THERMOPLATE_THREADS")) {
            threads = std::atoi(env);
        }
    }
    if (threads <= 0) {
        // Results are bit-identical for any worker count (disjoint writes
        // and order-independent reductions only).
        threads = static_cast<int>(
            std::min(4u, std::max(1u, std::thread::hardware_concurrency())));
    }
    thermoplate::set_thread_count(threads);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"thermoplate: spectral simulator and operator diagnostics for the "
                 "thermoelastic plate system on rectangular product domains"};
    app.require_subcommand(1);

    CommonArgs args;
    CLI::App* symbol_cmd =
        app.add_subcommand("symbol-report", "sector report and resolvent sweep");
    CLI::App* mult_cmd =
        app.add_subcommand("multiplier-check", "Michlin sweeps and R-bound estimates");
    CLI::App* lin_cmd = app.add_subcommand("solve-linear", "linearized system solve");
    CLI::App* nl_cmd = app.add_subcommand("solve-nonlinear", "Picard solve of the full system");
    CLI::App* verify_cmd =
        app.add_subcommand("verify", "run the acceptance suite and write the output bundle");
    for (CLI::App* cmd : {symbol_cmd, mult_cmd, lin_cmd, nl_cmd, verify_cmd}) {
        add_common(cmd, args);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const thermoplate::config::Config cfg = resolve_config(args);
        if (symbol_cmd->parsed()) {
            thermoplate::pipeline::run_symbol_report(cfg, args.out_dir);
        } else if (mult_cmd->parsed()) {
            thermoplate::pipeline::run_multiplier_check(cfg, args.out_dir);
        } else if (lin_cmd->parsed()) {
            thermoplate::pipeline::run_solve_linear(cfg, args.out_dir);
        } else if (nl_cmd->parsed()) {
            thermoplate::pipeline::run_solve_nonlinear(cfg, args.out_dir);
        } else if (verify_cmd->parsed()) {
            thermoplate::acceptance::Options opts;
            opts.out_dir = args.out_dir;
            opts.seed = cfg.seed;
            opts.quiet = args.quiet;
            const auto results = thermoplate::acceptance::run_all(opts);
            return thermoplate::acceptance::all_passed(results) ? kExitOk : kExitNumeric;
        }
        if (!args.quiet) {
            std::cout << "wrote outputs to " << args.out_dir << "\n";
        }
        return kExitOk;
    } catch (const thermoplate::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const thermoplate::NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
}
