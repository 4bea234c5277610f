// CLI front-end: subcommand + flag parsing, then dispatch into gal::cmd_*.
// Exit codes: 0 success, 1 run/verification failure, 2 invalid config/params.

#include <cstdio>
#include <exception>
#include <functional>
#include <string>

#include "CLI11.hpp"
#include "gal/commands.hpp"
#include "gal/error.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Ground-truth and approximate uncertainty benchmarks on CSBM graphs"};
    app.require_subcommand(1);

    gal::CommandOptions opts;
    std::function<int(const gal::CommandOptions&)> dispatch;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config_path, "Path to the JSON experiment config")
            ->required();
        sub->add_option("--out", opts.out_dir, "Output directory (created if missing)");
        sub->add_option("--jobs", opts.jobs, "Worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--seed-offset", opts.seed_offset, "Added to every configured seed");
        sub->add_flag("--verbose", opts.verbose, "Progress output on stdout");
    };

    auto* gen = app.add_subcommand("generate", "Sample a CSBM graph into a dataset directory");
    add_common(gen);
    gen->callback([&] { dispatch = gal::cmd_generate; });

    auto* run = app.add_subcommand("run", "Run the active-learning benchmark");
    add_common(run);
    run->callback([&] { dispatch = gal::cmd_run; });

    auto* verify = app.add_subcommand("verify", "Brute-force uncertainty identity checks");
    add_common(verify);
    verify->callback([&] { dispatch = gal::cmd_verify; });

    auto* approx = app.add_subcommand("approx-error", "Mean-field vs exact marginal error sweep");
    add_common(approx);
    approx->callback([&] { dispatch = gal::cmd_approx_error; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // help/version exit cleanly, bad flags are config errors
    }

    try {
        return dispatch(opts);
    } catch (const gal::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const gal::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const gal::InfeasibleParamsError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
