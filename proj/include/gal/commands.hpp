#pragma once
// Subcommand implementations behind the CLI front-end. Each returns a
// process exit code (0 success, 1 run/verification failure); configuration
// and parameter errors propagate as exceptions for the caller to map to
// exit code 2.

#include <cstdint>
#include <filesystem>

namespace gal {

struct CommandOptions {
    std::filesystem::path config_path;
    std::filesystem::path out_dir = ".";
    int jobs = 1;
    std::uint64_t seed_offset = 0;
    bool verbose = false;
};

// Sample a CSBM graph from the config's source block and write the dataset
// container plus provenance.json.
int cmd_generate(const CommandOptions& opts);

// Execute every strategy x seed-pair run, then write curves.csv and
// summary.json; failed runs land in failures.json and flip the exit code.
int cmd_run(const CommandOptions& opts);

// Brute-force check of the epistemic-gain identity and the proportionality
// constants on small instances; writes verify_report.json.
int cmd_verify(const CommandOptions& opts);

// Mean-field vs exact marginal error sweep; writes approx_error.csv.
int cmd_approx_error(const CommandOptions& opts);

}  // namespace gal
