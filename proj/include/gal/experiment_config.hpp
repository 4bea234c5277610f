#pragma once
// Structured experiment configuration: one JSON document drives generation,
// AL runs, verification, and the approximation-error sweep.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gal/al_harness.hpp"
#include "json.hpp"

namespace gal {

struct CsbmSourceConfig {
    int n = 0;
    int num_classes = 0;
    double expected_degree = 4.0;
    double snr = 2.0;        // structural SNR sigma_A = p/q
    double delta_x = 1.0;    // pairwise class-mean distance
    double sigma_x = 1.0;
    int feature_dim = 0;     // 0 applies the dimension rule
    bool clamp_affiliation = false;
    std::uint64_t seed = 1;  // used by the generate command
};

struct VerifyConfig {
    int instances = 50;
    int n_min = 4;
    int n_max = 8;
    std::vector<int> classes = {2, 3};
    double expected_degree = 1.5;  // keeps p <= 1 down to n = 4
    double snr = 2.0;
    double delta_x = 1.0;
    double sigma_x = 1.0;
    std::uint64_t seed = 7;
    double tolerance = 1e-8;
    bool inject_sign_flip = false;  // negative-control fixture for tests
};

struct ApproxErrorConfig {
    std::vector<int> ns = {6, 8, 10, 12};
    int samples = 5;
    int num_classes = 4;
    double expected_degree = 4.0;
    double snr = 2.0;
    double delta_x = 1.0;
    double sigma_x = 1.0;
    std::uint64_t seed = 1;
};

struct ExperimentConfig {
    enum class SourceKind { csbm, dataset };
    SourceKind source_kind = SourceKind::csbm;
    CsbmSourceConfig csbm;
    std::string dataset_path;
    bool normalize_dataset_features = true;

    std::vector<Strategy> strategies;
    int budget = 0;  // 0 picks 5 * C
    std::vector<SeedPair> seeds;
    double test_fraction = 0.2;
    SgcConfig classifier;
    MeanFieldConfig mean_field;
    std::uint64_t oracle_term_cap = 10'000'000;
    std::optional<DecoderKind> decoder;  // unset: per-strategy default
    InferenceKind decode_inference = InferenceKind::automatic;
    int candidate_cap = 0;
    double ppr_teleport = 0.15;
    int ppr_iterations = 100;
    std::string baseline = "random";

    VerifyConfig verify;
    ApproxErrorConfig approx_error;

    HarnessConfig harness() const;  // the run-facing slice of this config
};

// Strict parse: unknown keys and schema violations throw ParseError /
// ValidationError before any computation starts.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace gal
