#pragma once
// Pool-based active-learning protocol: splits, per-step retraining, accuracy
// curves, and multi-seed aggregation.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gal/acquisition.hpp"

namespace gal {

struct SeedPair {
    std::uint64_t split_seed = 0;
    std::uint64_t run_seed = 0;
};

struct StepRow {
    int step = 0;            // acquisitions made before this measurement
    int queried = -1;        // node chosen at this step; -1 on the final row
    int n_labeled = 0;       // |O| at measurement time
    double test_accuracy = 0.0;
};

struct RunRecord {
    std::string strategy;
    std::uint64_t split_seed = 0;
    std::uint64_t run_seed = 0;
    std::vector<StepRow> steps;  // budget + 1 rows
    double auc = 0.0;            // mean of step accuracies
    double final_accuracy = 0.0;
};

// Which classifier's accuracy the curve reports.
enum class DecoderKind { sgc, bayes };

struct HarnessConfig {
    int budget = 0;  // 0 picks 5 * C
    double test_fraction = 0.2;
    SgcConfig classifier;
    MeanFieldConfig mean_field;
    std::uint64_t oracle_term_cap = 10'000'000;
    // Unset: Bayes decoder for ground-truth strategies, SGC otherwise.
    std::optional<DecoderKind> decoder;
    InferenceKind decode_inference = InferenceKind::automatic;
    int candidate_cap = 0;  // mp/esp subsample knob
    double ppr_teleport = 0.15;
    int ppr_iterations = 100;
    int jobs_within_run = 1;
};

// Uniform random floor(fraction * n) node ids, ascending; warns on stderr if
// a class ends up entirely inside the test set.
std::vector<int> split_test(const Graph& g, std::uint64_t seed, double fraction);

// Fresh state with test nodes non-queryable and one uniformly drawn pool node
// revealed per class. Throws (naming the class) if a class has no pool node.
LabelState init_labels(const Graph& g, const std::vector<int>& test_nodes, std::uint64_t seed);

// One full acquisition trajectory. params may be null for loaded datasets;
// ground-truth strategies and the Bayes decoder then fail loudly. Accuracy is
// measured before the first query (step 0) and after each acquisition.
RunRecord run_al(const Graph& g, const CsbmParams* params, const Strategy& strategy,
                 const HarnessConfig& cfg, SeedPair seeds);

double normalized_auc(const RunRecord& record);

struct StrategySummary {
    std::string strategy;
    int runs = 0;
    double mean_auc = 0.0, std_auc = 0.0;
    double mean_final = 0.0, std_final = 0.0;
    bool has_baseline_delta = false;  // paired per-seed deltas vs the baseline
    double mean_delta_auc = 0.0, std_delta_auc = 0.0;
};

// Per-strategy moments plus paired AUC deltas against baseline_strategy
// (matched on seed pairs); strategies keep first-appearance order.
std::vector<StrategySummary> aggregate(const std::vector<RunRecord>& records,
                                       const std::string& baseline_strategy);

}  // namespace gal
