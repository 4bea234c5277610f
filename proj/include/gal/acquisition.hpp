#pragma once
// Acquisition strategies: one uniform entry point (next_query) over the
// ground-truth scorers, classifier-based scorers, and structural baselines.

#include <Eigen/Dense>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gal/approx_uncertainty.hpp"
#include "gal/exact_oracle.hpp"
#include "gal/label_state.hpp"
#include "gal/mean_field.hpp"
#include "gal/sgc.hpp"

namespace gal {

enum class StrategyKind {
    random,
    gt_epistemic,
    gt_total,
    gt_aleatoric,
    gt_epistemic_misspecified,
    predictive_aleatoric,
    energy,
    mp,
    esp,
    degree,
    ppr,
    coreset_features,
    coreset_ppr,
};

// Inference backend for the gt_* scorers (and the Bayes decoder).
// automatic picks exact when the enumeration fits the term cap.
enum class InferenceKind { automatic, exact, mean_field };

struct Strategy {
    StrategyKind kind = StrategyKind::random;
    InferenceKind inference = InferenceKind::automatic;
};

StrategyKind strategy_kind_from_string(const std::string& name);
std::string to_string(StrategyKind kind);
bool is_ground_truth(StrategyKind kind);

// Shared knobs and lazily supplied collaborators for next_query.
struct StrategyContext {
    const CsbmParams* params = nullptr;        // required for gt_* kinds
    std::uint64_t oracle_term_cap = 10'000'000;
    MeanFieldConfig mean_field;
    const SgcModel* model = nullptr;           // required for predictive kinds
    const Eigen::MatrixXd* diffused = nullptr;
    SgcConfig sgc;                             // mp/esp auxiliary fits
    int jobs = 1;
    int candidate_cap = 0;                     // mp/esp subsample knob
    double ppr_teleport = 0.15;
    int ppr_iterations = 100;
};

struct ScoredNodes {
    std::vector<int> nodes;      // ascending subset of U
    std::vector<double> score;   // higher = queried first
};

// u^epi / u^total / u^alea at the ground-truth label of each unobserved node;
// the misspecified kind recomputes everything under the present-edges-only
// likelihood. Falls back to mean-field when enumeration is infeasible (or
// always, when inference says so).
ScoredNodes gt_scores(const Strategy& strategy, const CsbmParams& params, const LabelState& state,
                      std::uint64_t term_cap, const MeanFieldConfig& mf_cfg);

// predictive_aleatoric: -max_c p_{i,c}; energy: -tau log sum exp(logits).
ScoredNodes predictive_scores(StrategyKind kind, const SgcModel& model,
                              const Eigen::MatrixXd& diffused, const LabelState& state,
                              double tau);

// degree: node degree; ppr: global uniform-teleport PageRank mass.
ScoredNodes structural_scores(StrategyKind kind, const Graph& g, const LabelState& state,
                              double teleport, int iterations);

// k-center greedy step: score(i) = min over observed o of dist(i, o), with
// dist Euclidean on features or 1/(ppr_o(i) + 1e-12).
ScoredNodes coreset_scores(StrategyKind kind, const Graph& g, const LabelState& state,
                           double teleport, int iterations);
int coreset_pick(StrategyKind kind, const Graph& g, const LabelState& state, double teleport,
                 int iterations);

// Picks the next node to label from the queryable pool: argmax score with
// lowest-index tie-break, or a uniform draw for random. Throws when the pool
// is empty.
int next_query(const Strategy& strategy, const Graph& g, const LabelState& state,
               const StrategyContext& ctx, std::mt19937_64& rng);

}  // namespace gal
