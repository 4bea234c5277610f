#pragma once
// Ground-truth Bayesian confidences by exact enumeration over unobserved
// label assignments, plus the identity checks built on them.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "gal/csbm.hpp"
#include "gal/label_state.hpp"

namespace gal {

struct OracleOptions {
    std::uint64_t term_cap = 10'000'000;  // max C^{|U|} assignments
    LikelihoodMode mode = LikelihoodMode::correct;
};

// One full enumeration pass. log_bucket(t, c) = log-sum-exp of the joint over
// all assignments with y_{unobserved[t]} = c; log_z sums everything.
struct ExactPosterior {
    std::vector<int> unobserved;  // ascending node ids, rows of log_bucket
    Eigen::MatrixXd log_bucket;   // |U| x C
    double log_z = 0.0;
    double log_joint_gt = 0.0;    // joint at the ground-truth assignment of U
    std::vector<int> map_labels;  // argmax-joint assignment of U (diagnostics)
    double log_joint_map = 0.0;
};

// Throws EnumerationCapError ("use mean_field") when C^{|U|} exceeds the cap.
ExactPosterior enumerate_posterior(const CsbmParams& params, const Graph& g,
                                   const LabelState& state, const OracleOptions& opts = {});

// n x C marginals from an enumeration pass; observed rows are one-hot.
// Rows are softmax-normalized under the probability floor, so they are valid
// distributions even for fully suppressed buckets.
Eigen::MatrixXd marginals(const ExactPosterior& post, const LabelState& state);

// c^total(i, .) = p(y_i | A, X, y_O) for one node (wraps a full pass).
Eigen::VectorXd total_confidence(const CsbmParams& params, const Graph& g,
                                 const LabelState& state, int i, const OracleOptions& opts = {});

// Unnormalized log c^alea(i, c): log prior[c] + log p(X_i | c) +
// sum_{j != i} log p(A_ij | c, y_j). y_full supplies y_j; entry i is ignored.
Eigen::VectorXd aleatoric_log_scores(const CsbmParams& params, const Graph& g, int i,
                                     const std::vector<int>& y_full,
                                     LikelihoodMode mode = LikelihoodMode::correct);

// Softmax of the above: c^alea(i, .) given everyone else's label.
Eigen::VectorXd aleatoric_confidence(const CsbmParams& params, const Graph& g, int i,
                                     const std::vector<int>& y_full,
                                     LikelihoodMode mode = LikelihoodMode::correct);

// u^epi(i, c) = c^alea(i, c) / c^total(i, c); +inf when the total confidence
// vanishes. Other nodes' labels are taken from the graph's ground truth.
double epistemic_uncertainty(const CsbmParams& params, const Graph& g, const LabelState& state,
                             int i, int c, const OracleOptions& opts = {});

// Relative posterior gain of acquiring y_i = y_i^gt:
// p(y_{U-i} = gt | A, X, y_O, y_i = y_i^gt) / p(y_{U-i} = gt | A, X, y_O),
// both posteriors evaluated by enumeration and direct joint calls.
double relative_posterior_gain(const CsbmParams& params, const Graph& g, const LabelState& state, int i,
                   const OracleOptions& opts = {});

struct RatioConstancyReport {
    bool degenerate = false;   // |U| < 2: ratios are not comparable across nodes
    std::vector<double> r1;    // u^total(i, gt) / p(y_{U-i} = gt | ..., y_i = gt)
    std::vector<double> r2;    // u^alea(i, gt) / p(y_{U-i} = gt | ...)
    double cov_r1 = 0.0;       // coefficient of variation across i
    double cov_r2 = 0.0;
};

RatioConstancyReport ratio_constancy_checks(const CsbmParams& params, const Graph& g,
                                     const LabelState& state, const OracleOptions& opts = {});

// Per-node argmax decode of unobserved rows; ties go to the lowest class.
std::vector<int> bayes_predict(const Eigen::MatrixXd& marginal_rows, const LabelState& state);

}  // namespace gal
