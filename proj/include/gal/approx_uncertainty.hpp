#pragma once
// Practical epistemic-uncertainty scores built from auxiliary SGC fits:
// MP retrains with pseudo-labels for everyone but the candidate; ESP takes an
// expectation over single pseudo-label injections.

#include <Eigen/Dense>
#include <vector>

#include "gal/label_state.hpp"
#include "gal/sgc.hpp"

namespace gal {

struct PseudoLabels {
    std::vector<int> labels;  // length n; observed nodes carry ground truth
};

// argmax of the model's predictive rows (ties to the lowest class), with
// observed nodes overridden by their revealed labels.
PseudoLabels pseudo_labels(const SgcModel& model, const Eigen::MatrixXd& diffused,
                           const LabelState& state);

struct ApproxScoreConfig {
    SgcConfig sgc;
    int candidate_cap = 0;  // 0 scores every unobserved node; otherwise an
                            // evenly spaced subset of U of this size
    int jobs = 1;
};

struct ApproxScores {
    std::vector<int> candidates;      // scored nodes, ascending
    std::vector<double> score;        // parallel to candidates
    std::vector<int> aux_train_size;  // labels seen by each candidate's auxiliaries
};

// score(i) = f_aux_i(i, yhat_i) / f_base(i, yhat_i), the approximate
// aleatoric/total confidence ratio; the auxiliary trains on every node except
// i (pseudo-labels fill U - i). A failed auxiliary fit yields -inf and a
// warning on stderr.
ApproxScores mp_scores(const Graph& g, const LabelState& state, const ApproxScoreConfig& cfg = {});

// Log-domain score(i) = log sum_c [ sum_{j in U-i} log f_aux_{i,c}(j, ytilde_j)
//   + log f_base(i, c) ] + log f_base(i, yhat_i); each auxiliary trains on
// y_O plus the single injected label y_i = c. Scores are comparable within one
// acquisition round only.
ApproxScores esp_scores(const Graph& g, const LabelState& state, const ApproxScoreConfig& cfg = {});

}  // namespace gal
