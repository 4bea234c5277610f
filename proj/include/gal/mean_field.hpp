#pragma once
// Naive mean-field approximation of the label posterior, with ELBO and
// error-vs-exact tooling.

#include <Eigen/Dense>

#include "gal/csbm.hpp"
#include "gal/label_state.hpp"

namespace gal {

struct MeanFieldConfig {
    int max_iterations = 200;
    double tolerance = 1e-6;  // max-abs change of gamma per sweep
    enum class Schedule { sequential, parallel } schedule = Schedule::sequential;
    double damping = 0.5;  // parallel schedule only, in [0,1)
    enum class Init { uniform, feature_likelihood } init = Init::feature_likelihood;
    LikelihoodMode mode = LikelihoodMode::correct;
};

struct MeanFieldResult {
    Eigen::MatrixXd gamma;  // n x C, observed rows one-hot
    bool converged = false;
    int iterations = 0;
};

// Coordinate updates of log gamma_{i,c} = log prior[c] + log N(X_i; mu_c)
//   + sum_{j != i} sum_{c'} gamma_{j,c'} log p(A_ij | c, c'),
// rows renormalized each step; observed rows pinned one-hot. Non-convergence
// surfaces as converged=false, never an exception.
MeanFieldResult mean_field_marginals(const CsbmParams& params, const LabelState& state,
                                     const MeanFieldConfig& cfg = {});

// Variational lower bound for the same factorization; with one-hot gamma it
// reproduces log_joint exactly. Log factors are floored, so the value is
// always finite.
double elbo(const CsbmParams& params, const LabelState& state, const Eigen::MatrixXd& gamma,
            LikelihoodMode mode = LikelihoodMode::correct);

struct ApproxErrorStats {
    double median = 0.0;
    double mean = 0.0;
    double max = 0.0;
    int count = 0;  // |U| * C absolute gaps
};

// |gamma - exact marginal| over unobserved rows; needs enumeration to be
// feasible for this state (errors propagate from the oracle).
ApproxErrorStats approximation_error(const CsbmParams& params, const LabelState& state,
                                     const Eigen::MatrixXd& gamma);

}  // namespace gal
