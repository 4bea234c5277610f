#pragma once
// SGC: feature diffusion through the normalized adjacency, then multinomial
// logistic regression on the diffused features.

#include <Eigen/Dense>
#include <vector>

#include "gal/graph.hpp"
#include "gal/label_state.hpp"

namespace gal {

struct SgcConfig {
    int diffusion_steps = 2;
    double l2_weight = 1.0;          // lambda; bias stays unregularized
    bool class_balanced = true;
    double solver_tolerance = 1e-6;  // max-abs gradient stop
    int max_solver_iterations = 1000;
    double energy_temperature = 1.0;
};

struct SgcModel {
    Eigen::MatrixXd weights;  // d x C
    Eigen::VectorXd bias;     // C
    bool converged = false;
    int iterations = 0;
};

// S_hat^k X with S_hat = D^{-1/2} (A + I) D^{-1/2}; k = 0 returns X.
Eigen::MatrixXd diffuse(const Graph& g, int k);

// Minimizes class-weighted cross-entropy + (lambda/2)||W||_F^2 over the given
// rows. Zero initialization unless init is supplied; the problem is convex, so
// refits are bit-identical and the optimum is initialization-independent.
// Class weight: |train| / (classes present * class count).
SgcModel fit(const Eigen::MatrixXd& diffused, const std::vector<int>& train_nodes,
             const std::vector<int>& train_labels, int num_classes, const SgcConfig& cfg = {},
             const SgcModel* init = nullptr);

// Row-softmax class probabilities for every row of diffused.
Eigen::MatrixXd predict_proba(const SgcModel& model, const Eigen::MatrixXd& diffused);

// Log-softmax variant; the approximation scores work in log space.
Eigen::MatrixXd log_predict_proba(const SgcModel& model, const Eigen::MatrixXd& diffused);

// -tau * log sum_c exp(logit_{i,c}); low values mean confident.
double energy_score(const SgcModel& model, const Eigen::MatrixXd& diffused, int i,
                    double tau = 1.0);

// Objective and packed gradient at (weights, bias); shared with tests that
// difference the objective numerically.
double sgc_objective(const Eigen::MatrixXd& diffused, const std::vector<int>& train_nodes,
                     const std::vector<int>& train_labels, int num_classes, const SgcConfig& cfg,
                     const Eigen::MatrixXd& weights, const Eigen::VectorXd& bias,
                     Eigen::VectorXd* grad_out = nullptr);

}  // namespace gal
