#pragma once
// Contextual stochastic block model: parameter construction, sampling, and
// exact joint log-likelihood (correct and misspecified variants).

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "gal/graph.hpp"

namespace gal {

// Fully materialized generative process. Class c has mean class_means.row(c);
// an unordered pair {i,j} carries an edge with probability affiliation(y_i, y_j).
struct CsbmParams {
    int n = 0;
    int num_classes = 0;
    std::vector<double> prior;    // length C, nonnegative, sums to 1
    Eigen::MatrixXd affiliation;  // C x C symmetric, entries in [0,1]
    Eigen::MatrixXd class_means;  // C x d, rows pairwise equidistant
    double sigma_x = 1.0;         // feature noise std, > 0
    int feature_dim = 0;          // == class_means.cols()
};

// Throws ValidationError if any documented invariant fails.
void validate_params(const CsbmParams& params);

// Homogeneous affiliation: off-diagonal q = expected_degree*C/(n-1) * 1/(snr+C-1),
// diagonal p = snr*q. Throws InfeasibleParamsError if p or q leaves [0,1],
// unless clamp is set, in which case both are clamped into [0,1].
Eigen::MatrixXd build_affiliation(int n, int num_classes, double expected_degree, double snr,
                                  bool clamp = false);

// C points in d dims with all pairwise distances delta_x (regular simplex),
// rotated by a Haar-random orthogonal matrix derived from seed.
// Throws InfeasibleParamsError if d < C-1.
Eigen::MatrixXd build_class_means(int num_classes, int d, double delta_x, std::uint64_t seed);

// Feature dimension rule: max(C, ceil(n / ln^2 n)).
int feature_dim(int n, int num_classes);

// Convenience: uniform prior, homogeneous affiliation, simplex means.
// d_override = 0 picks feature_dim(n, C).
CsbmParams make_params(int n, int num_classes, double expected_degree, double snr,
                       double delta_x, double sigma_x, std::uint64_t means_seed,
                       int d_override = 0, bool clamp_affiliation = false);

// Draws labels, features, and edges; deterministic given seed.
Graph sample(const CsbmParams& params, std::uint64_t seed);

enum class LikelihoodMode { correct, misspecified };

// log p(A, X, y) under params. Correct mode covers every unordered pair;
// misspecified mode keeps edge factors only for pairs that carry an edge
// (feature and prior factors unchanged). Returns -inf when an impossible
// configuration is hit (never raises a floating-point exception).
double log_joint(const CsbmParams& params, const Graph& g, const std::vector<int>& y,
                 LikelihoodMode mode);

// n x C matrix of log N(X_i; mu_c, sigma_x^2 I); shared by the oracle and
// mean-field updates.
Eigen::MatrixXd feature_log_likelihood(const CsbmParams& params, const Eigen::MatrixXd& features);

}  // namespace gal
