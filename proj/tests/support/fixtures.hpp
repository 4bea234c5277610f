#pragma once
// Small hand-built model instances shared across test files. Parameters are
// assembled field by field on purpose — the construction helpers under test
// are not used here.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "gal/csbm.hpp"
#include "gal/graph.hpp"

namespace testsupport {

// Homogeneous two-class parameters with explicit entries.
inline gal::CsbmParams hand_params_2c(int n, double p, double q, double delta, double sigma) {
    gal::CsbmParams params;
    params.n = n;
    params.num_classes = 2;
    params.prior = {0.5, 0.5};
    params.affiliation.resize(2, 2);
    params.affiliation << p, q, q, p;
    params.class_means.resize(2, 2);
    params.class_means << -delta / 2.0, 0.0, delta / 2.0, 0.0;
    params.sigma_x = sigma;
    params.feature_dim = 2;
    return params;
}

// Three classes in two feature dimensions (equilateral triangle, side delta).
inline gal::CsbmParams hand_params_3c(int n, double p, double q, double delta, double sigma) {
    gal::CsbmParams params;
    params.n = n;
    params.num_classes = 3;
    params.prior = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    params.affiliation.resize(3, 3);
    params.affiliation << p, q, q, q, p, q, q, q, p;
    params.class_means.resize(3, 2);
    const double h = delta * std::sqrt(3.0) / 2.0;
    params.class_means << 0.0, 0.0, delta, 0.0, delta / 2.0, h;
    params.class_means.rowwise() -= params.class_means.colwise().mean();
    params.sigma_x = sigma;
    params.feature_dim = 2;
    return params;
}

}  // namespace testsupport
