#include "gal/csbm.hpp"

#include <cmath>
#include <string>

#include "gal/error.hpp"
#include "gal/logprob.hpp"
#include "gal/rng.hpp"

namespace gal {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Seed streams for the independent draws inside sample().
enum : std::uint64_t { kLabelStream = 1, kFeatureStream = 2, kEdgeStream = 3 };

double gaussian_log_norm(int d, double sigma) {
    return -0.5 * d * std::log(kTwoPi * sigma * sigma);
}

}  // namespace

void validate_params(const CsbmParams& params) {
    const int C = params.num_classes;
    if (params.n < 1) throw ValidationError("n must be >= 1");
    if (C < 1) throw ValidationError("num_classes must be >= 1");
    if (static_cast<int>(params.prior.size()) != C)
        throw ValidationError("prior has " + std::to_string(params.prior.size()) +
                              " entries for " + std::to_string(C) + " classes");
    double sum = 0.0;
    for (double p : params.prior) {
        if (!(p >= 0.0)) throw ValidationError("prior entries must be nonnegative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw ValidationError("prior sums to " + std::to_string(sum) + ", expected 1");
    if (params.affiliation.rows() != C || params.affiliation.cols() != C)
        throw ValidationError("affiliation must be C x C");
    for (int a = 0; a < C; ++a)
        for (int b = 0; b < C; ++b) {
            const double f = params.affiliation(a, b);
            if (!(f >= 0.0 && f <= 1.0))
                throw ValidationError("affiliation entries must lie in [0,1]");
            if (std::abs(f - params.affiliation(b, a)) > 1e-12)
                throw ValidationError("affiliation must be symmetric");
        }
    if (!(params.sigma_x > 0.0)) throw ValidationError("sigma_x must be > 0");
    if (params.class_means.rows() != C)
        throw ValidationError("class_means must have one row per class");
    if (params.class_means.cols() != params.feature_dim || params.feature_dim < 1)
        throw ValidationError("feature_dim must match class_means columns and be >= 1");
    if (C >= 2) {
        const double ref = (params.class_means.row(0) - params.class_means.row(1)).norm();
        for (int a = 0; a < C; ++a)
            for (int b = a + 1; b < C; ++b) {
                const double dist = (params.class_means.row(a) - params.class_means.row(b)).norm();
                if (std::abs(dist - ref) > 1e-9)
                    throw ValidationError("class means are not pairwise equidistant");
            }
    }
}

Eigen::MatrixXd build_affiliation(int n, int num_classes, double expected_degree, double snr,
                                  bool clamp) {
    if (n < 2) throw ValidationError("build_affiliation: n must be >= 2");
    if (num_classes < 2) throw ValidationError("build_affiliation: num_classes must be >= 2");
    if (!(expected_degree > 0.0)) throw ValidationError("build_affiliation: expected_degree must be > 0");
    if (!(snr > 0.0)) throw ValidationError("build_affiliation: snr must be > 0");

    double q = expected_degree * num_classes / (n - 1) / (snr + num_classes - 1);
    double p = snr * q;
    if (p > 1.0 || q > 1.0) {
        if (!clamp)
            throw InfeasibleParamsError("affiliation infeasible: p = " + std::to_string(p) +
                                        ", q = " + std::to_string(q) +
                                        " (expected degree too large for this n)");
        p = std::min(p, 1.0);
        q = std::min(q, 1.0);
    }
    Eigen::MatrixXd F = Eigen::MatrixXd::Constant(num_classes, num_classes, q);
    F.diagonal().setConstant(p);
    return F;
}

Eigen::MatrixXd build_class_means(int num_classes, int d, double delta_x, std::uint64_t seed) {
    if (num_classes < 1) throw ValidationError("build_class_means: num_classes must be >= 1");
    if (!(delta_x > 0.0)) throw ValidationError("build_class_means: delta_x must be > 0");
    if (d < num_classes - 1 || d < 1)
        throw InfeasibleParamsError("a regular simplex over " + std::to_string(num_classes) +
                                    " classes needs at least " + std::to_string(num_classes - 1) +
                                    " dimensions, got " + std::to_string(d));

    // Columns of the last C-1 Helmert rows give C unit-norm-deficient points
    // with all pairwise distances sqrt(2); scale to delta_x.
    Eigen::MatrixXd pre = Eigen::MatrixXd::Zero(num_classes, d);
    const double scale = delta_x / std::sqrt(2.0);
    for (int k = 1; k < num_classes; ++k) {
        const double denom = std::sqrt(static_cast<double>(k) * (k + 1));
        for (int j = 0; j < k; ++j) pre(j, k - 1) = scale / denom;
        pre(k, k - 1) = -scale * k / denom;
    }

    // Haar rotation: QR of a seeded Gaussian matrix, sign-corrected by diag(R).
    auto eng = make_engine(seed);
    Eigen::MatrixXd G(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) G(r, c) = gaussian(eng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
    Eigen::MatrixXd Q = qr.householderQ();
    for (int j = 0; j < d; ++j)
        if (qr.matrixQR()(j, j) < 0.0) Q.col(j) = -Q.col(j);
    return pre * Q;
}

int feature_dim(int n, int num_classes) {
    if (n < 2) throw ValidationError("feature_dim: n must be >= 2");
    const double ln = std::log(static_cast<double>(n));
    const int by_size = static_cast<int>(std::ceil(n / (ln * ln)));
    return std::max(num_classes, by_size);
}

CsbmParams make_params(int n, int num_classes, double expected_degree, double snr,
                       double delta_x, double sigma_x, std::uint64_t means_seed,
                       int d_override, bool clamp_affiliation) {
    CsbmParams params;
    params.n = n;
    params.num_classes = num_classes;
    params.prior.assign(static_cast<std::size_t>(num_classes), 1.0 / num_classes);
    params.affiliation = build_affiliation(n, num_classes, expected_degree, snr, clamp_affiliation);
    params.feature_dim = d_override > 0 ? d_override : feature_dim(n, num_classes);
    params.class_means = build_class_means(num_classes, params.feature_dim, delta_x, means_seed);
    params.sigma_x = sigma_x;
    validate_params(params);
    return params;
}

Graph sample(const CsbmParams& params, std::uint64_t seed) {
    validate_params(params);
    const int n = params.n;
    const int C = params.num_classes;
    const int d = params.feature_dim;

    std::vector<int> y(static_cast<std::size_t>(n));
    {
        auto eng = make_engine(derive_seed(seed, kLabelStream));
        for (int i = 0; i < n; ++i) {
            const double u = uniform_double(eng);
            double cum = 0.0;
            int c = C - 1;  // guard against cum rounding short of 1
            for (int k = 0; k < C; ++k) {
                cum += params.prior[static_cast<std::size_t>(k)];
                if (u < cum) {
                    c = k;
                    break;
                }
            }
            y[static_cast<std::size_t>(i)] = c;
        }
    }

    Eigen::MatrixXd X(n, d);
    {
        auto eng = make_engine(derive_seed(seed, kFeatureStream));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < d; ++j)
                X(i, j) = params.class_means(y[static_cast<std::size_t>(i)], j) +
                          params.sigma_x * gaussian(eng);
    }

    std::vector<std::pair<int, int>> edges;
    {
        auto eng = make_engine(derive_seed(seed, kEdgeStream));
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (uniform_double(eng) <
                    params.affiliation(y[static_cast<std::size_t>(i)], y[static_cast<std::size_t>(j)]))
                    edges.emplace_back(i, j);
    }

    return Graph(C, std::move(X), std::move(y), edges);
}

double log_joint(const CsbmParams& params, const Graph& g, const std::vector<int>& y,
                 LikelihoodMode mode) {
    validate_params(params);
    const int n = params.n;
    if (g.n() != n || g.feature_dim() != params.feature_dim)
        throw ValidationError("graph shape does not match params");
    if (static_cast<int>(y.size()) != n) throw ValidationError("label vector must cover every node");
    for (int yi : y)
        if (yi < 0 || yi >= params.num_classes) throw ValidationError("label out of range");

    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += std::log(params.prior[static_cast<std::size_t>(y[static_cast<std::size_t>(i)])]);

    const double log_norm = gaussian_log_norm(params.feature_dim, params.sigma_x);
    const double inv_two_var = 1.0 / (2.0 * params.sigma_x * params.sigma_x);
    for (int i = 0; i < n; ++i) {
        const auto diff = g.features().row(i) - params.class_means.row(y[static_cast<std::size_t>(i)]);
        acc += log_norm - diff.squaredNorm() * inv_two_var;
    }

    if (mode == LikelihoodMode::correct) {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const double f = params.affiliation(y[static_cast<std::size_t>(i)], y[static_cast<std::size_t>(j)]);
                acc += g.has_edge(i, j) ? std::log(f) : std::log1p(-f);
            }
    } else {
        for (int i = 0; i < n; ++i)
            for (int j : g.neighbors(i)) {
                if (j <= i) continue;
                acc += std::log(params.affiliation(y[static_cast<std::size_t>(i)], y[static_cast<std::size_t>(j)]));
            }
    }
    return acc;  // -inf propagates through the sums; no NaN is possible here
}

Eigen::MatrixXd feature_log_likelihood(const CsbmParams& params, const Eigen::MatrixXd& features) {
    if (features.cols() != params.feature_dim)
        throw ValidationError("feature matrix width does not match params");
    const double log_norm = gaussian_log_norm(params.feature_dim, params.sigma_x);
    const double inv_two_var = 1.0 / (2.0 * params.sigma_x * params.sigma_x);
    Eigen::MatrixXd out(features.rows(), params.num_classes);
    for (int c = 0; c < params.num_classes; ++c)
        out.col(c) = ((features.rowwise() - params.class_means.row(c)).rowwise().squaredNorm() *
                      -inv_two_var).array() + log_norm;
    return out;
}

}  // namespace gal
