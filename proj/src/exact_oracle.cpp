#include "gal/exact_oracle.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "gal/error.hpp"
#include "gal/logprob.hpp"

namespace gal {
namespace {

constexpr double kPosInf = std::numeric_limits<double>::infinity();

void check_instance(const CsbmParams& params, const Graph& g, const LabelState& state) {
    validate_params(params);
    if (g.n() != params.n || g.num_classes() != params.num_classes ||
        g.feature_dim() != params.feature_dim)
        throw ValidationError("graph shape does not match params");
    if (state.n() != g.n()) throw ValidationError("label state does not match graph");
}

// Pairwise log factor between classes a and b for a pair with/without an edge.
struct EdgeTables {
    Eigen::MatrixXd log_f;     // log F
    Eigen::MatrixXd log_1m_f;  // log(1 - F); zero matrix in misspecified mode

    EdgeTables(const CsbmParams& params, LikelihoodMode mode) {
        const int C = params.num_classes;
        log_f.resize(C, C);
        log_1m_f.resize(C, C);
        for (int a = 0; a < C; ++a)
            for (int b = 0; b < C; ++b) {
                log_f(a, b) = std::log(params.affiliation(a, b));
                log_1m_f(a, b) = mode == LikelihoodMode::correct
                                     ? std::log1p(-params.affiliation(a, b))
                                     : 0.0;
            }
    }

    double term(bool edge, int a, int b) const { return edge ? log_f(a, b) : log_1m_f(a, b); }
};

Eigen::VectorXd softmax(const Eigen::VectorXd& log_scores) {
    Eigen::VectorXd out(log_scores.size());
    const double m = log_scores.maxCoeff();
    if (m == kNegInf) {
        out.setConstant(1.0 / static_cast<double>(log_scores.size()));
        return out;
    }
    out = (log_scores.array() - m).exp();
    out /= out.sum();
    return out;
}

// log-sum-exp over c of log_joint with y_i := c, everyone else per y_base.
double lse_over_classes(const CsbmParams& params, const Graph& g, std::vector<int> y_base, int i,
                        LikelihoodMode mode) {
    LogSumAccumulator acc;
    for (int c = 0; c < params.num_classes; ++c) {
        y_base[static_cast<std::size_t>(i)] = c;
        acc.add(log_joint(params, g, y_base, mode));
    }
    return acc.value();
}

}  // namespace

ExactPosterior enumerate_posterior(const CsbmParams& params, const Graph& g,
                                   const LabelState& state, const OracleOptions& opts) {
    check_instance(params, g, state);
    const auto U = state.unobserved();
    const auto O = state.observed();
    const int m = static_cast<int>(U.size());
    const int C = params.num_classes;

    std::uint64_t terms = 1;
    for (int t = 0; t < m; ++t) {
        if (terms > opts.term_cap / static_cast<std::uint64_t>(C))
            throw EnumerationCapError("exact enumeration needs C^" + std::to_string(m) +
                                      " terms, over the cap of " + std::to_string(opts.term_cap) +
                                      "; use mean_field inference instead");
        terms *= static_cast<std::uint64_t>(C);
    }

    const EdgeTables tables(params, opts.mode);
    const Eigen::MatrixXd feat = feature_log_likelihood(params, g.features());
    std::vector<double> log_prior(static_cast<std::size_t>(C));
    for (int c = 0; c < C; ++c) log_prior[static_cast<std::size_t>(c)] = std::log(params.prior[static_cast<std::size_t>(c)]);

    // Constant part: observed unaries and observed-observed pair factors.
    double base = 0.0;
    for (int j : O) base += log_prior[static_cast<std::size_t>(g.label(j))] + feat(j, g.label(j));
    for (std::size_t a = 0; a < O.size(); ++a)
        for (std::size_t b = a + 1; b < O.size(); ++b)
            base += tables.term(g.has_edge(O[a], O[b]), g.label(O[a]), g.label(O[b]));

    // Unary for unobserved node t: prior + feature + factors against O.
    Eigen::MatrixXd unary(m, C);
    for (int t = 0; t < m; ++t)
        for (int c = 0; c < C; ++c) {
            double u = log_prior[static_cast<std::size_t>(c)] + feat(U[static_cast<std::size_t>(t)], c);
            for (int j : O) u += tables.term(g.has_edge(U[static_cast<std::size_t>(t)], j), c, g.label(j));
            unary(t, c) = u;
        }

    // Pair factor tables among unobserved nodes, indexed (t, s<t).
    std::vector<std::vector<Eigen::MatrixXd>> pair(static_cast<std::size_t>(m));
    for (int t = 0; t < m; ++t) {
        pair[static_cast<std::size_t>(t)].resize(static_cast<std::size_t>(t));
        for (int s = 0; s < t; ++s) {
            Eigen::MatrixXd tab(C, C);
            const bool edge = g.has_edge(U[static_cast<std::size_t>(t)], U[static_cast<std::size_t>(s)]);
            for (int a = 0; a < C; ++a)
                for (int b = 0; b < C; ++b) tab(a, b) = tables.term(edge, a, b);
            pair[static_cast<std::size_t>(t)][static_cast<std::size_t>(s)] = std::move(tab);
        }
    }

    std::vector<LogSumAccumulator> bucket(static_cast<std::size_t>(m * C));
    LogSumAccumulator z_acc;
    std::vector<int> assign(static_cast<std::size_t>(m), 0);
    std::vector<int> best_assign(static_cast<std::size_t>(m), 0);
    double best = kNegInf;
    bool any_leaf = false;

    // Depth-first over assignments, classes ascending: fixed summation order.
    std::function<void(int, double)> visit = [&](int t, double partial) {
        if (t == m) {
            any_leaf = true;
            z_acc.add(partial);
            for (int s = 0; s < m; ++s)
                bucket[static_cast<std::size_t>(s * C + assign[static_cast<std::size_t>(s)])].add(partial);
            if (partial > best) {
                best = partial;
                best_assign = assign;
            }
            return;
        }
        for (int c = 0; c < C; ++c) {
            double next = partial + unary(t, c);
            const auto& row = pair[static_cast<std::size_t>(t)];
            for (int s = 0; s < t; ++s) next += row[static_cast<std::size_t>(s)](assign[static_cast<std::size_t>(s)], c);
            if (next == kNegInf) continue;  // whole subtree carries zero mass
            assign[static_cast<std::size_t>(t)] = c;
            visit(t + 1, next);
        }
        assign[static_cast<std::size_t>(t)] = 0;
    };
    if (base != kNegInf) visit(0, base);

    ExactPosterior post;
    post.unobserved = U;
    post.log_bucket.resize(m, C);
    for (int t = 0; t < m; ++t)
        for (int c = 0; c < C; ++c) post.log_bucket(t, c) = bucket[static_cast<std::size_t>(t * C + c)].value();
    post.log_z = m == 0 ? base : z_acc.value();
    post.log_joint_gt = log_joint(params, g, g.labels(), opts.mode);
    post.map_labels = any_leaf ? best_assign : std::vector<int>(static_cast<std::size_t>(m), 0);
    post.log_joint_map = any_leaf ? best : kNegInf;
    return post;
}

Eigen::MatrixXd marginals(const ExactPosterior& post, const LabelState& state) {
    const int n = state.n();
    const int C = static_cast<int>(post.log_bucket.cols());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, C);
    for (int i = 0; i < n; ++i)
        if (state.is_observed(i)) out(i, state.graph().label(i)) = 1.0;
    for (std::size_t t = 0; t < post.unobserved.size(); ++t)
        out.row(post.unobserved[t]) = softmax(post.log_bucket.row(static_cast<int>(t)).transpose()).transpose();
    return out;
}

Eigen::VectorXd total_confidence(const CsbmParams& params, const Graph& g,
                                 const LabelState& state, int i, const OracleOptions& opts) {
    if (state.is_observed(i))
        throw ValidationError("total_confidence: node " + std::to_string(i) + " is observed");
    const ExactPosterior post = enumerate_posterior(params, g, state, opts);
    for (std::size_t t = 0; t < post.unobserved.size(); ++t)
        if (post.unobserved[t] == i)
            return softmax(post.log_bucket.row(static_cast<int>(t)).transpose());
    throw ValidationError("node not found among unobserved");  // unreachable
}

Eigen::VectorXd aleatoric_log_scores(const CsbmParams& params, const Graph& g, int i,
                                     const std::vector<int>& y_full, LikelihoodMode mode) {
    validate_params(params);
    if (g.n() != params.n) throw ValidationError("graph shape does not match params");
    if (static_cast<int>(y_full.size()) != g.n())
        throw ValidationError("y_full must assign every node");
    const EdgeTables tables(params, mode);
    const int C = params.num_classes;
    Eigen::VectorXd delta(C);
    const Eigen::MatrixXd feat = feature_log_likelihood(params, g.features().row(i));
    for (int c = 0; c < C; ++c) {
        double v = std::log(params.prior[static_cast<std::size_t>(c)]) + feat(0, c);
        for (int j = 0; j < g.n(); ++j) {
            if (j == i) continue;
            v += tables.term(g.has_edge(i, j), c, y_full[static_cast<std::size_t>(j)]);
        }
        delta(c) = v;
    }
    return delta;
}

Eigen::VectorXd aleatoric_confidence(const CsbmParams& params, const Graph& g, int i,
                                     const std::vector<int>& y_full, LikelihoodMode mode) {
    return softmax(aleatoric_log_scores(params, g, i, y_full, mode));
}

double epistemic_uncertainty(const CsbmParams& params, const Graph& g, const LabelState& state,
                             int i, int c, const OracleOptions& opts) {
    if (state.is_observed(i))
        throw ValidationError("epistemic_uncertainty: node " + std::to_string(i) + " is observed");
    const ExactPosterior post = enumerate_posterior(params, g, state, opts);
    int row = -1;
    for (std::size_t t = 0; t < post.unobserved.size(); ++t)
        if (post.unobserved[t] == i) row = static_cast<int>(t);
    const Eigen::VectorXd bucket_row = post.log_bucket.row(row).transpose();
    const double log_total = bucket_row(c) - log_sum_exp({bucket_row.data(), static_cast<std::size_t>(bucket_row.size())});
    const Eigen::VectorXd delta = aleatoric_log_scores(params, g, i, g.labels(), opts.mode);
    const double log_alea = delta(c) - log_sum_exp({delta.data(), static_cast<std::size_t>(delta.size())});
    if (log_total == kNegInf) return kPosInf;
    return std::exp(log_alea - log_total);
}

double relative_posterior_gain(const CsbmParams& params, const Graph& g, const LabelState& state, int i,
                   const OracleOptions& opts) {
    if (state.is_observed(i))
        throw ValidationError("relative_posterior_gain: node " + std::to_string(i) + " is observed");
    const ExactPosterior post = enumerate_posterior(params, g, state, opts);
    int row = -1;
    for (std::size_t t = 0; t < post.unobserved.size(); ++t)
        if (post.unobserved[t] == i) row = static_cast<int>(t);

    const double log_gt = log_joint(params, g, g.labels(), opts.mode);
    // Numerator: condition on y_i = y_i^gt.
    const double log_num = log_gt - post.log_bucket(row, g.label(i));
    // Denominator: sum the joint over y_i by direct evaluation.
    const double lse_partial = lse_over_classes(params, g, g.labels(), i, opts.mode);
    const double log_den = lse_partial - post.log_z;
    if (log_den == kNegInf) return kPosInf;
    return std::exp(log_num - log_den);
}

RatioConstancyReport ratio_constancy_checks(const CsbmParams& params, const Graph& g,
                                     const LabelState& state, const OracleOptions& opts) {
    RatioConstancyReport report;
    const auto U = state.unobserved();
    if (U.size() < 2) {
        report.degenerate = true;
        return report;
    }
    const ExactPosterior post = enumerate_posterior(params, g, state, opts);
    const double log_gt = log_joint(params, g, g.labels(), opts.mode);

    for (std::size_t t = 0; t < U.size(); ++t) {
        const int i = U[t];
        const int y_gt = g.label(i);
        const Eigen::VectorXd bucket_row = post.log_bucket.row(static_cast<int>(t)).transpose();
        const double log_total =
            bucket_row(y_gt) - log_sum_exp({bucket_row.data(), static_cast<std::size_t>(bucket_row.size())});
        const double log_num_post = log_gt - post.log_bucket(static_cast<int>(t), y_gt);
        report.r1.push_back(std::exp(-log_total - log_num_post));

        const Eigen::VectorXd delta = aleatoric_log_scores(params, g, i, g.labels(), opts.mode);
        const double log_alea = delta(y_gt) - log_sum_exp({delta.data(), static_cast<std::size_t>(delta.size())});
        const double lse_partial = lse_over_classes(params, g, g.labels(), i, opts.mode);
        const double log_den_post = lse_partial - post.log_z;
        report.r2.push_back(std::exp(-log_alea - log_den_post));
    }

    auto cov = [](const std::vector<double>& xs) {
        double mean = 0.0;
        for (double x : xs) {
            if (!std::isfinite(x)) return kPosInf;
            mean += x;
        }
        mean /= static_cast<double>(xs.size());
        double var = 0.0;
        for (double x : xs) var += (x - mean) * (x - mean);
        var /= static_cast<double>(xs.size());
        return mean == 0.0 ? kPosInf : std::sqrt(var) / mean;
    };
    report.cov_r1 = cov(report.r1);
    report.cov_r2 = cov(report.r2);
    return report;
}

std::vector<int> bayes_predict(const Eigen::MatrixXd& marginal_rows, const LabelState& state) {
    std::vector<int> out;
    for (int i : state.unobserved()) {
        int best = 0;
        for (int c = 1; c < marginal_rows.cols(); ++c)
            if (marginal_rows(i, c) > marginal_rows(i, best)) best = c;
        out.push_back(best);
    }
    return out;
}

}  // namespace gal
