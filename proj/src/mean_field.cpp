#include "gal/mean_field.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "gal/error.hpp"
#include "gal/exact_oracle.hpp"
#include "gal/logprob.hpp"

namespace gal {
namespace {

// Floored log tables; flooring (rather than -inf) keeps every 0 * log(0)
// product finite inside the updates and the ELBO.
struct LogTables {
    Eigen::MatrixXd log_f;       // C x C
    Eigen::MatrixXd log_1m_f;    // zero matrix in misspecified mode
    Eigen::MatrixXd diff;        // log_f - log_1m_f, the per-edge correction
    Eigen::VectorXd log_prior;

    LogTables(const CsbmParams& params, LikelihoodMode mode) {
        const int C = params.num_classes;
        log_f.resize(C, C);
        log_1m_f.resize(C, C);
        log_prior.resize(C);
        for (int a = 0; a < C; ++a) {
            log_prior(a) = floor_log(std::log(params.prior[static_cast<std::size_t>(a)]));
            for (int b = 0; b < C; ++b) {
                log_f(a, b) = floor_log(std::log(params.affiliation(a, b)));
                log_1m_f(a, b) = mode == LikelihoodMode::correct
                                     ? floor_log(std::log1p(-params.affiliation(a, b)))
                                     : 0.0;
            }
        }
        diff = log_f - log_1m_f;
    }
};

void check_state(const CsbmParams& params, const LabelState& state) {
    validate_params(params);
    const Graph& g = state.graph();
    if (g.n() != params.n || g.num_classes() != params.num_classes ||
        g.feature_dim() != params.feature_dim)
        throw ValidationError("graph shape does not match params");
}

Eigen::VectorXd softmax_row(const Eigen::VectorXd& s) {
    Eigen::VectorXd out = (s.array() - s.maxCoeff()).exp();
    out /= out.sum();
    return out;
}

// Unnormalized log update for node i given the current gamma (via column sums
// S and i's neighbor rows).
Eigen::VectorXd update_scores(const Graph& g, const LogTables& t, const Eigen::MatrixXd& feat,
                              const Eigen::MatrixXd& gamma, const Eigen::VectorXd& col_sums,
                              int i) {
    Eigen::VectorXd others = col_sums - gamma.row(i).transpose();
    Eigen::VectorXd s = t.log_prior + feat.row(i).transpose() + t.log_1m_f * others;
    for (int j : g.neighbors(i)) s += t.diff * gamma.row(j).transpose();
    return s;
}

}  // namespace

MeanFieldResult mean_field_marginals(const CsbmParams& params, const LabelState& state,
                                     const MeanFieldConfig& cfg) {
    check_state(params, state);
    if (!(cfg.tolerance > 0.0)) throw ValidationError("tolerance must be > 0");
    if (!(cfg.damping >= 0.0 && cfg.damping < 1.0)) throw ValidationError("damping must be in [0,1)");
    const Graph& g = state.graph();
    const int n = g.n();
    const int C = params.num_classes;
    const LogTables tables(params, cfg.mode);
    const Eigen::MatrixXd feat = feature_log_likelihood(params, g.features());
    const auto U = state.unobserved();

    MeanFieldResult res;
    res.gamma = Eigen::MatrixXd::Zero(n, C);
    for (int i = 0; i < n; ++i) {
        if (state.is_observed(i)) {
            res.gamma(i, g.label(i)) = 1.0;
        } else if (cfg.init == MeanFieldConfig::Init::uniform) {
            res.gamma.row(i).setConstant(1.0 / C);
        } else {
            res.gamma.row(i) = softmax_row(tables.log_prior + feat.row(i).transpose()).transpose();
        }
    }
    if (U.empty()) {
        res.converged = true;
        return res;
    }

    Eigen::VectorXd col_sums = res.gamma.colwise().sum().transpose();
    for (int sweep = 1; sweep <= cfg.max_iterations; ++sweep) {
        double max_change = 0.0;
        if (cfg.schedule == MeanFieldConfig::Schedule::sequential) {
            for (int i : U) {
                const Eigen::VectorXd fresh = softmax_row(update_scores(g, tables, feat, res.gamma, col_sums, i));
                max_change = std::max(max_change, (fresh.transpose() - res.gamma.row(i)).cwiseAbs().maxCoeff());
                col_sums += fresh - res.gamma.row(i).transpose();
                res.gamma.row(i) = fresh.transpose();
            }
        } else {
            Eigen::MatrixXd next = res.gamma;
            for (int i : U) {
                const Eigen::VectorXd fresh = softmax_row(update_scores(g, tables, feat, res.gamma, col_sums, i));
                next.row(i) = cfg.damping * res.gamma.row(i) + (1.0 - cfg.damping) * fresh.transpose();
            }
            max_change = (next - res.gamma).cwiseAbs().maxCoeff();
            res.gamma = std::move(next);
            col_sums = res.gamma.colwise().sum().transpose();
        }
        res.iterations = sweep;
        if (max_change <= cfg.tolerance) {
            res.converged = true;
            break;
        }
    }
    return res;
}

double elbo(const CsbmParams& params, const LabelState& state, const Eigen::MatrixXd& gamma,
            LikelihoodMode mode) {
    check_state(params, state);
    const Graph& g = state.graph();
    const int n = g.n();
    if (gamma.rows() != n || gamma.cols() != params.num_classes)
        throw ValidationError("gamma must be n x C");
    const LogTables tables(params, mode);
    const Eigen::MatrixXd feat = feature_log_likelihood(params, g.features());

    double value = (gamma * tables.log_prior).sum();
    value += (gamma.array() * feat.array()).sum();

    // Pairwise term over all unordered pairs: dense part via column sums,
    // then the per-edge correction.
    const Eigen::VectorXd s = gamma.colwise().sum().transpose();
    double dense = s.dot(tables.log_1m_f * s);
    for (int i = 0; i < n; ++i) {
        const Eigen::VectorXd gi = gamma.row(i).transpose();
        dense -= gi.dot(tables.log_1m_f * gi);
    }
    double correction = 0.0;
    for (int i = 0; i < n; ++i) {
        const Eigen::VectorXd gi = gamma.row(i).transpose();
        for (int j : g.neighbors(i)) correction += gi.dot(tables.diff * gamma.row(j).transpose());
    }
    value += 0.5 * (dense + correction);

    for (int i : state.unobserved())
        for (int c = 0; c < params.num_classes; ++c) {
            const double p = gamma(i, c);
            if (p > 0.0) value -= p * std::log(p);
        }
    return value;
}

ApproxErrorStats approximation_error(const CsbmParams& params, const LabelState& state,
                                     const Eigen::MatrixXd& gamma) {
    check_state(params, state);
    const ExactPosterior post = enumerate_posterior(params, state.graph(), state);
    const Eigen::MatrixXd exact = marginals(post, state);

    std::vector<double> gaps;
    for (int i : state.unobserved())
        for (int c = 0; c < params.num_classes; ++c)
            gaps.push_back(std::abs(gamma(i, c) - exact(i, c)));

    ApproxErrorStats stats;
    stats.count = static_cast<int>(gaps.size());
    if (gaps.empty()) return stats;
    std::sort(gaps.begin(), gaps.end());
    const std::size_t k = gaps.size();
    stats.median = k % 2 == 1 ? gaps[k / 2] : 0.5 * (gaps[k / 2 - 1] + gaps[k / 2]);
    double sum = 0.0;
    for (double x : gaps) sum += x;
    stats.mean = sum / static_cast<double>(k);
    stats.max = gaps.back();
    return stats;
}

}  // namespace gal
