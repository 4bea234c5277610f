#include "gal/approx_uncertainty.hpp"

#include <cmath>
#include <cstdio>
#include <exception>

#include "gal/error.hpp"
#include "gal/logprob.hpp"
#include "gal/parallel.hpp"

namespace gal {
namespace {

int argmax_row(const Eigen::MatrixXd& m, int row) {
    int best = 0;
    for (int c = 1; c < m.cols(); ++c)
        if (m(row, c) > m(row, best)) best = c;
    return best;
}

struct Setup {
    Eigen::MatrixXd diffused;
    SgcModel base;
    Eigen::MatrixXd log_base;  // n x C log-softmax of the base model
    PseudoLabels pseudo;
    std::vector<int> observed;
    std::vector<int> observed_labels;
    std::vector<int> unobserved;
    std::vector<int> candidates;
};

Setup prepare(const Graph& g, const LabelState& state, const ApproxScoreConfig& cfg) {
    Setup s;
    s.diffused = diffuse(g, cfg.sgc.diffusion_steps);
    s.observed = state.observed();
    if (s.observed.empty()) throw ValidationError("scores need at least one observed label");
    for (int j : s.observed) s.observed_labels.push_back(g.label(j));
    s.base = fit(s.diffused, s.observed, s.observed_labels, g.num_classes(), cfg.sgc);
    s.log_base = log_predict_proba(s.base, s.diffused);
    s.pseudo = pseudo_labels(s.base, s.diffused, state);
    s.unobserved = state.unobserved();

    const int total = static_cast<int>(s.unobserved.size());
    if (cfg.candidate_cap > 0 && total > cfg.candidate_cap) {
        for (int t = 0; t < cfg.candidate_cap; ++t)
            s.candidates.push_back(s.unobserved[static_cast<std::size_t>(
                static_cast<long long>(t) * total / cfg.candidate_cap)]);
    } else {
        s.candidates = s.unobserved;
    }
    return s;
}

}  // namespace

PseudoLabels pseudo_labels(const SgcModel& model, const Eigen::MatrixXd& diffused,
                           const LabelState& state) {
    const Eigen::MatrixXd proba = predict_proba(model, diffused);
    PseudoLabels out;
    out.labels.resize(static_cast<std::size_t>(state.n()));
    for (int i = 0; i < state.n(); ++i)
        out.labels[static_cast<std::size_t>(i)] =
            state.is_observed(i) ? state.graph().label(i) : argmax_row(proba, i);
    return out;
}

ApproxScores mp_scores(const Graph& g, const LabelState& state, const ApproxScoreConfig& cfg) {
    const Setup s = prepare(g, state, cfg);
    ApproxScores out;
    out.candidates = s.candidates;
    out.score.assign(s.candidates.size(), 0.0);
    out.aux_train_size.assign(s.candidates.size(), 0);

    parallel_for(s.candidates.size(), cfg.jobs, [&](std::size_t t) {
        const int i = s.candidates[t];
        std::vector<int> nodes, labels;
        nodes.reserve(static_cast<std::size_t>(g.n() - 1));
        for (int j = 0; j < g.n(); ++j) {
            if (j == i) continue;
            nodes.push_back(j);
            labels.push_back(s.pseudo.labels[static_cast<std::size_t>(j)]);
        }
        out.aux_train_size[t] = static_cast<int>(nodes.size());
        const int yhat = s.pseudo.labels[static_cast<std::size_t>(i)];
        try {
            const SgcModel aux = fit(s.diffused, nodes, labels, g.num_classes(), cfg.sgc);
            const Eigen::MatrixXd log_aux =
                log_predict_proba(aux, s.diffused.row(i));
            out.score[t] = std::exp(floor_log(log_aux(0, yhat)) - floor_log(s.log_base(i, yhat)));
        } catch (const std::exception& e) {
            std::fprintf(stderr, "warning: auxiliary fit for node %d failed: %s\n", i, e.what());
            out.score[t] = kNegInf;
        }
    });
    return out;
}

ApproxScores esp_scores(const Graph& g, const LabelState& state, const ApproxScoreConfig& cfg) {
    const Setup s = prepare(g, state, cfg);
    const int C = g.num_classes();
    ApproxScores out;
    out.candidates = s.candidates;
    out.score.assign(s.candidates.size(), 0.0);
    out.aux_train_size.assign(s.candidates.size(), 0);

    parallel_for(s.candidates.size(), cfg.jobs, [&](std::size_t t) {
        const int i = s.candidates[t];
        std::vector<int> nodes = s.observed;
        std::vector<int> labels = s.observed_labels;
        nodes.push_back(i);
        labels.push_back(0);
        out.aux_train_size[t] = static_cast<int>(nodes.size());
        const int yhat = s.pseudo.labels[static_cast<std::size_t>(i)];
        try {
            LogSumAccumulator acc;
            for (int c = 0; c < C; ++c) {
                labels.back() = c;
                const SgcModel aux = fit(s.diffused, nodes, labels, C, cfg.sgc);
                const Eigen::MatrixXd log_aux = log_predict_proba(aux, s.diffused);
                double term = floor_log(s.log_base(i, c));
                for (int j : s.unobserved) {
                    if (j == i) continue;
                    term += floor_log(log_aux(j, argmax_row(log_aux, j)));
                }
                acc.add(term);
            }
            out.score[t] = acc.value() + floor_log(s.log_base(i, yhat));
        } catch (const std::exception& e) {
            std::fprintf(stderr, "warning: auxiliary fit for node %d failed: %s\n", i, e.what());
            out.score[t] = kNegInf;
        }
    });
    return out;
}

}  // namespace gal
