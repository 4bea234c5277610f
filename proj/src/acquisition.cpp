#include "gal/acquisition.hpp"

#include <cmath>
#include <limits>

#include "gal/error.hpp"
#include "gal/logprob.hpp"
#include "gal/rng.hpp"

namespace gal {
namespace {

constexpr double kPosInf = std::numeric_limits<double>::infinity();

bool enumeration_feasible(int num_classes, std::size_t num_unobserved, std::uint64_t cap) {
    std::uint64_t terms = 1;
    for (std::size_t t = 0; t < num_unobserved; ++t) {
        if (terms > cap / static_cast<std::uint64_t>(num_classes)) return false;
        terms *= static_cast<std::uint64_t>(num_classes);
    }
    return true;
}

// argmax over queryable scored nodes, lowest index on ties.
int pick_best(const ScoredNodes& scored, const LabelState& state) {
    int best = -1;
    double best_score = 0.0;
    for (std::size_t t = 0; t < scored.nodes.size(); ++t) {
        const int i = scored.nodes[t];
        if (!state.is_queryable(i)) continue;
        if (best == -1 || scored.score[t] > best_score) {
            best = i;
            best_score = scored.score[t];
        }
    }
    if (best == -1) throw ValidationError("no queryable node available to the strategy");
    return best;
}

}  // namespace

StrategyKind strategy_kind_from_string(const std::string& name) {
    if (name == "random") return StrategyKind::random;
    if (name == "gt_epistemic") return StrategyKind::gt_epistemic;
    if (name == "gt_total") return StrategyKind::gt_total;
    if (name == "gt_aleatoric") return StrategyKind::gt_aleatoric;
    if (name == "gt_epistemic_misspecified") return StrategyKind::gt_epistemic_misspecified;
    if (name == "predictive_aleatoric") return StrategyKind::predictive_aleatoric;
    if (name == "energy") return StrategyKind::energy;
    if (name == "mp") return StrategyKind::mp;
    if (name == "esp") return StrategyKind::esp;
    if (name == "degree") return StrategyKind::degree;
    if (name == "ppr") return StrategyKind::ppr;
    if (name == "coreset_features") return StrategyKind::coreset_features;
    if (name == "coreset_ppr") return StrategyKind::coreset_ppr;
    throw ValidationError("unknown strategy kind '" + name + "'");
}

std::string to_string(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::random: return "random";
        case StrategyKind::gt_epistemic: return "gt_epistemic";
        case StrategyKind::gt_total: return "gt_total";
        case StrategyKind::gt_aleatoric: return "gt_aleatoric";
        case StrategyKind::gt_epistemic_misspecified: return "gt_epistemic_misspecified";
        case StrategyKind::predictive_aleatoric: return "predictive_aleatoric";
        case StrategyKind::energy: return "energy";
        case StrategyKind::mp: return "mp";
        case StrategyKind::esp: return "esp";
        case StrategyKind::degree: return "degree";
        case StrategyKind::ppr: return "ppr";
        case StrategyKind::coreset_features: return "coreset_features";
        case StrategyKind::coreset_ppr: return "coreset_ppr";
    }
    throw ValidationError("unknown strategy kind");
}

bool is_ground_truth(StrategyKind kind) {
    return kind == StrategyKind::gt_epistemic || kind == StrategyKind::gt_total ||
           kind == StrategyKind::gt_aleatoric || kind == StrategyKind::gt_epistemic_misspecified;
}

ScoredNodes gt_scores(const Strategy& strategy, const CsbmParams& params, const LabelState& state,
                      std::uint64_t term_cap, const MeanFieldConfig& mf_cfg) {
    if (!is_ground_truth(strategy.kind))
        throw ValidationError("gt_scores called with a non-ground-truth kind");
    const Graph& g = state.graph();
    const auto U = state.unobserved();
    const LikelihoodMode mode = strategy.kind == StrategyKind::gt_epistemic_misspecified
                                    ? LikelihoodMode::misspecified
                                    : LikelihoodMode::correct;

    bool use_exact = false;
    switch (strategy.inference) {
        case InferenceKind::exact: use_exact = true; break;
        case InferenceKind::mean_field: use_exact = false; break;
        case InferenceKind::automatic:
            use_exact = enumeration_feasible(params.num_classes, U.size(), term_cap);
            break;
    }

    // log c^total(i, y^gt) for kinds that need the marginal posterior.
    std::vector<double> log_total(U.size(), 0.0);
    if (strategy.kind != StrategyKind::gt_aleatoric) {
        if (use_exact) {
            OracleOptions opts;
            opts.term_cap = term_cap;
            opts.mode = mode;
            const ExactPosterior post = enumerate_posterior(params, g, state, opts);
            const Eigen::MatrixXd marg = marginals(post, state);
            for (std::size_t t = 0; t < U.size(); ++t)
                log_total[t] = std::log(marg(U[t], g.label(U[t])));
        } else {
            MeanFieldConfig cfg = mf_cfg;
            cfg.mode = mode;
            const MeanFieldResult mf = mean_field_marginals(params, state, cfg);
            for (std::size_t t = 0; t < U.size(); ++t)
                log_total[t] = std::log(mf.gamma(U[t], g.label(U[t])));
        }
    }

    // log c^alea(i, y^gt): closed form at any size (no marginalization needed).
    std::vector<double> log_alea(U.size(), 0.0);
    if (strategy.kind != StrategyKind::gt_total) {
        for (std::size_t t = 0; t < U.size(); ++t) {
            const Eigen::VectorXd delta = aleatoric_log_scores(params, g, U[t], g.labels(), mode);
            log_alea[t] = delta(g.label(U[t])) -
                          log_sum_exp({delta.data(), static_cast<std::size_t>(delta.size())});
        }
    }

    ScoredNodes out;
    out.nodes = U;
    out.score.resize(U.size());
    for (std::size_t t = 0; t < U.size(); ++t) {
        switch (strategy.kind) {
            case StrategyKind::gt_total:
                out.score[t] = log_total[t] == kNegInf ? kPosInf : std::exp(-log_total[t]);
                break;
            case StrategyKind::gt_aleatoric:
                out.score[t] = log_alea[t] == kNegInf ? kPosInf : std::exp(-log_alea[t]);
                break;
            default:  // epistemic variants
                out.score[t] =
                    log_total[t] == kNegInf ? kPosInf : std::exp(log_alea[t] - log_total[t]);
                break;
        }
    }
    return out;
}

ScoredNodes predictive_scores(StrategyKind kind, const SgcModel& model,
                              const Eigen::MatrixXd& diffused, const LabelState& state,
                              double tau) {
    ScoredNodes out;
    out.nodes = state.unobserved();
    out.score.resize(out.nodes.size());
    if (kind == StrategyKind::predictive_aleatoric) {
        const Eigen::MatrixXd proba = predict_proba(model, diffused);
        for (std::size_t t = 0; t < out.nodes.size(); ++t)
            out.score[t] = -proba.row(out.nodes[t]).maxCoeff();
    } else if (kind == StrategyKind::energy) {
        for (std::size_t t = 0; t < out.nodes.size(); ++t)
            out.score[t] = energy_score(model, diffused, out.nodes[t], tau);
    } else {
        throw ValidationError("predictive_scores called with a non-predictive kind");
    }
    return out;
}

ScoredNodes structural_scores(StrategyKind kind, const Graph& g, const LabelState& state,
                              double teleport, int iterations) {
    ScoredNodes out;
    out.nodes = state.unobserved();
    out.score.resize(out.nodes.size());
    if (kind == StrategyKind::degree) {
        for (std::size_t t = 0; t < out.nodes.size(); ++t)
            out.score[t] = static_cast<double>(g.degree(out.nodes[t]));
    } else if (kind == StrategyKind::ppr) {
        const Eigen::VectorXd pr = pagerank(g, teleport, iterations);
        for (std::size_t t = 0; t < out.nodes.size(); ++t) out.score[t] = pr(out.nodes[t]);
    } else {
        throw ValidationError("structural_scores called with a non-structural kind");
    }
    return out;
}

ScoredNodes coreset_scores(StrategyKind kind, const Graph& g, const LabelState& state,
                           double teleport, int iterations) {
    const auto O = state.observed();
    if (O.empty()) throw ValidationError("coreset needs at least one observed node");
    ScoredNodes out;
    out.nodes = state.unobserved();
    out.score.assign(out.nodes.size(), kPosInf);
    if (kind == StrategyKind::coreset_features) {
        for (std::size_t t = 0; t < out.nodes.size(); ++t)
            for (int o : O)
                out.score[t] = std::min(
                    out.score[t], (g.features().row(out.nodes[t]) - g.features().row(o)).norm());
    } else if (kind == StrategyKind::coreset_ppr) {
        for (int o : O) {
            const Eigen::VectorXd pr = personalized_pagerank(g, o, teleport, iterations);
            for (std::size_t t = 0; t < out.nodes.size(); ++t)
                out.score[t] = std::min(out.score[t], 1.0 / (pr(out.nodes[t]) + 1e-12));
        }
    } else {
        throw ValidationError("coreset_scores called with a non-coreset kind");
    }
    return out;
}

int coreset_pick(StrategyKind kind, const Graph& g, const LabelState& state, double teleport,
                 int iterations) {
    return pick_best(coreset_scores(kind, g, state, teleport, iterations), state);
}

int next_query(const Strategy& strategy, const Graph& g, const LabelState& state,
               const StrategyContext& ctx, std::mt19937_64& rng) {
    if (&state.graph() != &g) throw ValidationError("state refers to a different graph");
    switch (strategy.kind) {
        case StrategyKind::random: {
            const auto pool = state.queryable();
            if (pool.empty()) throw ValidationError("no queryable node available to the strategy");
            const double u = uniform_double(rng);
            auto idx = static_cast<std::size_t>(u * static_cast<double>(pool.size()));
            if (idx >= pool.size()) idx = pool.size() - 1;
            return pool[idx];
        }
        case StrategyKind::gt_epistemic:
        case StrategyKind::gt_total:
        case StrategyKind::gt_aleatoric:
        case StrategyKind::gt_epistemic_misspecified: {
            if (!ctx.params)
                throw ValidationError("ground-truth strategies need generative-process params");
            return pick_best(gt_scores(strategy, *ctx.params, state, ctx.oracle_term_cap,
                                       ctx.mean_field),
                             state);
        }
        case StrategyKind::predictive_aleatoric:
        case StrategyKind::energy: {
            if (!ctx.model || !ctx.diffused)
                throw ValidationError("predictive strategies need a fitted model");
            return pick_best(predictive_scores(strategy.kind, *ctx.model, *ctx.diffused, state,
                                               ctx.sgc.energy_temperature),
                             state);
        }
        case StrategyKind::mp:
        case StrategyKind::esp: {
            ApproxScoreConfig cfg;
            cfg.sgc = ctx.sgc;
            cfg.candidate_cap = ctx.candidate_cap;
            cfg.jobs = ctx.jobs;
            const ApproxScores scores = strategy.kind == StrategyKind::mp
                                            ? mp_scores(g, state, cfg)
                                            : esp_scores(g, state, cfg);
            ScoredNodes scored;
            scored.nodes = scores.candidates;
            scored.score = scores.score;
            return pick_best(scored, state);
        }
        case StrategyKind::degree:
        case StrategyKind::ppr:
            return pick_best(
                structural_scores(strategy.kind, g, state, ctx.ppr_teleport, ctx.ppr_iterations),
                state);
        case StrategyKind::coreset_features:
        case StrategyKind::coreset_ppr:
            return coreset_pick(strategy.kind, g, state, ctx.ppr_teleport, ctx.ppr_iterations);
    }
    throw ValidationError("unknown strategy kind");
}

}  // namespace gal
