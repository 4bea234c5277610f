#include "gal/al_harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <stdexcept>

#include "gal/error.hpp"
#include "gal/rng.hpp"

namespace gal {
namespace {

enum : std::uint64_t { kInitStream = 11, kStrategyStream = 12 };

int argmax_row(const Eigen::MatrixXd& m, int row) {
    int best = 0;
    for (int c = 1; c < m.cols(); ++c)
        if (m(row, c) > m(row, best)) best = c;
    return best;
}

double accuracy_from_marginals(const Eigen::MatrixXd& marginal_rows, const Graph& g,
                               const std::vector<int>& test_nodes) {
    int hits = 0;
    for (int i : test_nodes)
        if (argmax_row(marginal_rows, i) == g.label(i)) ++hits;
    return test_nodes.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(test_nodes.size());
}

bool enumeration_feasible(int num_classes, std::size_t num_unobserved, std::uint64_t cap) {
    std::uint64_t terms = 1;
    for (std::size_t t = 0; t < num_unobserved; ++t) {
        if (terms > cap / static_cast<std::uint64_t>(num_classes)) return false;
        terms *= static_cast<std::uint64_t>(num_classes);
    }
    return true;
}

Eigen::MatrixXd bayes_marginals(const CsbmParams& params, const LabelState& state,
                                const HarnessConfig& cfg, LikelihoodMode mode) {
    bool use_exact = false;
    switch (cfg.decode_inference) {
        case InferenceKind::exact: use_exact = true; break;
        case InferenceKind::mean_field: use_exact = false; break;
        case InferenceKind::automatic:
            use_exact = enumeration_feasible(params.num_classes, state.unobserved().size(),
                                             cfg.oracle_term_cap);
            break;
    }
    if (use_exact) {
        OracleOptions opts;
        opts.term_cap = cfg.oracle_term_cap;
        opts.mode = mode;
        return marginals(enumerate_posterior(params, state.graph(), state, opts), state);
    }
    MeanFieldConfig mf = cfg.mean_field;
    mf.mode = mode;
    return mean_field_marginals(params, state, mf).gamma;
}

}  // namespace

std::vector<int> split_test(const Graph& g, std::uint64_t seed, double fraction) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw ValidationError("test fraction must lie in (0,1)");
    const int n = g.n();
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    auto eng = make_engine(seed);
    for (int i = n - 1; i > 0; --i) {  // pinned Fisher-Yates
        auto j = static_cast<std::size_t>(uniform_double(eng) * (i + 1));
        if (j > static_cast<std::size_t>(i)) j = static_cast<std::size_t>(i);
        std::swap(order[static_cast<std::size_t>(i)], order[j]);
    }
    const auto take = static_cast<std::size_t>(fraction * n);
    std::vector<int> test(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take));
    std::sort(test.begin(), test.end());

    std::vector<int> pool_count(static_cast<std::size_t>(g.num_classes()), 0);
    std::vector<char> in_test(static_cast<std::size_t>(n), 0);
    for (int i : test) in_test[static_cast<std::size_t>(i)] = 1;
    for (int i = 0; i < n; ++i)
        if (!in_test[static_cast<std::size_t>(i)]) ++pool_count[static_cast<std::size_t>(g.label(i))];
    for (int c = 0; c < g.num_classes(); ++c)
        if (pool_count[static_cast<std::size_t>(c)] == 0)
            std::fprintf(stderr, "warning: class %d has every node in the test set\n", c);
    return test;
}

LabelState init_labels(const Graph& g, const std::vector<int>& test_nodes, std::uint64_t seed) {
    LabelState state(g);
    for (int i : test_nodes) state.set_queryable(i, false);
    std::vector<char> in_test(static_cast<std::size_t>(g.n()), 0);
    for (int i : test_nodes) in_test[static_cast<std::size_t>(i)] = 1;

    auto eng = make_engine(seed);
    for (int c = 0; c < g.num_classes(); ++c) {
        std::vector<int> pool;
        for (int i = 0; i < g.n(); ++i)
            if (!in_test[static_cast<std::size_t>(i)] && g.label(i) == c) pool.push_back(i);
        if (pool.empty())
            throw ValidationError("class " + std::to_string(c) +
                                  " has no acquisition-pool node to initialize from");
        auto idx = static_cast<std::size_t>(uniform_double(eng) * static_cast<double>(pool.size()));
        if (idx >= pool.size()) idx = pool.size() - 1;
        state.observe(pool[idx]);
    }
    return state;
}

RunRecord run_al(const Graph& g, const CsbmParams* params, const Strategy& strategy,
                 const HarnessConfig& cfg, SeedPair seeds) {
    const int C = g.num_classes();
    const int budget = cfg.budget > 0 ? cfg.budget : 5 * C;

    const auto test_nodes = split_test(g, seeds.split_seed, cfg.test_fraction);
    LabelState state = init_labels(g, test_nodes, derive_seed(seeds.run_seed, kInitStream));
    auto strategy_rng = make_engine(derive_seed(seeds.run_seed, kStrategyStream));

    const int pool_size = state.n() - static_cast<int>(test_nodes.size()) - state.num_observed();
    if (budget > pool_size)
        throw ValidationError("budget " + std::to_string(budget) + " exceeds the acquisition pool of " +
                              std::to_string(pool_size) + " nodes");

    const DecoderKind decoder =
        cfg.decoder ? *cfg.decoder
                    : (is_ground_truth(strategy.kind) ? DecoderKind::bayes : DecoderKind::sgc);
    const LikelihoodMode decode_mode = strategy.kind == StrategyKind::gt_epistemic_misspecified
                                           ? LikelihoodMode::misspecified
                                           : LikelihoodMode::correct;
    if ((decoder == DecoderKind::bayes || is_ground_truth(strategy.kind)) && !params)
        throw ValidationError("ground-truth scoring and Bayes decoding need CSBM params");

    const bool wants_sgc_model = decoder == DecoderKind::sgc ||
                                 strategy.kind == StrategyKind::predictive_aleatoric ||
                                 strategy.kind == StrategyKind::energy;
    Eigen::MatrixXd diffused;
    if (wants_sgc_model || strategy.kind == StrategyKind::mp || strategy.kind == StrategyKind::esp)
        diffused = diffuse(g, cfg.classifier.diffusion_steps);

    RunRecord record;
    record.strategy = to_string(strategy.kind);
    record.split_seed = seeds.split_seed;
    record.run_seed = seeds.run_seed;

    for (int step = 0; step <= budget; ++step) {
        try {
            SgcModel model;
            if (wants_sgc_model) {
                std::vector<int> nodes = state.observed();
                std::vector<int> labels;
                for (int i : nodes) labels.push_back(g.label(i));
                model = fit(diffused, nodes, labels, C, cfg.classifier);
            }

            StepRow row;
            row.step = step;
            row.n_labeled = state.num_observed();
            if (decoder == DecoderKind::sgc) {
                const Eigen::MatrixXd proba = predict_proba(model, diffused);
                row.test_accuracy = accuracy_from_marginals(proba, g, test_nodes);
            } else {
                row.test_accuracy = accuracy_from_marginals(
                    bayes_marginals(*params, state, cfg, decode_mode), g, test_nodes);
            }

            if (step < budget) {
                StrategyContext ctx;
                ctx.params = params;
                ctx.oracle_term_cap = cfg.oracle_term_cap;
                ctx.mean_field = cfg.mean_field;
                ctx.model = wants_sgc_model ? &model : nullptr;
                ctx.diffused = wants_sgc_model ? &diffused : nullptr;
                ctx.sgc = cfg.classifier;
                ctx.jobs = cfg.jobs_within_run;
                ctx.candidate_cap = cfg.candidate_cap;
                ctx.ppr_teleport = cfg.ppr_teleport;
                ctx.ppr_iterations = cfg.ppr_iterations;
                row.queried = next_query(strategy, g, state, ctx, strategy_rng);
                state.observe(row.queried);
            }
            record.steps.push_back(row);
        } catch (const std::exception& e) {
            throw std::runtime_error("strategy " + record.strategy + ", step " +
                                     std::to_string(step) + ": " + e.what());
        }
    }

    record.auc = normalized_auc(record);
    record.final_accuracy = record.steps.back().test_accuracy;
    return record;
}

double normalized_auc(const RunRecord& record) {
    if (record.steps.empty()) throw ValidationError("record has no accuracy rows");
    double sum = 0.0;
    for (const auto& row : record.steps) sum += row.test_accuracy;
    return sum / static_cast<double>(record.steps.size());
}

std::vector<StrategySummary> aggregate(const std::vector<RunRecord>& records,
                                       const std::string& baseline_strategy) {
    std::vector<std::string> order;
    std::map<std::string, std::vector<const RunRecord*>> by_strategy;
    for (const auto& r : records) {
        if (!by_strategy.count(r.strategy)) order.push_back(r.strategy);
        by_strategy[r.strategy].push_back(&r);
    }
    std::map<std::pair<std::uint64_t, std::uint64_t>, double> baseline_auc;
    if (by_strategy.count(baseline_strategy))
        for (const RunRecord* r : by_strategy[baseline_strategy])
            baseline_auc[{r->split_seed, r->run_seed}] = r->auc;

    auto moments = [](const std::vector<double>& xs, double& mean, double& sd) {
        mean = 0.0;
        for (double x : xs) mean += x;
        mean /= static_cast<double>(xs.size());
        double var = 0.0;
        for (double x : xs) var += (x - mean) * (x - mean);
        sd = std::sqrt(var / static_cast<double>(xs.size()));
    };

    std::vector<StrategySummary> out;
    for (const auto& name : order) {
        const auto& runs = by_strategy[name];
        StrategySummary s;
        s.strategy = name;
        s.runs = static_cast<int>(runs.size());
        std::vector<double> aucs, finals, deltas;
        for (const RunRecord* r : runs) {
            aucs.push_back(r->auc);
            finals.push_back(r->final_accuracy);
            const auto it = baseline_auc.find({r->split_seed, r->run_seed});
            if (it != baseline_auc.end()) deltas.push_back(r->auc - it->second);
        }
        moments(aucs, s.mean_auc, s.std_auc);
        moments(finals, s.mean_final, s.std_final);
        if (!deltas.empty()) {
            s.has_baseline_delta = true;
            moments(deltas, s.mean_delta_auc, s.std_delta_auc);
        }
        out.push_back(s);
    }
    return out;
}

}  // namespace gal
