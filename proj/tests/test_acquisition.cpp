#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "gal/acquisition.hpp"
#include "gal/csbm.hpp"
#include "gal/error.hpp"
#include "gal/rng.hpp"
#include "support/oracles.hpp"

using namespace gal;

namespace {

struct Instance {
    CsbmParams params;
    Graph g;
    LabelState state;  // bound to this->g, so the struct must never be copied

    Instance(CsbmParams p, Graph graph, int num_observed)
        : params(std::move(p)), g(std::move(graph)), state(g) {
        for (int k = 0; k < num_observed; ++k) state.observe(k);
    }
    Instance(const Instance&) = delete;
    Instance& operator=(const Instance&) = delete;
};

Instance make_instance(int n, int C, std::uint64_t seed, int num_observed) {
    CsbmParams params = make_params(n, C, 3.0, 2.0, 1.0, 1.0, derive_seed(seed, 1));
    Graph g = sample(params, derive_seed(seed, 2));
    return Instance(std::move(params), std::move(g), num_observed);
}

const std::vector<std::string> kAllNames = {
    "random",
    "gt_epistemic",
    "gt_total",
    "gt_aleatoric",
    "gt_epistemic_misspecified",
    "predictive_aleatoric",
    "energy",
    "mp",
    "esp",
    "degree",
    "ppr",
    "coreset_features",
    "coreset_ppr",
};

}  // namespace

TEST_CASE("strategy names round-trip and unknown names are rejected") {
    for (const std::string& name : kAllNames)
        CHECK(to_string(strategy_kind_from_string(name)) == name);
    CHECK_THROWS_AS(strategy_kind_from_string("entropy"), ValidationError);
    CHECK_THROWS_AS(strategy_kind_from_string(""), ValidationError);

    CHECK(is_ground_truth(StrategyKind::gt_epistemic));
    CHECK(is_ground_truth(StrategyKind::gt_total));
    CHECK(is_ground_truth(StrategyKind::gt_aleatoric));
    CHECK(is_ground_truth(StrategyKind::gt_epistemic_misspecified));
    CHECK_FALSE(is_ground_truth(StrategyKind::random));
    CHECK_FALSE(is_ground_truth(StrategyKind::mp));
    CHECK_FALSE(is_ground_truth(StrategyKind::coreset_ppr));
}

TEST_CASE("exact ground-truth scores match the oracle quantities") {
    auto inst = make_instance(7, 2, 3, 2);
    const auto U = inst.state.unobserved();

    Strategy s;
    s.inference = InferenceKind::exact;

    const ExactPosterior post = enumerate_posterior(inst.params, inst.g, inst.state);
    const Eigen::MatrixXd marg = marginals(post, inst.state);

    s.kind = StrategyKind::gt_total;
    ScoredNodes total = gt_scores(s, inst.params, inst.state, 10'000'000, {});
    REQUIRE(total.nodes == U);
    for (std::size_t t = 0; t < U.size(); ++t)
        CHECK(total.score[t] ==
              doctest::Approx(1.0 / marg(U[t], inst.g.label(U[t]))).epsilon(1e-9));

    s.kind = StrategyKind::gt_aleatoric;
    ScoredNodes alea = gt_scores(s, inst.params, inst.state, 10'000'000, {});
    for (std::size_t t = 0; t < U.size(); ++t) {
        const Eigen::VectorXd conf =
            aleatoric_confidence(inst.params, inst.g, U[t], inst.g.labels());
        CHECK(alea.score[t] == doctest::Approx(1.0 / conf(inst.g.label(U[t]))).epsilon(1e-9));
    }

    s.kind = StrategyKind::gt_epistemic;
    ScoredNodes epi = gt_scores(s, inst.params, inst.state, 10'000'000, {});
    for (std::size_t t = 0; t < U.size(); ++t)
        CHECK(epi.score[t] ==
              doctest::Approx(epistemic_uncertainty(inst.params, inst.g, inst.state, U[t],
                                                    inst.g.label(U[t])))
                  .epsilon(1e-9));
    // epistemic = aleatoric / total, so scores multiply out
    for (std::size_t t = 0; t < U.size(); ++t)
        CHECK(epi.score[t] == doctest::Approx(total.score[t] / alea.score[t]).epsilon(1e-9));
}

TEST_CASE("misspecified ground-truth scores use the edges-only likelihood") {
    auto inst = make_instance(6, 2, 11, 2);
    const auto U = inst.state.unobserved();

    Strategy s;
    s.kind = StrategyKind::gt_epistemic_misspecified;
    s.inference = InferenceKind::exact;
    const ScoredNodes got = gt_scores(s, inst.params, inst.state, 10'000'000, {});

    OracleOptions opts;
    opts.mode = LikelihoodMode::misspecified;
    const ExactPosterior post = enumerate_posterior(inst.params, inst.g, inst.state, opts);
    const Eigen::MatrixXd marg = marginals(post, inst.state);
    for (std::size_t t = 0; t < U.size(); ++t) {
        const Eigen::VectorXd conf = aleatoric_confidence(inst.params, inst.g, U[t],
                                                          inst.g.labels(),
                                                          LikelihoodMode::misspecified);
        const double expect = conf(inst.g.label(U[t])) / marg(U[t], inst.g.label(U[t]));
        CHECK(got.score[t] == doctest::Approx(expect).epsilon(1e-9));
    }

    // and it genuinely differs from the correct-likelihood scores
    s.kind = StrategyKind::gt_epistemic;
    const ScoredNodes correct = gt_scores(s, inst.params, inst.state, 10'000'000, {});
    double max_gap = 0.0;
    for (std::size_t t = 0; t < U.size(); ++t)
        max_gap = std::max(max_gap, std::abs(correct.score[t] - got.score[t]));
    CHECK(max_gap > 1e-6);
}

TEST_CASE("automatic inference follows the enumeration budget") {
    auto inst = make_instance(8, 2, 17, 2);

    Strategy epi;
    epi.kind = StrategyKind::gt_epistemic;

    epi.inference = InferenceKind::exact;
    const ScoredNodes exact = gt_scores(epi, inst.params, inst.state, 10'000'000, {});
    epi.inference = InferenceKind::mean_field;
    const ScoredNodes mf = gt_scores(epi, inst.params, inst.state, 10'000'000, {});
    // the two backends disagree on this instance, so the routing is observable
    double gap = 0.0;
    for (std::size_t t = 0; t < exact.score.size(); ++t)
        gap = std::max(gap, std::abs(exact.score[t] - mf.score[t]));
    REQUIRE(gap > 1e-9);

    epi.inference = InferenceKind::automatic;
    const ScoredNodes roomy = gt_scores(epi, inst.params, inst.state, 10'000'000, {});
    for (std::size_t t = 0; t < exact.score.size(); ++t)
        CHECK(roomy.score[t] == exact.score[t]);

    const ScoredNodes cramped = gt_scores(epi, inst.params, inst.state, 10, {});
    for (std::size_t t = 0; t < mf.score.size(); ++t)
        CHECK(cramped.score[t] == mf.score[t]);
}

TEST_CASE("predictive scores reduce to the model outputs") {
    auto inst = make_instance(10, 3, 23, 4);
    const Eigen::MatrixXd diffused = diffuse(inst.g, 2);
    std::vector<int> obs = inst.state.observed();
    std::vector<int> labels;
    for (int j : obs) labels.push_back(inst.g.label(j));
    const SgcModel model = fit(diffused, obs, labels, 3, {});
    const Eigen::MatrixXd proba = predict_proba(model, diffused);

    const ScoredNodes pa = predictive_scores(StrategyKind::predictive_aleatoric, model, diffused,
                                             inst.state, 1.0);
    REQUIRE(pa.nodes == inst.state.unobserved());
    for (std::size_t t = 0; t < pa.nodes.size(); ++t)
        CHECK(pa.score[t] == doctest::Approx(-proba.row(pa.nodes[t]).maxCoeff()).epsilon(1e-12));

    const ScoredNodes en = predictive_scores(StrategyKind::energy, model, diffused, inst.state,
                                             1.7);
    for (std::size_t t = 0; t < en.nodes.size(); ++t)
        CHECK(en.score[t] == energy_score(model, diffused, en.nodes[t], 1.7));

    CHECK_THROWS_AS(predictive_scores(StrategyKind::degree, model, diffused, inst.state, 1.0),
                    ValidationError);
}

TEST_CASE("structural scores match the graph primitives") {
    auto inst = make_instance(12, 2, 29, 3);
    const ScoredNodes deg = structural_scores(StrategyKind::degree, inst.g, inst.state, 0.15, 50);
    for (std::size_t t = 0; t < deg.nodes.size(); ++t)
        CHECK(deg.score[t] == static_cast<double>(inst.g.degree(deg.nodes[t])));

    const ScoredNodes pr = structural_scores(StrategyKind::ppr, inst.g, inst.state, 0.15, 50);
    const Eigen::VectorXd global = pagerank(inst.g, 0.15, 50);
    for (std::size_t t = 0; t < pr.nodes.size(); ++t)
        CHECK(pr.score[t] == global(pr.nodes[t]));

    CHECK_THROWS_AS(structural_scores(StrategyKind::esp, inst.g, inst.state, 0.15, 50),
                    ValidationError);
}

TEST_CASE("feature coreset picks the farthest point on a hand example") {
    // 1-d features: observed at 0 and 6; candidates at 1, 3, 2
    Eigen::MatrixXd x(5, 1);
    x << 0.0, 1.0, 3.0, 2.0, 6.0;
    const Graph g(2, x, {0, 1, 0, 1, 0}, {});
    LabelState state(g);
    state.observe(0);
    state.observe(4);

    const ScoredNodes scored =
        coreset_scores(StrategyKind::coreset_features, g, state, 0.15, 50);
    REQUIRE(scored.nodes == std::vector<int>{1, 2, 3});
    CHECK(scored.score[0] == doctest::Approx(1.0).epsilon(1e-14));  // min(1, 5)
    CHECK(scored.score[1] == doctest::Approx(3.0).epsilon(1e-14));  // min(3, 3)
    CHECK(scored.score[2] == doctest::Approx(2.0).epsilon(1e-14));  // min(2, 4)
    CHECK(coreset_pick(StrategyKind::coreset_features, g, state, 0.15, 50) == 2);
}

TEST_CASE("ppr coreset matches a test-side recomputation") {
    auto inst = make_instance(10, 2, 31, 3);
    const double teleport = 0.2;
    const int iters = 80;
    const ScoredNodes got =
        coreset_scores(StrategyKind::coreset_ppr, inst.g, inst.state, teleport, iters);

    for (std::size_t t = 0; t < got.nodes.size(); ++t) {
        double expect = std::numeric_limits<double>::infinity();
        for (int o : inst.state.observed()) {
            const Eigen::VectorXd pr = personalized_pagerank(inst.g, o, teleport, iters);
            expect = std::min(expect, 1.0 / (pr(got.nodes[t]) + 1e-12));
        }
        CHECK(got.score[t] == expect);
    }
}

TEST_CASE("coreset without observed nodes is rejected") {
    auto inst = make_instance(6, 2, 37, 0);
    CHECK_THROWS_AS(coreset_scores(StrategyKind::coreset_features, inst.g, inst.state, 0.15, 50),
                    ValidationError);
}

TEST_CASE("next_query argmax breaks ties toward the lowest index") {
    // path graph 0-1-2-3: nodes 1 and 2 share the maximal degree 2
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(4, 2);
    const Graph g(2, x, {0, 1, 0, 1}, {{0, 1}, {1, 2}, {2, 3}});
    LabelState state(g);
    Strategy s;
    s.kind = StrategyKind::degree;
    StrategyContext ctx;
    auto rng = make_engine(1);
    CHECK(next_query(s, g, state, ctx, rng) == 1);

    // once node 1 is off the table the tie is gone
    state.observe(1);
    CHECK(next_query(s, g, state, ctx, rng) == 2);
}

TEST_CASE("random queries replicate the documented draw and respect the pool") {
    auto inst = make_instance(9, 2, 41, 2);
    inst.state.set_queryable(5, false);

    Strategy s;  // random
    StrategyContext ctx;
    auto rng = make_engine(77);
    auto replica = make_engine(77);
    const auto pool = inst.state.queryable();
    for (int step = 0; step < 4; ++step) {
        const int got = next_query(s, inst.g, inst.state, ctx, rng);
        const double u = uniform_double(replica);
        auto idx = static_cast<std::size_t>(u * static_cast<double>(pool.size()));
        if (idx >= pool.size()) idx = pool.size() - 1;
        CHECK(got == pool[idx]);
        CHECK(inst.state.is_queryable(got));
        CHECK(got != 5);
    }
}

TEST_CASE("ground-truth strategies require params and an empty pool throws") {
    auto inst = make_instance(6, 2, 43, 1);
    StrategyContext ctx;  // params left null
    Strategy s;
    s.kind = StrategyKind::gt_epistemic;
    auto rng = make_engine(3);
    CHECK_THROWS_AS(next_query(s, inst.g, inst.state, ctx, rng), ValidationError);

    // exhaust the pool entirely
    for (int i = 0; i < inst.g.n(); ++i) inst.state.set_queryable(i, false);
    Strategy r;  // random
    CHECK_THROWS_AS(next_query(r, inst.g, inst.state, ctx, rng), ValidationError);
    s.kind = StrategyKind::degree;
    CHECK_THROWS_AS(next_query(s, inst.g, inst.state, ctx, rng), ValidationError);
}

TEST_CASE("non-queryable nodes are never selected by score strategies") {
    auto inst = make_instance(8, 2, 47, 2);
    // leave exactly one queryable node
    const auto unobs = inst.state.unobserved();
    for (std::size_t t = 0; t + 1 < unobs.size(); ++t)
        inst.state.set_queryable(unobs[t], false);
    const int only = unobs.back();

    StrategyContext ctx;
    ctx.params = &inst.params;
    auto rng = make_engine(5);
    for (const char* name : {"gt_epistemic", "gt_total", "gt_aleatoric", "degree", "ppr",
                             "coreset_features", "coreset_ppr"}) {
        Strategy s;
        s.kind = strategy_kind_from_string(name);
        CHECK(next_query(s, inst.g, inst.state, ctx, rng) == only);
    }
}
