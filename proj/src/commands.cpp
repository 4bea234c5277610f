#include "gal/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gal/al_harness.hpp"
#include "gal/atomic_io.hpp"
#include "gal/dataset_io.hpp"
#include "gal/error.hpp"
#include "gal/exact_oracle.hpp"
#include "gal/experiment_config.hpp"
#include "gal/mean_field.hpp"
#include "gal/parallel.hpp"
#include "gal/rng.hpp"
#include "json.hpp"

namespace gal {
namespace {

using json = nlohmann::json;

// Seed streams tying a split seed to its sampled world. cmd_generate uses the
// same derivation, so `generate` with seed s reproduces the graph that
// cmd_run builds internally for split_seed s.
constexpr std::uint64_t kMeansStream = 21;
constexpr std::uint64_t kGraphStream = 22;

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsbmParams source_params(const CsbmSourceConfig& src, std::uint64_t means_seed) {
    return make_params(src.n, src.num_classes, src.expected_degree, src.snr, src.delta_x,
                       src.sigma_x, means_seed, src.feature_dim, src.clamp_affiliation);
}

}  // namespace

int cmd_generate(const CommandOptions& opts) {
    const ExperimentConfig cfg = load_config(opts.config_path);
    if (cfg.source_kind != ExperimentConfig::SourceKind::csbm)
        throw ValidationError("generate requires a csbm source");
    const std::uint64_t seed = cfg.csbm.seed + opts.seed_offset;
    const CsbmParams params = source_params(cfg.csbm, derive_seed(seed, kMeansStream));
    const Graph g = sample(params, derive_seed(seed, kGraphStream));

    std::filesystem::create_directories(opts.out_dir);
    save_dataset(g, opts.out_dir);

    json prov;
    prov["format_version"] = 1;
    json src;
    src["kind"] = "csbm";
    src["n"] = cfg.csbm.n;
    src["num_classes"] = cfg.csbm.num_classes;
    src["expected_degree"] = cfg.csbm.expected_degree;
    src["snr"] = cfg.csbm.snr;
    src["delta_x"] = cfg.csbm.delta_x;
    src["sigma_x"] = cfg.csbm.sigma_x;
    src["feature_dim"] = params.feature_dim;  // resolved dimension
    src["clamp_affiliation"] = cfg.csbm.clamp_affiliation;
    src["seed"] = seed;
    prov["source"] = src;
    write_file_atomic(opts.out_dir / "provenance.json", prov.dump(2) + "\n");

    if (opts.verbose)
        std::fprintf(stdout, "generated n=%d, %zu edges -> %s\n", g.n(), g.num_edges(),
                     opts.out_dir.string().c_str());
    return 0;
}

int cmd_run(const CommandOptions& opts) {
    const ExperimentConfig cfg = load_config(opts.config_path);
    if (cfg.strategies.empty()) throw ValidationError("run needs at least one strategy");

    std::vector<SeedPair> seeds = cfg.seeds;
    for (auto& s : seeds) {
        s.split_seed += opts.seed_offset;
        s.run_seed += opts.seed_offset;
    }

    // One sampled world per distinct split seed (csbm source); a loaded
    // dataset is shared across all tasks.
    struct Instance {
        std::optional<CsbmParams> params;
        Graph g;
    };
    std::map<std::uint64_t, Instance> worlds;
    if (cfg.source_kind == ExperimentConfig::SourceKind::csbm) {
        for (const auto& s : seeds) {
            if (worlds.count(s.split_seed)) continue;
            CsbmParams params = source_params(cfg.csbm, derive_seed(s.split_seed, kMeansStream));
            Graph g = sample(params, derive_seed(s.split_seed, kGraphStream));
            worlds.emplace(s.split_seed, Instance{std::move(params), std::move(g)});
        }
    } else {
        Graph g = load_dataset(cfg.dataset_path);
        if (cfg.normalize_dataset_features) {
            const std::vector<std::pair<int, int>> edges = g.edge_list();
            g = Graph(g.num_classes(), normalize_features(g.features()), g.labels(), edges);
        }
        for (const auto& s : seeds)
            if (!worlds.count(s.split_seed)) worlds.emplace(s.split_seed, Instance{std::nullopt, g});
    }

    struct Task {
        std::size_t strategy_index;
        std::size_t seed_index;
    };
    std::vector<Task> tasks;
    for (std::size_t si = 0; si < cfg.strategies.size(); ++si)
        for (std::size_t pi = 0; pi < seeds.size(); ++pi) tasks.push_back({si, pi});

    HarnessConfig harness = cfg.harness();
    harness.jobs_within_run = tasks.size() == 1 ? opts.jobs : 1;

    std::vector<std::optional<RunRecord>> records(tasks.size());
    std::vector<std::string> errors(tasks.size());
    parallel_for(tasks.size(), opts.jobs, [&](std::size_t t) {
        const Task& task = tasks[t];
        const SeedPair pair = seeds[task.seed_index];
        const Instance& world = worlds.at(pair.split_seed);
        try {
            records[t] = run_al(world.g, world.params ? &*world.params : nullptr,
                                cfg.strategies[task.strategy_index], harness, pair);
        } catch (const std::exception& e) {
            errors[t] = e.what();
        }
    });

    std::filesystem::create_directories(opts.out_dir);

    std::string csv = "strategy,split_seed,run_seed,step,n_labeled,test_accuracy\n";
    std::vector<RunRecord> ok;
    for (std::size_t t = 0; t < tasks.size(); ++t) {
        if (!records[t]) continue;
        const RunRecord& r = *records[t];
        ok.push_back(r);
        for (const StepRow& row : r.steps) {
            csv += r.strategy;
            csv += ',';
            csv += std::to_string(r.split_seed);
            csv += ',';
            csv += std::to_string(r.run_seed);
            csv += ',';
            csv += std::to_string(row.step);
            csv += ',';
            csv += std::to_string(row.n_labeled);
            csv += ',';
            csv += fmt17(row.test_accuracy);
            csv += '\n';
        }
    }
    write_file_atomic(opts.out_dir / "curves.csv", csv);

    json summary;
    summary["format_version"] = 1;
    summary["baseline"] = cfg.baseline;
    json strat_arr = json::array();
    for (const StrategySummary& s : aggregate(ok, cfg.baseline)) {
        json e;
        e["strategy"] = s.strategy;
        e["runs"] = s.runs;
        e["mean_auc"] = s.mean_auc;
        e["std_auc"] = s.std_auc;
        e["mean_final_accuracy"] = s.mean_final;
        e["std_final_accuracy"] = s.std_final;
        if (s.has_baseline_delta) {
            e["mean_delta_auc_vs_baseline"] = s.mean_delta_auc;
            e["std_delta_auc_vs_baseline"] = s.std_delta_auc;
        }
        strat_arr.push_back(std::move(e));
    }
    summary["strategies"] = std::move(strat_arr);
    write_file_atomic(opts.out_dir / "summary.json", summary.dump(2) + "\n");

    if (opts.verbose)
        for (const StrategySummary& s : aggregate(ok, cfg.baseline))
            std::fprintf(stdout, "%s: mean AUC %.6f over %d runs\n", s.strategy.c_str(),
                         s.mean_auc, s.runs);

    std::size_t failed = 0;
    json fail_arr = json::array();
    for (std::size_t t = 0; t < tasks.size(); ++t) {
        if (errors[t].empty()) continue;
        ++failed;
        json e;
        e["strategy"] = to_string(cfg.strategies[tasks[t].strategy_index].kind);
        e["split_seed"] = seeds[tasks[t].seed_index].split_seed;
        e["run_seed"] = seeds[tasks[t].seed_index].run_seed;
        e["error"] = errors[t];
        fail_arr.push_back(std::move(e));
    }
    if (failed > 0) {
        write_file_atomic(opts.out_dir / "failures.json", fail_arr.dump(2) + "\n");
        std::fprintf(stderr, "%zu of %zu runs failed; see %s\n", failed, tasks.size(),
                     (opts.out_dir / "failures.json").string().c_str());
        return 1;
    }
    return 0;
}

int cmd_verify(const CommandOptions& opts) {
    const ExperimentConfig cfg = load_config(opts.config_path);
    const VerifyConfig& v = cfg.verify;
    const int n_span = v.n_max - v.n_min + 1;

    double max_gap = 0.0;
    double max_cov = 0.0;
    int num_trivial = 0;
    json inst_arr = json::array();
    try {
        for (int inst = 0; inst < v.instances; ++inst) {
            const int n = v.n_min + inst % n_span;
            const int C = v.classes[static_cast<std::size_t>(inst / n_span) % v.classes.size()];
            const CsbmParams params =
                make_params(n, C, v.expected_degree, v.snr, v.delta_x, v.sigma_x,
                            derive_seed(v.seed, static_cast<std::uint64_t>(inst) * 4));
            const Graph g =
                sample(params, derive_seed(v.seed, static_cast<std::uint64_t>(inst) * 4 + 1));
            auto eng = make_engine(derive_seed(v.seed, static_cast<std::uint64_t>(inst) * 4 + 2));

            // Random observed set of size 0..n-1, so at least one node stays
            // unobserved.
            std::vector<int> order(static_cast<std::size_t>(n));
            std::iota(order.begin(), order.end(), 0);
            for (int i = n - 1; i > 0; --i) {
                const int j = static_cast<int>(uniform_double(eng) * (i + 1));
                std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
            }
            const int num_obs = static_cast<int>(uniform_double(eng) * n);
            LabelState state(g);
            for (int k = 0; k < num_obs; ++k) state.observe(order[static_cast<std::size_t>(k)]);

            double inst_gap = 0.0;
            for (int i : state.unobserved()) {
                const double u_epi = epistemic_uncertainty(params, g, state, i, g.label(i));
                const double rhs = relative_posterior_gain(params, g, state, i);
                double log_rhs = std::log(rhs);
                if (v.inject_sign_flip) log_rhs = -log_rhs;
                const double gap = std::abs(std::log(u_epi) - log_rhs);
                inst_gap = std::isfinite(gap) ? std::max(inst_gap, gap)
                                              : std::numeric_limits<double>::infinity();
            }
            max_gap = std::max(max_gap, inst_gap);

            const RatioConstancyReport prop = ratio_constancy_checks(params, g, state);
            if (prop.degenerate) ++num_trivial;
            const double inst_cov =
                prop.degenerate ? 0.0 : std::max(prop.cov_r1, prop.cov_r2);
            max_cov = std::max(max_cov, inst_cov);

            json row;
            row["instance"] = inst;
            row["n"] = n;
            row["num_classes"] = C;
            row["num_observed"] = num_obs;
            row["num_unobserved"] = n - num_obs;
            row["max_abs_log_gap"] = inst_gap;
            row["trivial"] = prop.degenerate;
            if (!prop.degenerate) {
                row["cov_r1"] = prop.cov_r1;
                row["cov_r2"] = prop.cov_r2;
            }
            inst_arr.push_back(std::move(row));
        }
    } catch (const EnumerationCapError& e) {
        throw ValidationError(std::string("verify instance too large for enumeration; "
                                          "shrink n_max or raise the term cap (") +
                              e.what() + ")");
    }

    const bool pass = max_gap < v.tolerance && max_cov < v.tolerance;
    json report;
    report["format_version"] = 1;
    report["num_instances"] = v.instances;
    report["tolerance"] = v.tolerance;
    report["max_abs_log_gap"] = max_gap;
    report["max_cov"] = max_cov;
    report["num_trivial"] = num_trivial;
    report["pass"] = pass;
    report["instances"] = std::move(inst_arr);

    std::filesystem::create_directories(opts.out_dir);
    write_file_atomic(opts.out_dir / "verify_report.json", report.dump(2) + "\n");
    std::fprintf(stdout, "verify: max |log gap| = %.3g, max CoV = %.3g (%d instances) -> %s\n",
                 max_gap, max_cov, v.instances, pass ? "PASS" : "FAIL");
    return pass ? 0 : 1;
}

int cmd_approx_error(const CommandOptions& opts) {
    const ExperimentConfig cfg = load_config(opts.config_path);
    const ApproxErrorConfig& a = cfg.approx_error;
    constexpr int kMaxAttempts = 50;

    std::string csv = "n,sample,median_err,mean_err,max_err\n";
    for (int n : a.ns) {
        for (int s = 0; s < a.samples; ++s) {
            bool done = false;
            for (int attempt = 0; attempt < kMaxAttempts && !done; ++attempt) {
                // Distinct stream per (n, sample, attempt); resample when a
                // class is missing from the draw.
                const std::uint64_t base = derive_seed(
                    a.seed, (static_cast<std::uint64_t>(n) << 20) +
                                static_cast<std::uint64_t>(s) * 64 +
                                static_cast<std::uint64_t>(attempt));
                const CsbmParams params =
                    make_params(n, a.num_classes, a.expected_degree, a.snr, a.delta_x, a.sigma_x,
                                derive_seed(base, 1), 0, /*clamp_affiliation=*/true);
                const Graph g = sample(params, derive_seed(base, 2));
                LabelState state(g);
                try {
                    state = init_labels(g, {}, derive_seed(base, 3));
                } catch (const ValidationError&) {
                    continue;
                }
                const MeanFieldResult mf = mean_field_marginals(params, state, cfg.mean_field);
                const ApproxErrorStats stats = approximation_error(params, state, mf.gamma);
                csv += std::to_string(n);
                csv += ',';
                csv += std::to_string(s);
                csv += ',';
                csv += fmt17(stats.median);
                csv += ',';
                csv += fmt17(stats.mean);
                csv += ',';
                csv += fmt17(stats.max);
                csv += '\n';
                if (opts.verbose)
                    std::fprintf(stdout, "n=%d sample=%d: median %.4g, max %.4g\n", n, s,
                                 stats.median, stats.max);
                done = true;
            }
            if (!done)
                throw ValidationError("approx-error: no draw with every class present for n = " +
                                      std::to_string(n));
        }
    }

    std::filesystem::create_directories(opts.out_dir);
    write_file_atomic(opts.out_dir / "approx_error.csv", csv);
    return 0;
}

}  // namespace gal
