// Integration gate for the whole pipeline. Each numbered criterion prints one
// [PASS]/[FAIL] line with its pinned tolerance and the measured value; the
// process exits 0 only if every criterion passes.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "gal/al_harness.hpp"
#include "gal/approx_uncertainty.hpp"
#include "gal/commands.hpp"
#include "gal/csbm.hpp"
#include "gal/error.hpp"
#include "gal/exact_oracle.hpp"
#include "gal/experiment_config.hpp"
#include "gal/logprob.hpp"
#include "gal/mean_field.hpp"
#include "gal/rng.hpp"
#include "gal/sgc.hpp"
#include "json.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& what, const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion, what.c_str(),
                detail.c_str());
    if (!pass) ++g_failures;
}

void report_error(int criterion, const std::string& what, const std::exception& e) {
    std::printf("[FAIL] criterion %d: %s (exception: %s)\n", criterion, what.c_str(), e.what());
    ++g_failures;
}

fs::path scratch_root() {
    static const fs::path root =
        fs::temp_directory_path() / ("gal_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(root);
    return root;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = scratch_root() / name;
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << content;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

double median_of(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t k = xs.size();
    return k % 2 == 1 ? xs[k / 2] : 0.5 * (xs[k / 2 - 1] + xs[k / 2]);
}

// ---------------------------------------------------------------------------
// Criteria 1 and 2: the exact-enumeration identity and the shared
// proportionality constants, checked by the verify command over its default
// 50 randomized instances at tolerance 1e-8.

void criteria_identity_and_constants() {
    const char* what1 = "epistemic uncertainty equals the relative posterior gain";
    const char* what2 = "node-wise confidence ratios share one constant per instance";
    try {
        const fs::path dir = fresh_dir("verify");
        json cfg;
        cfg["source"] = {{"kind", "csbm"}, {"n", 10}, {"num_classes", 2}};
        write_file(dir / "cfg.json", cfg.dump());

        gal::CommandOptions opts;
        opts.config_path = dir / "cfg.json";
        opts.out_dir = dir / "out";
        const int rc = gal::cmd_verify(opts);

        const json report_json = json::parse(read_file(dir / "out" / "verify_report.json"));
        const double max_gap = report_json.at("max_abs_log_gap").get<double>();
        const double max_cov = report_json.at("max_cov").get<double>();
        const int instances = report_json.at("num_instances").get<int>();
        const int trivial = report_json.at("num_trivial").get<int>();

        report(1, rc == 0 && instances >= 50 && max_gap < 1e-8, what1,
               "max |log gap| " + fmt(max_gap) + " over " + std::to_string(instances) +
                   " instances, tolerance 1e-8");
        report(2, rc == 0 && max_cov < 1e-8 && trivial < instances, what2,
               "max coefficient of variation " + fmt(max_cov) + ", " +
                   std::to_string(instances - trivial) + " non-degenerate instances, tolerance 1e-8");
    } catch (const std::exception& e) {
        report_error(1, what1, e);
        report_error(2, what2, e);
    }
}

// ---------------------------------------------------------------------------
// Criterion 3: mean-field marginals track the exact posterior. Pools every
// per-node per-class absolute gap across the default sweep (sizes 6..12, five
// samples each, four classes) and requires a pooled median <= 0.05 per size.

void criterion_mean_field_error() {
    const char* what = "mean-field marginals stay close to the exact posterior";
    try {
        const gal::ApproxErrorConfig a;  // defaults: ns {6,8,10,12}, 5 samples, 4 classes
        const gal::MeanFieldConfig mf;
        constexpr double kThreshold = 0.05;

        double worst = 0.0;
        int worst_n = 0;
        for (int n : a.ns) {
            std::vector<double> pool;
            for (int s = 0; s < a.samples; ++s) {
                for (int attempt = 0; attempt < 50; ++attempt) {
                    const std::uint64_t base = gal::derive_seed(
                        a.seed, (static_cast<std::uint64_t>(n) << 20) +
                                    static_cast<std::uint64_t>(s) * 64 +
                                    static_cast<std::uint64_t>(attempt));
                    const gal::CsbmParams params =
                        gal::make_params(n, a.num_classes, a.expected_degree, a.snr, a.delta_x,
                                         a.sigma_x, gal::derive_seed(base, 1), 0, true);
                    const gal::Graph g = gal::sample(params, gal::derive_seed(base, 2));
                    gal::LabelState state(g);
                    try {
                        state = gal::init_labels(g, {}, gal::derive_seed(base, 3));
                    } catch (const gal::ValidationError&) {
                        continue;  // a class is missing from this draw
                    }
                    const gal::MeanFieldResult res = gal::mean_field_marginals(params, state, mf);
                    const gal::ExactPosterior post = gal::enumerate_posterior(params, g, state);
                    const Eigen::MatrixXd exact = gal::marginals(post, state);
                    for (int i : state.unobserved())
                        for (int c = 0; c < a.num_classes; ++c)
                            pool.push_back(std::abs(res.gamma(i, c) - exact(i, c)));
                    break;
                }
            }
            const double med = median_of(pool);
            if (med > worst) {
                worst = med;
                worst_n = n;
            }
        }
        report(3, worst <= kThreshold, what,
               "worst pooled median " + fmt(worst) + " at n=" + std::to_string(worst_n) +
                   ", threshold 0.05");
    } catch (const std::exception& e) {
        report_error(3, what, e);
    }
}

// ---------------------------------------------------------------------------
// Criterion 4: active learning driven by the ground-truth epistemic score
// beats total uncertainty, which beats random; aleatoric does no better than
// random; the misspecified variant falls below the correct one.

void criterion_al_orderings() {
    const char* what = "ground-truth uncertainty orderings on the AL benchmark";
    try {
        const fs::path dir = fresh_dir("orderings");
        const char* cfg = R"({
  "source": {"kind": "csbm", "n": 100, "num_classes": 7, "expected_degree": 4.0, "snr": 2.0, "delta_x": 1.0, "sigma_x": 1.0},
  "strategies": [
    {"kind": "random"},
    {"kind": "gt_epistemic", "inference": "mean_field"},
    {"kind": "gt_total", "inference": "mean_field"},
    {"kind": "gt_aleatoric", "inference": "mean_field"},
    {"kind": "gt_epistemic_misspecified", "inference": "mean_field"}
  ],
  "budget": 35,
  "num_splits": 5, "num_runs": 5,
  "decoder": "bayes",
  "decode_inference": "mean_field"
})";
        write_file(dir / "cfg.json", cfg);
        gal::CommandOptions opts;
        opts.config_path = dir / "cfg.json";
        opts.out_dir = dir / "out";
        const int rc = gal::cmd_run(opts);
        if (rc != 0) {
            report(4, false, what, "run command exited with " + std::to_string(rc));
            return;
        }

        const json summary = json::parse(read_file(dir / "out" / "summary.json"));
        std::map<std::string, double> auc;
        for (const auto& s : summary.at("strategies"))
            auc[s.at("strategy").get<std::string>()] = s.at("mean_auc").get<double>();

        const double random = auc.at("random");
        const double epi = auc.at("gt_epistemic");
        const double total = auc.at("gt_total");
        const double alea = auc.at("gt_aleatoric");
        const double mis = auc.at("gt_epistemic_misspecified");

        const bool ordering = epi > total && total > random;
        const bool alea_flat = alea <= random + 0.01;
        const bool mis_below = mis < epi;
        const bool margin = epi - random >= 0.02;
        report(4, ordering && alea_flat && mis_below && margin, what,
               "mean AUC: epistemic " + fmt(epi) + " > total " + fmt(total) + " > random " +
                   fmt(random) + "; aleatoric " + fmt(alea) + " <= random+0.01; misspecified " +
                   fmt(mis) + " < epistemic; margin " + fmt(epi - random) + " >= 0.02");
    } catch (const std::exception& e) {
        report_error(4, what, e);
    }
}

// ---------------------------------------------------------------------------
// Criterion 5: the fast scores match their literal retraining recipes.

void criterion_score_recipes() {
    const char* what = "mp/esp scores equal step-by-step reference recipes";
    try {
        double worst = 0.0;
        bool shapes_ok = true;

        for (auto [n, C, seed] : {std::tuple{8, 2, 101ull}, std::tuple{10, 3, 202ull}}) {
            // sampled instance with every class represented among the observed
            gal::CsbmParams params;
            std::uint64_t attempt = 0;
            gal::Graph g(1, Eigen::MatrixXd::Zero(1, 1), {0}, {});
            while (true) {
                params = gal::make_params(n, C, 3.0, 2.0, 1.5, 1.0,
                                          gal::derive_seed(seed + attempt, 1));
                g = gal::sample(params, gal::derive_seed(seed + attempt, 2));
                std::vector<char> seen(static_cast<std::size_t>(C), 0);
                for (int i = 0; i < C + 1; ++i) seen[std::size_t(g.label(i))] = 1;
                bool all = true;
                for (char x : seen) all = all && x != 0;
                if (all) break;
                ++attempt;
            }
            gal::LabelState state(g);
            for (int i = 0; i < C + 1; ++i) state.observe(i);

            const gal::SgcConfig sgc;
            const gal::ApproxScores mp = gal::mp_scores(g, state, {});
            const testsupport::RecipeScores mp_ref = testsupport::mp_recipe(g, state, sgc);
            shapes_ok = shapes_ok && mp.candidates == mp_ref.candidates;
            for (std::size_t t = 0; t < mp.score.size(); ++t) {
                shapes_ok = shapes_ok && mp.aux_train_size[t] == n - 1;
                worst = std::max(worst, std::abs(std::log(mp.score[t]) - mp_ref.log_score[t]));
            }

            const gal::ApproxScores esp = gal::esp_scores(g, state, {});
            const testsupport::RecipeScores esp_ref = testsupport::esp_recipe(g, state, sgc);
            shapes_ok = shapes_ok && esp.candidates == esp_ref.candidates;
            for (std::size_t t = 0; t < esp.score.size(); ++t) {
                shapes_ok = shapes_ok && esp.aux_train_size[t] == C + 2;  // |O| + 1
                worst = std::max(worst, std::abs(esp.score[t] - esp_ref.log_score[t]));
            }
        }

        // single-unknown reduction: the class sum collapses to the base row
        {
            gal::CsbmParams params = gal::make_params(8, 2, 3.0, 2.0, 1.5, 1.0, 7);
            const gal::Graph g = gal::sample(params, 8);
            gal::LabelState state(g);
            for (int i = 0; i < 7; ++i) state.observe(i);
            const int u = state.unobserved()[0];
            const Eigen::MatrixXd diffused = gal::diffuse(g, 2);
            std::vector<int> obs = state.observed();
            std::vector<int> labels;
            for (int j : obs) labels.push_back(g.label(j));
            const gal::SgcModel base = gal::fit(diffused, obs, labels, 2, {});
            const Eigen::MatrixXd log_base = gal::log_predict_proba(base, diffused);
            const Eigen::MatrixXd proba = gal::predict_proba(base, diffused);
            const int yhat = testsupport::row_argmax(proba, u);
            const gal::ApproxScores esp = gal::esp_scores(g, state, {});
            worst = std::max(worst,
                             std::abs(esp.score[0] - gal::floor_log(log_base(u, yhat))));
        }

        report(5, shapes_ok && worst < 1e-9, what,
               "max |log gap| " + fmt(worst) + " across both scorers, tolerance 1e-9");
    } catch (const std::exception& e) {
        report_error(5, what, e);
    }
}

// ---------------------------------------------------------------------------
// Criterion 6: the practical esp strategy helps on the same benchmark, and the
// generate -> run dataset path works end to end.

void criterion_esp_benchmark() {
    const char* what = "esp acquisition beats random on the benchmark";
    try {
        const fs::path dir = fresh_dir("esp");
        const char* cfg = R"({
  "source": {"kind": "csbm", "n": 100, "num_classes": 7, "expected_degree": 4.0, "snr": 2.0, "delta_x": 1.0, "sigma_x": 1.0},
  "strategies": [{"kind": "random"}, {"kind": "esp"}],
  "budget": 35,
  "num_splits": 5, "num_runs": 5
})";
        write_file(dir / "cfg.json", cfg);
        gal::CommandOptions opts;
        opts.config_path = dir / "cfg.json";
        opts.out_dir = dir / "out";
        const int rc = gal::cmd_run(opts);
        if (rc != 0) {
            report(6, false, what, "run command exited with " + std::to_string(rc));
            return;
        }
        const json summary = json::parse(read_file(dir / "out" / "summary.json"));
        double delta = -1.0;
        for (const auto& s : summary.at("strategies"))
            if (s.at("strategy") == "esp") delta = s.at("mean_delta_auc_vs_baseline").get<double>();

        // dataset path: generate, then run the same strategies on the files
        json gen;
        gen["source"] = {{"kind", "csbm"}, {"n", 40}, {"num_classes", 2}, {"seed", 3}};
        write_file(dir / "gen.json", gen.dump());
        gal::CommandOptions gen_opts;
        gen_opts.config_path = dir / "gen.json";
        gen_opts.out_dir = dir / "data";
        const int gen_rc = gal::cmd_generate(gen_opts);

        json ds;
        ds["source"] = {{"kind", "dataset"}, {"path", (dir / "data").string()}};
        ds["strategies"] = json::array({{{"kind", "random"}}, {{"kind", "esp"}}});
        ds["budget"] = 5;
        write_file(dir / "ds.json", ds.dump());
        gal::CommandOptions ds_opts;
        ds_opts.config_path = dir / "ds.json";
        ds_opts.out_dir = dir / "ds_out";
        const int ds_rc = gal::cmd_run(ds_opts);
        const auto curves = read_file(dir / "ds_out" / "curves.csv");
        const auto data_rows = std::count(curves.begin(), curves.end(), '\n') - 1;

        report(6, delta > 0.0 && gen_rc == 0 && ds_rc == 0 && data_rows == 12, what,
               "paired AUC delta vs random " + fmt(delta) +
                   " > 0; dataset pipeline rows " + std::to_string(data_rows));
    } catch (const std::exception& e) {
        report_error(6, what, e);
    }
}

// ---------------------------------------------------------------------------
// Criterion 7: the classifier solver is trustworthy — analytic gradients match
// finite differences, separable data is fit perfectly, refits are bit-equal.

void criterion_classifier_solver() {
    const char* what = "classifier gradients, separability, and refit stability";
    try {
        Eigen::MatrixXd x(9, 2);
        std::vector<int> nodes, labels;
        const double offs[] = {-0.1, 0.0, 0.1};
        for (int c = 0; c < 3; ++c)
            for (int k = 0; k < 3; ++k) {
                x(3 * c + k, 0) = 4.0 * c + offs[k];
                x(3 * c + k, 1) = offs[(k + 1) % 3];
                nodes.push_back(3 * c + k);
                labels.push_back(c);
            }
        gal::SgcConfig cfg;
        cfg.l2_weight = 0.7;

        const gal::SgcModel model = gal::fit(x, nodes, labels, 3, cfg);
        double worst_fd = 0.0;
        for (auto point : {0, 1}) {
            Eigen::MatrixXd w = point == 0 ? model.weights : Eigen::MatrixXd::Constant(2, 3, 0.3);
            Eigen::VectorXd b = point == 0 ? model.bias : Eigen::VectorXd::Constant(3, -0.2);
            Eigen::VectorXd grad;
            gal::sgc_objective(x, nodes, labels, 3, cfg, w, b, &grad);
            const double h = 1e-5;
            for (int k = 0; k < 9; ++k) {
                Eigen::MatrixXd wp = w, wm = w;
                Eigen::VectorXd bp = b, bm = b;
                if (k < 6) {
                    wp(k % 2, k / 2) += h;
                    wm(k % 2, k / 2) -= h;
                } else {
                    bp(k - 6) += h;
                    bm(k - 6) -= h;
                }
                const double fd = (gal::sgc_objective(x, nodes, labels, 3, cfg, wp, bp) -
                                   gal::sgc_objective(x, nodes, labels, 3, cfg, wm, bm)) /
                                  (2.0 * h);
                worst_fd = std::max(worst_fd, std::abs(grad(k) - fd));
            }
        }

        const Eigen::MatrixXd proba = gal::predict_proba(model, x);
        int hits = 0;
        for (std::size_t t = 0; t < nodes.size(); ++t)
            hits += testsupport::row_argmax(proba, nodes[t]) == labels[t] ? 1 : 0;

        const gal::SgcModel again = gal::fit(x, nodes, labels, 3, cfg);
        const bool bitwise = (model.weights - again.weights).cwiseAbs().maxCoeff() == 0.0 &&
                             (model.bias - again.bias).cwiseAbs().maxCoeff() == 0.0;

        report(7, worst_fd < 1e-4 && hits == 9 && model.converged && bitwise, what,
               "max gradient gap " + fmt(worst_fd) + " < 1e-4, train accuracy " +
                   std::to_string(hits) + "/9, refit bitwise " + (bitwise ? "yes" : "no"));
    } catch (const std::exception& e) {
        report_error(7, what, e);
    }
}

// ---------------------------------------------------------------------------
// Criterion 8: end-to-end runs are bitwise reproducible, including across
// worker counts, and generation is too.

void criterion_reproducibility() {
    const char* what = "bitwise reproducibility across reruns and thread counts";
    try {
        const fs::path dir = fresh_dir("repro");
        const char* cfg = R"({
  "source": {"kind": "csbm", "n": 40, "num_classes": 3, "expected_degree": 4.0, "snr": 2.0},
  "strategies": [
    {"kind": "random"},
    {"kind": "gt_epistemic", "inference": "mean_field"},
    {"kind": "mp"}
  ],
  "budget": 8,
  "num_splits": 2, "num_runs": 2
})";
        write_file(dir / "cfg.json", cfg);

        auto run_into = [&](const std::string& name, int jobs) {
            gal::CommandOptions opts;
            opts.config_path = dir / "cfg.json";
            opts.out_dir = dir / name;
            opts.jobs = jobs;
            return gal::cmd_run(opts);
        };
        const int ra = run_into("a", 1);
        const int rb = run_into("b", 1);
        const int rc = run_into("c", 3);
        const std::string curves = read_file(dir / "a" / "curves.csv");
        const bool runs_equal = ra == 0 && rb == 0 && rc == 0 && !curves.empty() &&
                                curves == read_file(dir / "b" / "curves.csv") &&
                                curves == read_file(dir / "c" / "curves.csv") &&
                                read_file(dir / "a" / "summary.json") ==
                                    read_file(dir / "c" / "summary.json");

        json gen;
        gen["source"] = {{"kind", "csbm"}, {"n", 30}, {"num_classes", 2}, {"seed", 11}};
        write_file(dir / "gen.json", gen.dump());
        gal::CommandOptions g1;
        g1.config_path = dir / "gen.json";
        g1.out_dir = dir / "g1";
        gal::CommandOptions g2 = g1;
        g2.out_dir = dir / "g2";
        const bool gen_equal = gal::cmd_generate(g1) == 0 && gal::cmd_generate(g2) == 0 &&
                               read_file(dir / "g1" / "features.csv") ==
                                   read_file(dir / "g2" / "features.csv") &&
                               read_file(dir / "g1" / "edges.csv") ==
                                   read_file(dir / "g2" / "edges.csv");

        report(8, runs_equal && gen_equal, what,
               std::string("run outputs identical: ") + (runs_equal ? "yes" : "no") +
                   ", generated datasets identical: " + (gen_equal ? "yes" : "no"));
    } catch (const std::exception& e) {
        report_error(8, what, e);
    }
}

}  // namespace

int main() {
    std::printf("acceptance checks\n");
    criteria_identity_and_constants();
    criterion_mean_field_error();
    criterion_al_orderings();
    criterion_score_recipes();
    criterion_esp_benchmark();
    criterion_classifier_solver();
    criterion_reproducibility();
    if (g_failures == 0) {
        std::printf("all criteria passed\n");
        return 0;
    }
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
}
