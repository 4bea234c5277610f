#include "gal/experiment_config.hpp"

#include <fstream>
#include <set>

#include "gal/error.hpp"

namespace gal {
namespace {

using json = nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ParseError(where + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!allowed.count(key)) throw ParseError(where + ": unknown key '" + key + "'");
    }
}

template <class T>
T get_or(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ParseError("key '" + key + "' has the wrong type");
    }
}

InferenceKind parse_inference(const std::string& s, const std::string& where) {
    if (s == "auto") return InferenceKind::automatic;
    if (s == "exact") return InferenceKind::exact;
    if (s == "mean_field") return InferenceKind::mean_field;
    throw ParseError(where + ": inference must be auto, exact, or mean_field, got '" + s + "'");
}

void parse_source(const json& j, ExperimentConfig& cfg) {
    check_keys(j, {"kind", "n", "num_classes", "expected_degree", "snr", "delta_x", "sigma_x",
                   "feature_dim", "clamp_affiliation", "seed", "path", "normalize_features"},
               "source");
    const auto kind = get_or<std::string>(j, "kind", "csbm");
    if (kind == "csbm") {
        cfg.source_kind = ExperimentConfig::SourceKind::csbm;
        if (!j.contains("n") || !j.contains("num_classes"))
            throw ParseError("csbm source needs 'n' and 'num_classes'");
        cfg.csbm.n = j.at("n").get<int>();
        cfg.csbm.num_classes = j.at("num_classes").get<int>();
        cfg.csbm.expected_degree = get_or<double>(j, "expected_degree", cfg.csbm.expected_degree);
        cfg.csbm.snr = get_or<double>(j, "snr", cfg.csbm.snr);
        cfg.csbm.delta_x = get_or<double>(j, "delta_x", cfg.csbm.delta_x);
        cfg.csbm.sigma_x = get_or<double>(j, "sigma_x", cfg.csbm.sigma_x);
        cfg.csbm.feature_dim = get_or<int>(j, "feature_dim", cfg.csbm.feature_dim);
        cfg.csbm.clamp_affiliation = get_or<bool>(j, "clamp_affiliation", cfg.csbm.clamp_affiliation);
        cfg.csbm.seed = get_or<std::uint64_t>(j, "seed", cfg.csbm.seed);
    } else if (kind == "dataset") {
        cfg.source_kind = ExperimentConfig::SourceKind::dataset;
        if (!j.contains("path")) throw ParseError("dataset source needs 'path'");
        cfg.dataset_path = j.at("path").get<std::string>();
        cfg.normalize_dataset_features = get_or<bool>(j, "normalize_features", true);
    } else {
        throw ParseError("source kind must be csbm or dataset, got '" + kind + "'");
    }
}

void parse_strategies(const json& j, ExperimentConfig& cfg) {
    if (!j.is_array()) throw ParseError("'strategies' must be an array");
    for (const auto& entry : j) {
        check_keys(entry, {"kind", "inference"}, "strategy");
        if (!entry.contains("kind")) throw ParseError("strategy entry needs 'kind'");
        Strategy s;
        s.kind = strategy_kind_from_string(entry.at("kind").get<std::string>());
        s.inference = parse_inference(get_or<std::string>(entry, "inference", "auto"), "strategy");
        cfg.strategies.push_back(s);
    }
}

void parse_seeds(const json& root, ExperimentConfig& cfg) {
    if (root.contains("seeds")) {
        if (root.contains("num_splits") || root.contains("num_runs"))
            throw ParseError("give either 'seeds' or num_splits/num_runs, not both");
        for (const auto& entry : root.at("seeds")) {
            check_keys(entry, {"split", "run"}, "seed pair");
            SeedPair p;
            p.split_seed = entry.at("split").get<std::uint64_t>();
            p.run_seed = entry.at("run").get<std::uint64_t>();
            cfg.seeds.push_back(p);
        }
        return;
    }
    const int splits = get_or<int>(root, "num_splits", 1);
    const int runs = get_or<int>(root, "num_runs", 1);
    const auto base = get_or<std::uint64_t>(root, "seed_base", 1);
    if (splits < 1 || runs < 1) throw ValidationError("num_splits and num_runs must be >= 1");
    for (int s = 0; s < splits; ++s)
        for (int r = 0; r < runs; ++r)
            cfg.seeds.push_back({base + static_cast<std::uint64_t>(s),
                                 base + static_cast<std::uint64_t>(r)});
}

void parse_classifier(const json& j, SgcConfig& cfg) {
    check_keys(j, {"diffusion_steps", "l2_weight", "class_balanced", "solver_tolerance",
                   "max_solver_iterations", "energy_temperature"},
               "classifier");
    cfg.diffusion_steps = get_or<int>(j, "diffusion_steps", cfg.diffusion_steps);
    cfg.l2_weight = get_or<double>(j, "l2_weight", cfg.l2_weight);
    cfg.class_balanced = get_or<bool>(j, "class_balanced", cfg.class_balanced);
    cfg.solver_tolerance = get_or<double>(j, "solver_tolerance", cfg.solver_tolerance);
    cfg.max_solver_iterations = get_or<int>(j, "max_solver_iterations", cfg.max_solver_iterations);
    cfg.energy_temperature = get_or<double>(j, "energy_temperature", cfg.energy_temperature);
    if (cfg.diffusion_steps < 0 || cfg.l2_weight < 0.0 || !(cfg.energy_temperature > 0.0))
        throw ValidationError("classifier: need diffusion_steps >= 0, l2_weight >= 0, temperature > 0");
}

void parse_mean_field(const json& j, MeanFieldConfig& cfg) {
    check_keys(j, {"max_iterations", "tolerance", "schedule", "damping", "init"}, "mean_field");
    cfg.max_iterations = get_or<int>(j, "max_iterations", cfg.max_iterations);
    cfg.tolerance = get_or<double>(j, "tolerance", cfg.tolerance);
    cfg.damping = get_or<double>(j, "damping", cfg.damping);
    const auto schedule = get_or<std::string>(j, "schedule", "sequential");
    if (schedule == "sequential") cfg.schedule = MeanFieldConfig::Schedule::sequential;
    else if (schedule == "parallel") cfg.schedule = MeanFieldConfig::Schedule::parallel;
    else throw ParseError("mean_field.schedule must be sequential or parallel");
    const auto init = get_or<std::string>(j, "init", "feature_likelihood");
    if (init == "uniform") cfg.init = MeanFieldConfig::Init::uniform;
    else if (init == "feature_likelihood") cfg.init = MeanFieldConfig::Init::feature_likelihood;
    else throw ParseError("mean_field.init must be uniform or feature_likelihood");
    if (!(cfg.tolerance > 0.0) || cfg.max_iterations < 1 ||
        !(cfg.damping >= 0.0 && cfg.damping < 1.0))
        throw ValidationError("mean_field: need tolerance > 0, max_iterations >= 1, damping in [0,1)");
}

void parse_verify(const json& j, VerifyConfig& cfg) {
    check_keys(j, {"instances", "n_min", "n_max", "classes", "expected_degree", "snr", "delta_x",
                   "sigma_x", "seed", "tolerance", "inject_sign_flip"},
               "verify");
    cfg.instances = get_or<int>(j, "instances", cfg.instances);
    cfg.n_min = get_or<int>(j, "n_min", cfg.n_min);
    cfg.n_max = get_or<int>(j, "n_max", cfg.n_max);
    cfg.classes = get_or<std::vector<int>>(j, "classes", cfg.classes);
    cfg.expected_degree = get_or<double>(j, "expected_degree", cfg.expected_degree);
    cfg.snr = get_or<double>(j, "snr", cfg.snr);
    cfg.delta_x = get_or<double>(j, "delta_x", cfg.delta_x);
    cfg.sigma_x = get_or<double>(j, "sigma_x", cfg.sigma_x);
    cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed);
    cfg.tolerance = get_or<double>(j, "tolerance", cfg.tolerance);
    cfg.inject_sign_flip = get_or<bool>(j, "inject_sign_flip", cfg.inject_sign_flip);
    if (cfg.instances < 1 || cfg.n_min < 2 || cfg.n_max < cfg.n_min || cfg.classes.empty())
        throw ValidationError("verify: need instances >= 1, 2 <= n_min <= n_max, classes nonempty");
}

void parse_approx_error(const json& j, ApproxErrorConfig& cfg) {
    check_keys(j, {"ns", "samples", "num_classes", "expected_degree", "snr", "delta_x", "sigma_x",
                   "seed"},
               "approx_error");
    cfg.ns = get_or<std::vector<int>>(j, "ns", cfg.ns);
    cfg.samples = get_or<int>(j, "samples", cfg.samples);
    cfg.num_classes = get_or<int>(j, "num_classes", cfg.num_classes);
    cfg.expected_degree = get_or<double>(j, "expected_degree", cfg.expected_degree);
    cfg.snr = get_or<double>(j, "snr", cfg.snr);
    cfg.delta_x = get_or<double>(j, "delta_x", cfg.delta_x);
    cfg.sigma_x = get_or<double>(j, "sigma_x", cfg.sigma_x);
    cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed);
    if (cfg.ns.empty() || cfg.samples < 1 || cfg.num_classes < 2)
        throw ValidationError("approx_error: need ns nonempty, samples >= 1, num_classes >= 2");
}

}  // namespace

HarnessConfig ExperimentConfig::harness() const {
    HarnessConfig h;
    h.budget = budget;
    h.test_fraction = test_fraction;
    h.classifier = classifier;
    h.mean_field = mean_field;
    h.oracle_term_cap = oracle_term_cap;
    h.decoder = decoder;
    h.decode_inference = decode_inference;
    h.candidate_cap = candidate_cap;
    h.ppr_teleport = ppr_teleport;
    h.ppr_iterations = ppr_iterations;
    return h;
}

ExperimentConfig parse_config(const json& root) {
    check_keys(root,
               {"format_version", "source", "strategies", "budget", "seeds", "num_splits",
                "num_runs", "seed_base", "test_fraction", "classifier", "mean_field", "oracle",
                "decoder", "decode_inference", "candidate_cap", "ppr", "baseline", "verify",
                "approx_error"},
               "config");
    const int version = get_or<int>(root, "format_version", 1);
    if (version != 1) throw ParseError("unsupported format_version " + std::to_string(version));

    ExperimentConfig cfg;
    if (!root.contains("source")) throw ParseError("config needs a 'source' block");
    parse_source(root.at("source"), cfg);
    if (root.contains("strategies")) parse_strategies(root.at("strategies"), cfg);
    cfg.budget = get_or<int>(root, "budget", 0);
    if (cfg.budget < 0) throw ValidationError("budget must be >= 0");
    parse_seeds(root, cfg);
    cfg.test_fraction = get_or<double>(root, "test_fraction", cfg.test_fraction);
    if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0))
        throw ValidationError("test_fraction must lie in (0,1)");
    if (root.contains("classifier")) parse_classifier(root.at("classifier"), cfg.classifier);
    if (root.contains("mean_field")) parse_mean_field(root.at("mean_field"), cfg.mean_field);
    if (root.contains("oracle")) {
        check_keys(root.at("oracle"), {"term_cap"}, "oracle");
        cfg.oracle_term_cap = get_or<std::uint64_t>(root.at("oracle"), "term_cap", cfg.oracle_term_cap);
        if (cfg.oracle_term_cap < 1) throw ValidationError("oracle.term_cap must be >= 1");
    }
    if (root.contains("decoder")) {
        const auto d = root.at("decoder").get<std::string>();
        if (d == "sgc") cfg.decoder = DecoderKind::sgc;
        else if (d == "bayes") cfg.decoder = DecoderKind::bayes;
        else throw ParseError("decoder must be sgc or bayes, got '" + d + "'");
    }
    cfg.decode_inference =
        parse_inference(get_or<std::string>(root, "decode_inference", "auto"), "config");
    cfg.candidate_cap = get_or<int>(root, "candidate_cap", 0);
    if (cfg.candidate_cap < 0) throw ValidationError("candidate_cap must be >= 0");
    if (root.contains("ppr")) {
        check_keys(root.at("ppr"), {"teleport", "iterations"}, "ppr");
        cfg.ppr_teleport = get_or<double>(root.at("ppr"), "teleport", cfg.ppr_teleport);
        cfg.ppr_iterations = get_or<int>(root.at("ppr"), "iterations", cfg.ppr_iterations);
        if (!(cfg.ppr_teleport > 0.0 && cfg.ppr_teleport <= 1.0) || cfg.ppr_iterations < 1)
            throw ValidationError("ppr: need teleport in (0,1] and iterations >= 1");
    }
    cfg.baseline = get_or<std::string>(root, "baseline", cfg.baseline);
    if (root.contains("verify")) parse_verify(root.at("verify"), cfg.verify);
    if (root.contains("approx_error")) parse_approx_error(root.at("approx_error"), cfg.approx_error);

    // Cross-field rules that cannot wait until run time.
    if (cfg.source_kind == ExperimentConfig::SourceKind::dataset) {
        for (const auto& s : cfg.strategies)
            if (is_ground_truth(s.kind))
                throw ValidationError("ground-truth strategies need a csbm source");
        if (cfg.decoder && *cfg.decoder == DecoderKind::bayes)
            throw ValidationError("the bayes decoder needs a csbm source");
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config " + path.string());
    json root;
    try {
        root = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return parse_config(root);
}

}  // namespace gal
