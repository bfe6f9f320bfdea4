#include "cli/manifest.hpp"

#include <cstdlib>
#include <set>

#include <fmt/format.h>

#include "radfed/error.hpp"
#include "radfed/io.hpp"

namespace radfed::cli {

using nlohmann::json;

namespace {

void check_keys(const json& obj, std::string_view where, const std::set<std::string>& allowed) {
    if (!obj.is_object()) {
        throw ConfigError(fmt::format("{} must be an object", where));
    }
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) {
            throw ConfigError(fmt::format("unknown key '{}' in {}", key, where));
        }
    }
}

template <class T>
T get(const json& obj, const char* key, std::string_view where) {
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(fmt::format("{}.{} has the wrong type", where, key));
    }
}

template <class T>
void read(const json& obj, const char* key, std::string_view where, T& out) {
    if (obj.contains(key)) {
        out = get<T>(obj, key, where);
    }
}

}  // namespace

fed::FederatedConfig apply_federated(const json& j, fed::FederatedConfig cfg) {
    constexpr std::string_view where = "federated";
    check_keys(j, where,
               {"algorithm", "participation", "rounds", "redistribution_rounds", "alpha", "prox_mu",
                "aggregation", "training", "model", "eval_every", "metric", "standardization",
                "initial_importance", "track_local_divergence", "centralized_twin"});
    if (j.contains("algorithm")) {
        cfg.algorithm = fed::algorithm_from_string(get<std::string>(j, "algorithm", where));
    }
    read(j, "participation", where, cfg.participation);
    read(j, "rounds", where, cfg.rounds);
    read(j, "redistribution_rounds", where, cfg.redistribution_rounds);
    read(j, "alpha", where, cfg.alpha);
    read(j, "prox_mu", where, cfg.prox_mu);
    if (j.contains("aggregation")) {
        const auto a = get<std::string>(j, "aggregation", where);
        if (a == "weighted") {
            cfg.aggregation = fed::Aggregation::weighted;
        } else if (a == "unweighted") {
            cfg.aggregation = fed::Aggregation::unweighted;
        } else {
            throw ConfigError(fmt::format("unknown aggregation '{}'", a));
        }
    }
    if (j.contains("training")) {
        const auto& t = j.at("training");
        check_keys(t, "federated.training",
                   {"batch_size", "epochs", "learning_rate", "importance_mode"});
        read(t, "batch_size", "federated.training", cfg.training.batch_size);
        read(t, "epochs", "federated.training", cfg.training.epochs);
        read(t, "learning_rate", "federated.training", cfg.training.learning_rate);
        if (t.contains("importance_mode")) {
            const auto m = get<std::string>(t, "importance_mode", "federated.training");
            if (m == "batch_average") {
                cfg.training.importance_mode = model::ImportanceMode::batch_average;
            } else if (m == "per_sample_final") {
                cfg.training.importance_mode = model::ImportanceMode::per_sample_final;
            } else {
                throw ConfigError(fmt::format("unknown importance mode '{}'", m));
            }
        }
    }
    if (j.contains("model")) {
        const auto& m = j.at("model");
        check_keys(m, "federated.model", {"kind", "hidden", "l2"});
        if (m.contains("kind")) {
            try {
                cfg.model.kind = model::model_kind_from_string(get<std::string>(m, "kind", "federated.model"));
            } catch (const ParameterError& e) {
                throw ConfigError(e.what());
            }
        }
        read(m, "hidden", "federated.model", cfg.model.hidden);
        read(m, "l2", "federated.model", cfg.model.l2);
    }
    read(j, "eval_every", where, cfg.eval_every);
    if (j.contains("metric")) {
        try {
            cfg.metric = metrics::metric_from_string(get<std::string>(j, "metric", where));
        } catch (const ParameterError& e) {
            throw ConfigError(e.what());
        }
    }
    if (j.contains("standardization")) {
        const auto s = get<std::string>(j, "standardization", where);
        if (s == "global") {
            cfg.standardization = data::Scope::global;
        } else if (s == "local") {
            cfg.standardization = data::Scope::local;
        } else if (s == "none") {
            cfg.standardization.reset();
        } else {
            throw ConfigError(fmt::format("unknown standardization '{}'", s));
        }
    }
    read(j, "initial_importance", where, cfg.initial_importance);
    read(j, "track_local_divergence", where, cfg.track_local_divergence);
    read(j, "centralized_twin", where, cfg.centralized_twin);
    return cfg;
}

json federated_to_json(const fed::FederatedConfig& cfg) {
    json j;
    j["algorithm"] = fed::to_string(cfg.algorithm);
    j["participation"] = cfg.participation;
    j["rounds"] = cfg.rounds;
    j["redistribution_rounds"] = cfg.redistribution_rounds;
    j["alpha"] = cfg.alpha;
    j["prox_mu"] = cfg.prox_mu;
    j["aggregation"] = cfg.aggregation == fed::Aggregation::weighted ? "weighted" : "unweighted";
    j["training"] = {{"batch_size", cfg.training.batch_size},
                     {"epochs", cfg.training.epochs},
                     {"learning_rate", cfg.training.learning_rate},
                     {"importance_mode", cfg.training.importance_mode ==
                                                 model::ImportanceMode::batch_average
                                             ? "batch_average"
                                             : "per_sample_final"}};
    j["model"] = {{"kind", model::to_string(cfg.model.kind)},
                  {"hidden", cfg.model.hidden},
                  {"l2", cfg.model.l2}};
    j["eval_every"] = cfg.eval_every;
    j["metric"] = metrics::to_string(cfg.metric);
    j["standardization"] = !cfg.standardization                      ? "none"
                           : *cfg.standardization == data::Scope::global ? "global"
                                                                         : "local";
    j["initial_importance"] = cfg.initial_importance;
    j["track_local_divergence"] = cfg.track_local_divergence;
    j["centralized_twin"] = cfg.centralized_twin;
    return j;
}

fed::FederatedConfig Manifest::config_for(fed::Algorithm algorithm) const {
    fed::FederatedConfig cfg = federated;
    cfg.algorithm = algorithm;
    const auto name = fed::to_string(algorithm);
    if (per_algorithm.contains(name)) {
        cfg = apply_federated(per_algorithm.at(name), cfg);
        cfg.algorithm = algorithm;
    }
    return cfg;
}

Manifest parse_manifest(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(fmt::format("manifest is not valid JSON: {}", e.what()));
    }
    check_keys(doc, "manifest",
               {"dataset", "partition", "folds", "seeds", "algorithms", "federated",
                "per_algorithm", "output_dir"});
    Manifest m;
    m.hash = io::sha256_hex(text);

    if (doc.contains("dataset")) {
        const auto& d = doc.at("dataset");
        check_keys(d, "dataset", {"path", "schema", "label", "categorical"});
        DatasetSpec spec;
        spec.path = get<std::string>(d, "path", "dataset");
        if (d.contains("schema")) {
            spec.schema_path = get<std::string>(d, "schema", "dataset");
        }
        read(d, "label", "dataset", spec.label);
        read(d, "categorical", "dataset", spec.categorical);
        m.dataset = spec;
    }
    if (doc.contains("partition")) {
        const auto& p = doc.at("partition");
        check_keys(p, "partition",
                   {"clients", "mu", "lambda", "theta", "features", "burn_in", "steps", "xi", "seed"});
        read(p, "clients", "partition", m.partition.clients);
        read(p, "mu", "partition", m.partition.mu);
        read(p, "lambda", "partition", m.partition.lambda);
        if (p.contains("theta")) {
            m.partition.theta = get<double>(p, "theta", "partition");
        }
        read(p, "features", "partition", m.partition.features);
        read(p, "burn_in", "partition", m.partition.walk.burn_in);
        read(p, "steps", "partition", m.partition.walk.steps);
        read(p, "xi", "partition", m.partition.walk.xi);
        read(p, "seed", "partition", m.partition.seed);
    }
    if (doc.contains("folds")) {
        const auto& f = doc.at("folds");
        check_keys(f, "folds", {"count", "nested", "seed"});
        read(f, "count", "folds", m.folds.count);
        read(f, "nested", "folds", m.folds.nested);
        read(f, "seed", "folds", m.folds.seed);
    }
    read(doc, "seeds", "manifest", m.seeds);
    if (m.seeds.empty()) {
        throw ConfigError("manifest needs at least one seed");
    }
    if (doc.contains("algorithms")) {
        m.algorithms.clear();
        for (const auto& name : get<std::vector<std::string>>(doc, "algorithms", "manifest")) {
            m.algorithms.push_back(fed::algorithm_from_string(name));
        }
        if (m.algorithms.empty()) {
            throw ConfigError("manifest needs at least one algorithm");
        }
    }
    if (doc.contains("federated")) {
        m.federated = apply_federated(doc.at("federated"), m.federated);
    }
    if (doc.contains("per_algorithm")) {
        m.per_algorithm = doc.at("per_algorithm");
        check_keys(m.per_algorithm, "per_algorithm", {"fedavg", "fedprox", "radfed", "radfed_is"});
        for (const auto& [name, overrides] : m.per_algorithm.items()) {
            apply_federated(overrides, m.federated);
        }
    }
    if (doc.contains("output_dir")) {
        m.output_dir = get<std::string>(doc, "output_dir", "manifest");
    }
    return m;
}

Manifest load_manifest(const std::filesystem::path& path) {
    std::string text;
    try {
        text = io::read_file(path);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    return parse_manifest(text);
}

std::size_t workers_from_env() {
    const char* raw = std::getenv("RADFED_WORKERS");
    if (raw == nullptr || *raw == '\0') {
        return 1;
    }
    char* end = nullptr;
    const long v = std::strtol(raw, &end, 10);
    if (*end != '\0' || v < 1) {
        throw ConfigError(fmt::format("RADFED_WORKERS must be a positive integer, got '{}'", raw));
    }
    return static_cast<std::size_t>(v);
}

}  // namespace radfed::cli
