#include <cmath>
#include <limits>
#include <map>
#include <optional>

#include <fmt/format.h>

#include "radfed/error.hpp"
#include "radfed/experiment.hpp"
#include "radfed/log.hpp"
#include "radfed/twin.hpp"

namespace radfed::fed {

namespace {

void check_split(const FoldSplit& split, std::size_t client_count) {
    if (split.train.empty()) {
        throw ConfigError("fold has no training clients");
    }
    std::vector<char> seen(client_count, 0);
    for (const auto* group : {&split.train, &split.validation, &split.test}) {
        for (std::size_t k : *group) {
            if (k >= client_count) {
                throw ConfigError(fmt::format("fold refers to client {} of {}", k, client_count));
            }
            if (seen[k]) {
                throw ConfigError(fmt::format("client {} appears in more than one fold group", k));
            }
            seen[k] = 1;
        }
    }
}

std::vector<const data::ClientDataset*> nonempty(const std::vector<data::ClientDataset>& clients,
                                                 const std::vector<std::size_t>& indices) {
    std::vector<const data::ClientDataset*> out;
    for (std::size_t k : indices) {
        if (!clients[k].empty()) {
            out.push_back(&clients[k]);
        }
    }
    return out;
}

std::optional<double> try_evaluate(const model::ModelState& m,
                                   const std::vector<const data::ClientDataset*>& clients,
                                   metrics::Metric metric) {
    if (clients.empty()) {
        return std::nullopt;
    }
    try {
        return metrics::evaluate(m, clients, metric);
    } catch (const UndefinedValueError& e) {
        logger().warn("{} is undefined here: {}", metrics::to_string(metric), e.what());
        return std::nullopt;
    }
}

}  // namespace

ExperimentResult run_experiment(const FederatedConfig& cfg,
                                std::span<const data::ClientDataset> clients,
                                const FoldSplit& split, const RoundObserver& observer) {
    cfg.validate();
    check_split(split, clients.size());

    std::vector<data::ClientDataset> local(clients.begin(), clients.end());
    if (cfg.standardization) {
        data::standardize(local, *cfg.standardization, split.train);
    }
    const auto train = nonempty(local, split.train);
    const auto validation = nonempty(local, split.validation);
    const auto test = nonempty(local, split.test);
    if (train.empty()) {
        throw ConfigError("every training client is empty");
    }
    if (train.size() < split.train.size()) {
        logger().warn("skipping {} empty training clients", split.train.size() - train.size());
    }

    const auto& first = *train.front();
    const auto family = cfg.model.family_for(first.features.cols(), first.class_counts.size());
    model::ModelState initial =
        model::init_model(family, derive_seed(cfg.seed, {tag("init")}), cfg.model.l2);

    std::vector<LocalClient> endpoints;
    endpoints.reserve(train.size());
    std::map<int, const data::ClientDataset*> by_id;
    for (const auto* c : train) {
        endpoints.emplace_back(*c);
        by_id[c->id] = c;
    }
    std::vector<const ClientEndpoint*> endpoint_ptrs;
    for (const auto& e : endpoints) {
        endpoint_ptrs.push_back(&e);
    }

    std::optional<metrics::CentralizedTwin> twin;
    if (cfg.centralized_twin) {
        twin.emplace(initial, cfg.training, derive_seed(cfg.seed, {tag("twin")}));
    }

    ExperimentResult result;
    result.final_model = initial;
    result.best_model = initial;
    Server server(cfg, endpoint_ptrs, initial);
    for (std::size_t t = 1; t <= cfg.rounds; ++t) {
        RoundRecord record = server.step();
        if (twin) {
            std::vector<const data::ClientDataset*> members;
            for (int id : metrics::participants(record)) {
                members.push_back(by_id.at(id));
            }
            twin->train_round(t, members);
            try {
                record.dc = metrics::dc_divergence(server.global(), twin->model());
                record.dc_distance = metrics::dc_distance(server.global(), twin->model());
            } catch (const UndefinedValueError&) {
                record.dc.reset();
                record.dc_distance.reset();
            }
        }
        if (t % cfg.eval_every == 0 || t == cfg.rounds) {
            record.validation_metric = try_evaluate(server.global(), validation, cfg.metric);
            if (record.validation_metric &&
                (!result.best_validation || *record.validation_metric > *result.best_validation)) {
                result.best_validation = record.validation_metric;
                result.best_model = server.global();
                result.best_round = t;
            }
        }
        if (observer) {
            observer(record, server.global(), twin ? &twin->model() : nullptr);
        }
        result.records.push_back(std::move(record));
    }
    result.final_model = server.global();
    if (!result.best_validation) {
        result.best_model = result.final_model;
        result.best_round = cfg.rounds;
    }
    result.test_metric = try_evaluate(result.best_model, test, cfg.metric)
                             .value_or(std::numeric_limits<double>::quiet_NaN());
    return result;
}

}  // namespace radfed::fed
