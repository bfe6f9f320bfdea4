#include <chrono>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "radfed/error.hpp"
#include "radfed/fedcore.hpp"
#include "radfed/metrics.hpp"

namespace radfed::fed {

std::string to_string(Algorithm algorithm) {
    switch (algorithm) {
        case Algorithm::fedavg: return "fedavg";
        case Algorithm::fedprox: return "fedprox";
        case Algorithm::radfed: return "radfed";
        case Algorithm::radfed_is: return "radfed_is";
    }
    return "unknown";
}

Algorithm algorithm_from_string(const std::string& name) {
    if (name == "fedavg") return Algorithm::fedavg;
    if (name == "fedprox") return Algorithm::fedprox;
    if (name == "radfed") return Algorithm::radfed;
    if (name == "radfed_is" || name == "radfed-is") return Algorithm::radfed_is;
    throw ConfigError(fmt::format("unknown algorithm '{}'", name));
}

bool is_radfed_family(Algorithm algorithm) {
    return algorithm == Algorithm::radfed || algorithm == Algorithm::radfed_is;
}

model::ModelFamily ModelSpec::family_for(std::size_t inputs, std::size_t classes) const {
    switch (kind) {
        case model::ModelKind::logistic: return model::ModelFamily::logistic(inputs, classes);
        case model::ModelKind::mlp: return model::ModelFamily::mlp(inputs, hidden, classes);
        case model::ModelKind::linear: return model::ModelFamily::linear(inputs);
    }
    throw ConfigError("unknown model kind");
}

std::size_t FederatedConfig::replicas(std::size_t training_clients) const {
    const auto m = static_cast<std::size_t>(
        std::floor(participation * static_cast<double>(training_clients)));
    return std::max<std::size_t>(m, 1);
}

void FederatedConfig::validate() const {
    if (!(participation > 0.0 && participation <= 1.0)) {
        throw ConfigError("participation must lie in (0, 1]");
    }
    if (is_radfed_family(algorithm) && redistribution_rounds < 1) {
        throw ConfigError("redistribution rounds must be at least 1");
    }
    if (algorithm == Algorithm::radfed_is && !(alpha > 0.0 && alpha < 1.0)) {
        throw ConfigError("alpha must lie in (0, 1)");
    }
    if (!(prox_mu >= 0.0) || !std::isfinite(prox_mu)) {
        throw ConfigError("prox_mu must be nonnegative");
    }
    if (eval_every < 1) {
        throw ConfigError("eval_every must be at least 1");
    }
    if (!(initial_importance > 0.0) || !std::isfinite(initial_importance)) {
        throw ConfigError("initial importance must be positive");
    }
    try {
        training.validate();
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
}

model::ClientUpdateResult LocalClient::update(const model::ModelState& model,
                                              const model::TrainingConfig& cfg,
                                              const model::ModelState* anchor, Rng& rng) const {
    return model::client_update(model, *data_, cfg, anchor, rng);
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

model::TrainingConfig local_training(const FederatedConfig& cfg) {
    model::TrainingConfig t = cfg.training;
    t.prox_mu = cfg.algorithm == Algorithm::fedprox ? cfg.prox_mu : 0.0;
    return t;
}

// Trains models[i] on clients[selected[i]] for every i, each on its own derived stream.
std::vector<model::ClientUpdateResult> train_all(const std::vector<model::ModelState>& models,
                                                 ClientList clients,
                                                 const std::vector<std::size_t>& selected,
                                                 const FederatedConfig& cfg,
                                                 const model::ModelState* anchor,
                                                 std::size_t round, std::size_t step) {
    const model::TrainingConfig training = local_training(cfg);
    std::vector<model::ClientUpdateResult> results(selected.size());
    parallel_for(selected.size(), cfg.workers, [&](std::size_t i) {
        const ClientEndpoint& client = *clients[selected[i]];
        Rng rng = make_rng(cfg.seed, {tag("train"), round, step,
                                      static_cast<std::uint64_t>(client.id())});
        try {
            results[i] = client.update(models[i], training, anchor, rng);
        } catch (const NumericError& e) {
            throw NumericError(fmt::format("round {}, step {}, client {}: {}", round, step,
                                           client.id(), e.what()));
        }
    });
    return results;
}

std::vector<int> ids_of(ClientList clients, const std::vector<std::size_t>& selected) {
    std::vector<int> ids;
    ids.reserve(selected.size());
    for (std::size_t k : selected) {
        ids.push_back(clients[k]->id());
    }
    return ids;
}

void check_clients(ClientList clients, std::size_t m) {
    if (clients.empty()) {
        throw ParameterError("no training clients");
    }
    if (m > clients.size()) {
        throw ParameterError(fmt::format("cannot sample {} of {} clients", m, clients.size()));
    }
}

}  // namespace

RoundOutcome run_radfed_round(const model::ModelState& global, ClientList clients,
                              const FederatedConfig& cfg, std::size_t round,
                              ImportanceState* importance) {
    const auto start = Clock::now();
    const std::size_t m = cfg.replicas(clients.size());
    check_clients(clients, m);
    if (importance != nullptr && importance->scores.size() != clients.size()) {
        throw ConsistencyError("importance state does not match the client list");
    }
    RoundOutcome out;
    out.record.round = round;
    out.record.algorithm = cfg.algorithm;
    std::vector<model::ModelState> replicas(m, global);
    double loss_sum = 0.0;
    std::size_t updates = 0;
    for (std::size_t s = 1; s <= cfg.redistribution_rounds; ++s) {
        Rng rng = make_rng(cfg.seed, {tag("sample"), round, s});
        const auto selected = importance != nullptr ? sample_importance(*importance, m, rng)
                                                    : sample_uniform(clients.size(), m, rng);
        auto results = train_all(replicas, clients, selected, cfg, nullptr, round, s);
        for (std::size_t i = 0; i < m; ++i) {
            replicas[i] = std::move(results[i].model);
            loss_sum += results[i].mean_loss;
            ++updates;
            if (importance != nullptr) {
                update_importance(*importance, selected[i], results[i].importance, cfg.alpha);
            }
        }
        out.record.selected.push_back(ids_of(clients, selected));
        if (cfg.track_local_divergence && m >= 2) {
            try {
                out.record.local_divergence.push_back(metrics::dl_divergence(replicas));
            } catch (const UndefinedValueError&) {
                out.record.local_divergence.push_back(std::numeric_limits<double>::quiet_NaN());
            }
        }
    }
    out.global = model::average_models(replicas);
    out.record.mean_train_loss = loss_sum / static_cast<double>(updates);
    out.record.duration_ms = elapsed_ms(start);
    return out;
}

RoundOutcome run_fedavg_round(const model::ModelState& global, ClientList clients,
                              const FederatedConfig& cfg, std::size_t round) {
    const auto start = Clock::now();
    const std::size_t m = cfg.replicas(clients.size());
    check_clients(clients, m);
    RoundOutcome out;
    out.record.round = round;
    out.record.algorithm = cfg.algorithm;
    // Step 1 of the same streams RADFed uses, so S = 1 lines up draw for draw.
    Rng rng = make_rng(cfg.seed, {tag("sample"), round, std::uint64_t{1}});
    const auto selected = sample_uniform(clients.size(), m, rng);
    const std::vector<model::ModelState> starts(m, global);
    const model::ModelState* anchor = cfg.algorithm == Algorithm::fedprox ? &global : nullptr;
    auto results = train_all(starts, clients, selected, cfg, anchor, round, 1);

    std::vector<model::ModelState> models;
    models.reserve(m);
    double loss_sum = 0.0;
    for (auto& r : results) {
        loss_sum += r.mean_loss;
        models.push_back(std::move(r.model));
    }
    if (cfg.aggregation == Aggregation::weighted) {
        std::vector<double> weights;
        for (std::size_t k : selected) {
            weights.push_back(static_cast<double>(clients[k]->sample_count()));
        }
        out.global = model::weighted_average_models(models, weights);
    } else {
        out.global = model::average_models(models);
    }
    out.record.selected.push_back(ids_of(clients, selected));
    if (cfg.track_local_divergence && m >= 2) {
        try {
            out.record.local_divergence.push_back(metrics::dl_divergence(models));
        } catch (const UndefinedValueError&) {
            out.record.local_divergence.push_back(std::numeric_limits<double>::quiet_NaN());
        }
    }
    out.record.mean_train_loss = loss_sum / static_cast<double>(m);
    out.record.duration_ms = elapsed_ms(start);
    return out;
}

Server::Server(FederatedConfig cfg, std::vector<const ClientEndpoint*> clients,
               model::ModelState initial)
    : cfg_(std::move(cfg)), clients_(std::move(clients)), global_(std::move(initial)) {
    cfg_.validate();
    global_.validate();
    if (clients_.empty()) {
        throw ConfigError("no training clients");
    }
    if (cfg_.algorithm == Algorithm::radfed_is) {
        importance_ = ImportanceState::uniform(clients_.size(), cfg_.initial_importance);
    }
}

RoundRecord Server::step() {
    ++round_;
    RoundOutcome outcome =
        is_radfed_family(cfg_.algorithm)
            ? run_radfed_round(global_, clients_, cfg_, round_,
                               cfg_.algorithm == Algorithm::radfed_is ? &importance_ : nullptr)
            : run_fedavg_round(global_, clients_, cfg_, round_);
    global_ = std::move(outcome.global);
    return std::move(outcome.record);
}

}  // namespace radfed::fed
