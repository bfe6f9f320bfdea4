#pragma once

#include <span>

#include "radfed/data.hpp"
#include "radfed/fedcore.hpp"
#include "radfed/metrics.hpp"
#include "radfed/model.hpp"

namespace radfed::metrics {

/// Centralized model trained on the pooled data of each round's participating clients.
class CentralizedTwin {
public:
    CentralizedTwin(model::ModelState initial, model::TrainingConfig training, std::uint64_t seed);

    /// One epoch over the union of `participants`, shuffled globally.
    void train_round(std::size_t round, std::span<const data::ClientDataset* const> participants);

    const model::ModelState& model() const noexcept { return model_; }

private:
    model::ModelState model_;
    model::TrainingConfig training_;
    std::uint64_t seed_;
};

/// Distinct client ids that took part in a round, in first-seen order.
std::vector<int> participants(const fed::RoundRecord& record);

/// Runs the federated algorithm of `cfg` for cfg.rounds rounds next to a centralized twin from
/// the same initialization and records DC per round and DL per redistribution step.
DivergenceTrace centralized_twin_run(const fed::FederatedConfig& cfg,
                                     std::span<const data::ClientDataset> clients);

}  // namespace radfed::metrics
