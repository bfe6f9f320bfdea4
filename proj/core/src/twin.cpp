#include <algorithm>
#include <limits>

#include "radfed/experiment.hpp"
#include "radfed/twin.hpp"

namespace radfed::metrics {

CentralizedTwin::CentralizedTwin(model::ModelState initial, model::TrainingConfig training,
                                 std::uint64_t seed)
    : model_(std::move(initial)), training_(training), seed_(seed) {
    training_.epochs = 1;
    training_.prox_mu = 0.0;
}

void CentralizedTwin::train_round(std::size_t round,
                                  std::span<const data::ClientDataset* const> participants) {
    const data::ClientDataset pooled = data::pool(participants);
    if (pooled.empty()) {
        return;
    }
    Rng rng = make_rng(seed_, {tag("twin"), round});
    model_ = model::client_update(model_, pooled, training_, nullptr, rng).model;
}

std::vector<int> participants(const fed::RoundRecord& record) {
    std::vector<int> out;
    for (const auto& step : record.selected) {
        for (int id : step) {
            if (std::find(out.begin(), out.end(), id) == out.end()) {
                out.push_back(id);
            }
        }
    }
    return out;
}

DivergenceTrace centralized_twin_run(const fed::FederatedConfig& cfg,
                                     std::span<const data::ClientDataset> clients) {
    fed::FederatedConfig twin_cfg = cfg;
    twin_cfg.centralized_twin = true;
    twin_cfg.track_local_divergence = true;
    fed::FoldSplit split;
    for (std::size_t i = 0; i < clients.size(); ++i) {
        split.train.push_back(i);
    }
    const auto result = fed::run_experiment(twin_cfg, clients, split);
    DivergenceTrace trace;
    for (const auto& r : result.records) {
        trace.dc.push_back(r.dc.value_or(std::numeric_limits<double>::quiet_NaN()));
        trace.dc_distance.push_back(r.dc_distance.value_or(std::numeric_limits<double>::quiet_NaN()));
        trace.dl.push_back(r.local_divergence);
    }
    return trace;
}

}  // namespace radfed::metrics
