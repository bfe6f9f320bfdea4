#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "radfed/data.hpp"
#include "radfed/fedcore.hpp"
#include "radfed/model.hpp"

namespace radfed::fed {

struct ExperimentResult {
    model::ModelState final_model;
    model::ModelState best_model;
    /// The final round when no validation pass produced a value; 0 for T = 0.
    std::size_t best_round = 0;
    std::optional<double> best_validation;
    double test_metric = 0.0;
    std::vector<RoundRecord> records;
};

/// Called after every round with the record, the new global model and, when tracked, the
/// centralized twin.
using RoundObserver = std::function<void(const RoundRecord&, const model::ModelState& global,
                                         const model::ModelState* twin)>;

/// Runs cfg.rounds outer rounds on the training clients of `split`, validates every
/// cfg.eval_every rounds (and after the last round), keeps the best validation checkpoint and
/// evaluates it on the test clients. Indices in `split` refer to positions in `clients`;
/// empty clients are skipped.
ExperimentResult run_experiment(const FederatedConfig& cfg,
                                std::span<const data::ClientDataset> clients,
                                const FoldSplit& split, const RoundObserver& observer = {});

}  // namespace radfed::fed
