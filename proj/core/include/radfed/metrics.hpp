#pragma once

#include <span>
#include <string>
#include <vector>

#include "radfed/data.hpp"
#include "radfed/model.hpp"

namespace radfed::metrics {

/// Signed relative norm difference (||w_fl|| - ||w_c||) / ||w_c||.
double dc_divergence(const model::ModelState& federated, const model::ModelState& centralized);

/// ||w_fl - w_c|| / ||w_c||. Recorded next to dc_divergence, which is blind to direction.
double dc_distance(const model::ModelState& federated, const model::ModelState& centralized);

/// Mean over unordered pairs of (1 - cosine similarity) of the flat parameter vectors.
double dl_divergence(std::span<const model::ModelState> models);
double dl_divergence(std::span<const std::vector<double>> vectors);

struct DivergenceTrace {
    /// dc[t] for outer round t + 1.
    std::vector<double> dc;
    std::vector<double> dc_distance;
    /// dl[t][s] for outer round t + 1 and redistribution step s + 1.
    std::vector<std::vector<double>> dl;
};

enum class Metric { accuracy, f1, auc };

std::string to_string(Metric metric);
Metric metric_from_string(const std::string& name);

double accuracy(std::span<const int> labels, std::span<const int> predicted);
/// F1 of the positive class (label 1).
double f1_score(std::span<const int> labels, std::span<const int> predicted);
/// Rank-based (Mann-Whitney) AUC with average ranks for tied scores.
double auc(std::span<const int> labels, std::span<const double> scores);

/// Metric over the pooled samples of `clients`.
double evaluate(const model::ModelState& model, std::span<const data::ClientDataset> clients,
                Metric metric);
double evaluate(const model::ModelState& model,
                std::span<const data::ClientDataset* const> clients, Metric metric);

}  // namespace radfed::metrics
