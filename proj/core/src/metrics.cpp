#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "radfed/error.hpp"
#include "radfed/metrics.hpp"

namespace radfed::metrics {

namespace {

double norm_of(const model::ModelState& m) { return model::l2_norm(m.params); }

void check_pair(const model::ModelState& a, const model::ModelState& b) {
    if (!(a.family == b.family) || a.params.size() != b.params.size()) {
        throw ConsistencyError("models belong to different families");
    }
}

}  // namespace

double dc_divergence(const model::ModelState& federated, const model::ModelState& centralized) {
    check_pair(federated, centralized);
    const double c = norm_of(centralized);
    if (!(c > 0.0)) {
        throw UndefinedValueError("DC is undefined for a zero centralized model");
    }
    return (norm_of(federated) - c) / c;
}

double dc_distance(const model::ModelState& federated, const model::ModelState& centralized) {
    check_pair(federated, centralized);
    const double c = norm_of(centralized);
    if (!(c > 0.0)) {
        throw UndefinedValueError("DC distance is undefined for a zero centralized model");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < federated.params.size(); ++i) {
        const double d = federated.params[i] - centralized.params[i];
        s += d * d;
    }
    return std::sqrt(s) / c;
}

double dl_divergence(std::span<const std::vector<double>> vectors) {
    if (vectors.size() < 2) {
        throw ParameterError("DL needs at least 2 models");
    }
    std::vector<double> norms;
    norms.reserve(vectors.size());
    for (const auto& v : vectors) {
        if (v.size() != vectors.front().size()) {
            throw ConsistencyError("DL needs vectors of equal length");
        }
        norms.push_back(model::l2_norm(v));
        if (!(norms.back() > 0.0)) {
            throw UndefinedValueError("DL is undefined for a zero model");
        }
    }
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t a = 0; a < vectors.size(); ++a) {
        for (std::size_t b = a + 1; b < vectors.size(); ++b) {
            double d = 0.0;
            for (std::size_t i = 0; i < vectors[a].size(); ++i) {
                d += vectors[a][i] * vectors[b][i];
            }
            const double cosine = std::clamp(d / (norms[a] * norms[b]), -1.0, 1.0);
            sum += 1.0 - cosine;
            ++pairs;
        }
    }
    return sum / static_cast<double>(pairs);
}

double dl_divergence(std::span<const model::ModelState> models) {
    std::vector<std::vector<double>> vectors;
    vectors.reserve(models.size());
    for (const auto& m : models) {
        if (!models.empty() && !(m.family == models.front().family)) {
            throw ConsistencyError("models belong to different families");
        }
        vectors.push_back(m.params);
    }
    return dl_divergence(vectors);
}

std::string to_string(Metric metric) {
    switch (metric) {
        case Metric::accuracy: return "accuracy";
        case Metric::f1: return "f1";
        case Metric::auc: return "auc";
    }
    return "unknown";
}

Metric metric_from_string(const std::string& name) {
    if (name == "accuracy") return Metric::accuracy;
    if (name == "f1") return Metric::f1;
    if (name == "auc") return Metric::auc;
    throw ParameterError(fmt::format("unknown metric '{}'", name));
}

double accuracy(std::span<const int> labels, std::span<const int> predicted) {
    if (labels.size() != predicted.size()) {
        throw ConsistencyError("labels and predictions differ in length");
    }
    if (labels.empty()) {
        throw UndefinedValueError("accuracy of an empty set");
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        hits += labels[i] == predicted[i] ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(labels.size());
}

double f1_score(std::span<const int> labels, std::span<const int> predicted) {
    if (labels.size() != predicted.size()) {
        throw ConsistencyError("labels and predictions differ in length");
    }
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] > 1) {
            throw ParameterError("F1 needs binary labels");
        }
        const bool truth = labels[i] == 1;
        const bool guess = predicted[i] == 1;
        tp += truth && guess;
        fp += !truth && guess;
        fn += truth && !guess;
    }
    if (tp == 0) {
        // No true positives: precision or recall is zero (or undefined), F1 is 0 by convention.
        return 0.0;
    }
    return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

double auc(std::span<const int> labels, std::span<const double> scores) {
    if (labels.size() != scores.size()) {
        throw ConsistencyError("labels and scores differ in length");
    }
    std::size_t positives = 0;
    for (int y : labels) {
        if (y < 0 || y > 1) {
            throw ParameterError("AUC needs binary labels");
        }
        positives += static_cast<std::size_t>(y);
    }
    const std::size_t negatives = labels.size() - positives;
    if (positives == 0 || negatives == 0) {
        throw UndefinedValueError("AUC needs both classes");
    }
    std::vector<std::size_t> order(labels.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    double positive_rank_sum = 0.0;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            ++j;
        }
        const double rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) {
            if (labels[order[k]] == 1) {
                positive_rank_sum += rank;
            }
        }
        i = j;
    }
    const double p = static_cast<double>(positives);
    const double u = positive_rank_sum - p * (p + 1.0) / 2.0;
    return u / (p * static_cast<double>(negatives));
}

double evaluate(const model::ModelState& model,
                std::span<const data::ClientDataset* const> clients, Metric metric) {
    std::vector<int> labels;
    std::vector<int> predicted;
    std::vector<double> scores;
    for (const auto* c : clients) {
        for (std::size_t r = 0; r < c->size(); ++r) {
            const auto x = c->features.row(r);
            labels.push_back(c->labels[r]);
            if (metric == Metric::auc) {
                scores.push_back(model::positive_score(model, x));
            } else {
                predicted.push_back(model::predict_class(model, x));
            }
        }
    }
    if (labels.empty()) {
        throw UndefinedValueError("no samples to evaluate");
    }
    switch (metric) {
        case Metric::accuracy: return accuracy(labels, predicted);
        case Metric::f1: return f1_score(labels, predicted);
        case Metric::auc: return auc(labels, scores);
    }
    throw ParameterError("unknown metric");
}

double evaluate(const model::ModelState& model, std::span<const data::ClientDataset> clients,
                Metric metric) {
    std::vector<const data::ClientDataset*> ptrs;
    for (const auto& c : clients) {
        ptrs.push_back(&c);
    }
    return evaluate(model, ptrs, metric);
}

}  // namespace radfed::metrics
