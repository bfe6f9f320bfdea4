#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "radfed/error.hpp"
#include "radfed/model.hpp"

namespace radfed::model {

void TrainingConfig::validate() const {
    if (batch_size < 1) {
        throw ParameterError("batch size must be at least 1");
    }
    if (epochs < 1) {
        throw ParameterError("epochs must be at least 1");
    }
    // A zero learning rate is accepted: it turns client_update into pure scoring.
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw ParameterError("learning rate must be nonnegative and finite");
    }
    if (!(prox_mu >= 0.0) || !std::isfinite(prox_mu)) {
        throw ParameterError("prox_mu must be nonnegative");
    }
}

double l2_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) {
        s += x * x;
    }
    return std::sqrt(s);
}

namespace {

double squared_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) {
        s += x * x;
    }
    return s;
}

}  // namespace

ClientUpdateResult client_update(const ModelState& model, const data::ClientDataset& data,
                                 const TrainingConfig& cfg, const ModelState* anchor, Rng& rng) {
    cfg.validate();
    if (data.empty()) {
        throw ParameterError(fmt::format("client {} has no data", data.id));
    }
    if (cfg.prox_mu > 0.0 && anchor == nullptr) {
        throw ParameterError("proximal training needs an anchor model");
    }
    ClientUpdateResult result{model, 0.0, 0.0, 0};
    ModelState& w = result.model;
    const std::size_t n = data.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    double importance_sum = 0.0;
    double loss_sum = 0.0;
    for (std::size_t e = 0; e < cfg.epochs; ++e) {
        shuffle(std::span<std::size_t>(order), rng);
        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            const std::size_t len = std::min(cfg.batch_size, n - start);
            const Batch batch{&data.features, data.labels,
                              std::span<const std::size_t>(order).subspan(start, len)};
            LossGrad lg = loss_and_grad(w, batch);
            importance_sum += squared_norm(lg.grad);
            if (cfg.prox_mu > 0.0) {
                double sq = 0.0;
                for (std::size_t i = 0; i < lg.grad.size(); ++i) {
                    const double d = w.params[i] - anchor->params[i];
                    sq += d * d;
                    lg.grad[i] += cfg.prox_mu * d;
                }
                lg.loss += 0.5 * cfg.prox_mu * sq;
            }
            loss_sum += lg.loss;
            for (std::size_t i = 0; i < w.params.size(); ++i) {
                w.params[i] -= cfg.learning_rate * lg.grad[i];
            }
            ++result.steps;
        }
    }
    for (double p : w.params) {
        if (!std::isfinite(p)) {
            throw NumericError(fmt::format("client {}: training diverged", data.id));
        }
    }
    result.mean_loss = loss_sum / static_cast<double>(result.steps);
    if (cfg.importance_mode == ImportanceMode::batch_average) {
        result.importance = importance_sum / static_cast<double>(result.steps);
    } else {
        double sum = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const Batch one{&data.features, data.labels, std::span<const std::size_t>(&r, 1)};
            sum += squared_norm(loss_and_grad(w, one).grad);
        }
        result.importance = sum / static_cast<double>(n);
    }
    return result;
}

namespace {

void check_same_family(std::span<const ModelState> models) {
    if (models.empty()) {
        throw ParameterError("cannot average zero models");
    }
    for (const auto& m : models) {
        if (!(m.family == models.front().family) ||
            m.params.size() != models.front().params.size()) {
            throw ConsistencyError("cannot average models of different families");
        }
    }
}

}  // namespace

ModelState average_models(std::span<const ModelState> models) {
    check_same_family(models);
    ModelState out = models.front();
    for (std::size_t k = 1; k < models.size(); ++k) {
        for (std::size_t i = 0; i < out.params.size(); ++i) {
            out.params[i] += models[k].params[i];
        }
    }
    const double n = static_cast<double>(models.size());
    for (double& p : out.params) {
        p /= n;
    }
    return out;
}

ModelState weighted_average_models(std::span<const ModelState> models,
                                   std::span<const double> weights) {
    check_same_family(models);
    if (weights.size() != models.size()) {
        throw ConsistencyError("one weight per model is required");
    }
    double total = 0.0;
    for (double wgt : weights) {
        if (!(wgt >= 0.0) || !std::isfinite(wgt)) {
            throw ParameterError("aggregation weights must be nonnegative");
        }
        total += wgt;
    }
    if (!(total > 0.0)) {
        throw ParameterError("aggregation weights are all zero");
    }
    if (std::all_of(weights.begin(), weights.end(), [&](double v) { return v == weights[0]; })) {
        return average_models(models);
    }
    ModelState out = models.front();
    std::fill(out.params.begin(), out.params.end(), 0.0);
    for (std::size_t k = 0; k < models.size(); ++k) {
        const double share = weights[k] / total;
        for (std::size_t i = 0; i < out.params.size(); ++i) {
            out.params[i] += share * models[k].params[i];
        }
    }
    return out;
}

}  // namespace radfed::model
