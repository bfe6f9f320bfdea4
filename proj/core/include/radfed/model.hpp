#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "radfed/data.hpp"
#include "radfed/matrix.hpp"
#include "radfed/rng.hpp"

namespace radfed::model {

enum class ModelKind {
    /// Sigmoid output for two classes, softmax otherwise.
    logistic,
    /// ReLU hidden layers, softmax output.
    mlp,
    /// Bias-free linear predictor with squared loss; used to check training arithmetic.
    linear,
};

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

struct ModelFamily {
    ModelKind kind = ModelKind::logistic;
    std::size_t inputs = 0;
    std::size_t classes = 2;
    std::vector<std::size_t> hidden;

    static ModelFamily logistic(std::size_t inputs, std::size_t classes = 2);
    static ModelFamily mlp(std::size_t inputs, std::vector<std::size_t> hidden,
                           std::size_t classes);
    static ModelFamily linear(std::size_t inputs);

    std::size_t outputs() const;
    std::size_t parameter_count() const;
    void validate() const;

    bool operator==(const ModelFamily&) const = default;
};

struct ModelState {
    ModelFamily family;
    std::vector<double> params;
    double l2 = 0.0;

    void validate() const;
};

/// Zeros for logistic and linear models; U(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights and zero
/// biases for the MLP.
ModelState init_model(const ModelFamily& family, std::uint64_t seed, double l2 = 0.0);

/// A subset of rows of a feature matrix.
struct Batch {
    const RealMatrix* features = nullptr;
    std::span<const int> labels;
    std::span<const std::size_t> rows;

    std::size_t size() const noexcept { return rows.size(); }
};

/// Proximal term (mu / 2) ||w - anchor||^2.
struct ProxTerm {
    const ModelState* anchor = nullptr;
    double mu = 0.0;
};

struct LossGrad {
    double loss = 0.0;
    std::vector<double> grad;
};

/// Mean loss over the batch plus (l2 / 2) ||weights||^2 (biases excluded) plus the optional
/// proximal term, and its gradient.
LossGrad loss_and_grad(const ModelState& model, const Batch& batch, const ProxTerm* prox = nullptr);

/// Class probabilities for one sample (a single prediction for linear models).
std::vector<double> predict(const ModelState& model, std::span<const double> x);

/// Probability of class 1 for a binary model.
double positive_score(const ModelState& model, std::span<const double> x);

int predict_class(const ModelState& model, std::span<const double> x);

enum class ImportanceMode {
    /// Mean squared norm of the mini-batch gradients taken during training.
    batch_average,
    /// Mean squared norm of per-sample gradients at the trained weights.
    per_sample_final,
};

struct TrainingConfig {
    std::size_t batch_size = 10;
    std::size_t epochs = 1;
    double learning_rate = 0.05;
    double prox_mu = 0.0;
    ImportanceMode importance_mode = ImportanceMode::batch_average;

    void validate() const;
};

struct ClientUpdateResult {
    ModelState model;
    double importance = 0.0;
    double mean_loss = 0.0;
    std::size_t steps = 0;
};

/// E epochs of plain mini-batch SGD over a fresh shuffle each epoch; the last partial
/// batch is kept. `anchor` is required when cfg.prox_mu > 0.
ClientUpdateResult client_update(const ModelState& model, const data::ClientDataset& data,
                                 const TrainingConfig& cfg, const ModelState* anchor, Rng& rng);

ModelState average_models(std::span<const ModelState> models);
ModelState weighted_average_models(std::span<const ModelState> models,
                                   std::span<const double> weights);

double l2_norm(std::span<const double> v);

// Checkpoints: one JSON header line followed by the parameters as little-endian float64.

struct Checkpoint {
    ModelState model;
    /// Extra JSON object text stored in the header under "meta".
    std::string meta_json = "{}";
};

std::string encode_checkpoint(const Checkpoint& checkpoint);
Checkpoint decode_checkpoint(std::string_view bytes);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace radfed::model
