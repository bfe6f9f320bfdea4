#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "radfed/data.hpp"
#include "radfed/metrics.hpp"
#include "radfed/model.hpp"
#include "radfed/rng.hpp"

namespace radfed::fed {

enum class Algorithm { fedavg, fedprox, radfed, radfed_is };

std::string to_string(Algorithm algorithm);
Algorithm algorithm_from_string(const std::string& name);
bool is_radfed_family(Algorithm algorithm);

/// How the FedAvg family combines client models.
enum class Aggregation { weighted, unweighted };

struct ModelSpec {
    model::ModelKind kind = model::ModelKind::logistic;
    std::vector<std::size_t> hidden{64, 64};
    double l2 = 0.0;

    model::ModelFamily family_for(std::size_t inputs, std::size_t classes) const;
};

struct FederatedConfig {
    Algorithm algorithm = Algorithm::radfed;
    /// Participation fraction C.
    double participation = 0.1;
    /// Outer rounds T.
    std::size_t rounds = 10;
    /// Redistribution rounds S (RADFed family).
    std::size_t redistribution_rounds = 15;
    /// EMA mixing weight (RADFed-IS).
    double alpha = 0.9;
    /// Proximal weight (FedProx).
    double prox_mu = 0.01;
    Aggregation aggregation = Aggregation::weighted;
    model::TrainingConfig training;
    ModelSpec model;
    std::size_t eval_every = 1;
    metrics::Metric metric = metrics::Metric::accuracy;
    std::optional<data::Scope> standardization = data::Scope::global;
    double initial_importance = 1.0;
    /// Record DL among local models after every redistribution step.
    bool track_local_divergence = true;
    /// Train a centralized twin side by side and record DC every round.
    bool centralized_twin = false;
    std::size_t workers = 1;
    std::uint64_t seed = 0;

    /// m = max(floor(C * K), 1).
    std::size_t replicas(std::size_t training_clients) const;
    void validate() const;
};

/// The server's view of a client: it can train a model and report its sample count.
/// Aggregation in the RADFed family never asks for the sample count.
class ClientEndpoint {
public:
    virtual ~ClientEndpoint() = default;
    virtual int id() const = 0;
    virtual std::size_t sample_count() const = 0;
    virtual model::ClientUpdateResult update(const model::ModelState& model,
                                             const model::TrainingConfig& cfg,
                                             const model::ModelState* anchor, Rng& rng) const = 0;
};

/// Endpoint backed by an in-process dataset. The dataset must outlive the endpoint.
class LocalClient final : public ClientEndpoint {
public:
    explicit LocalClient(const data::ClientDataset& data) : data_(&data) {}

    int id() const override { return data_->id; }
    std::size_t sample_count() const override { return data_->size(); }
    model::ClientUpdateResult update(const model::ModelState& model,
                                     const model::TrainingConfig& cfg,
                                     const model::ModelState* anchor, Rng& rng) const override;

    const data::ClientDataset& data() const noexcept { return *data_; }

private:
    const data::ClientDataset* data_;
};

using ClientList = std::span<const ClientEndpoint* const>;

/// m distinct positions from [0, count) in random order.
std::vector<std::size_t> sample_uniform(std::size_t count, std::size_t m, Rng& rng);

/// m distinct ids from `ids`, uniform over m-subsets, in random order.
std::vector<std::size_t> sample_uniform(std::span<const std::size_t> ids, std::size_t m, Rng& rng);

struct ImportanceState {
    std::vector<double> scores;

    static ImportanceState uniform(std::size_t clients, double initial = 1.0);
};

/// m distinct positions drawn one at a time with probability proportional to the remaining
/// scores. Once the remaining scores are all zero the rest are drawn uniformly.
std::vector<std::size_t> sample_importance(const ImportanceState& state, std::size_t m, Rng& rng);

/// p_k <- (1 - alpha) p_k + alpha p_new.
void update_importance(ImportanceState& state, std::size_t k, double p_new, double alpha);

struct RoundRecord {
    std::size_t round = 0;
    Algorithm algorithm = Algorithm::radfed;
    /// Client ids per redistribution step (one step for the FedAvg family).
    std::vector<std::vector<int>> selected;
    /// DL among the local models after each step; empty when not tracked or m < 2.
    std::vector<double> local_divergence;
    double mean_train_loss = 0.0;
    std::optional<double> validation_metric;
    std::optional<double> dc;
    std::optional<double> dc_distance;
    double duration_ms = 0.0;
};

struct RoundOutcome {
    model::ModelState global;
    RoundRecord record;
};

/// One outer round with delayed aggregation: m replicas of `global`, S redistribution steps, plain mean.
/// Importance-proportional sampling and EMA score updates when `importance` is given.
RoundOutcome run_radfed_round(const model::ModelState& global, ClientList clients,
                              const FederatedConfig& cfg, std::size_t round,
                              ImportanceState* importance = nullptr);

/// One FedAvg (or FedProx when cfg.algorithm is fedprox) round.
RoundOutcome run_fedavg_round(const model::ModelState& global, ClientList clients,
                              const FederatedConfig& cfg, std::size_t round);

/// Stateful server loop over a fixed set of training clients.
class Server {
public:
    Server(FederatedConfig cfg, std::vector<const ClientEndpoint*> clients,
           model::ModelState initial);

    /// Runs the next outer round and returns its record.
    RoundRecord step();

    const model::ModelState& global() const noexcept { return global_; }
    const ImportanceState& importance() const noexcept { return importance_; }
    std::size_t rounds_done() const noexcept { return round_; }
    const FederatedConfig& config() const noexcept { return cfg_; }

private:
    FederatedConfig cfg_;
    std::vector<const ClientEndpoint*> clients_;
    model::ModelState global_;
    ImportanceState importance_;
    std::size_t round_ = 0;
};

struct FoldSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
    std::vector<std::size_t> test;
    std::size_t test_fold = 0;
    std::size_t validation_fold = 0;
};

/// By-client cross-validation. Each fold is the test set once; the validation set is the
/// next fold round-robin, or every other fold in turn when `nested`.
std::vector<FoldSplit> make_folds(std::span<const std::size_t> ids, std::size_t n_folds,
                                  std::uint64_t seed, bool nested = false);

/// Runs fn(i) for i in [0, n) on up to `workers` threads.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

}  // namespace radfed::fed
