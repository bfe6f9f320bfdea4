#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <set>

#include <gtest/gtest.h>

#include "radfed/error.hpp"
#include "radfed/experiment.hpp"
#include "radfed/fedcore.hpp"
#include "support.hpp"

namespace radfed::fed {
namespace {

// ---------------------------------------------------------------- sampling

TEST(SampleUniform, FullDrawIsAPermutation) {
    Rng rng = make_rng(0);
    const std::vector<std::size_t> ids{4, 8, 15, 16, 23, 42};
    auto drawn = sample_uniform(ids, ids.size(), rng);
    std::sort(drawn.begin(), drawn.end());
    EXPECT_EQ(drawn, ids);
    EXPECT_THROW(sample_uniform(ids, 7, rng), ParameterError);
}

TEST(SampleUniform, FairCoin) {
    Rng rng = make_rng(1);
    int first = 0;
    for (int i = 0; i < 10000; ++i) {
        first += sample_uniform(2, 1, rng)[0] == 0;
    }
    EXPECT_GE(first, 4800);
    EXPECT_LE(first, 5200);
}

TEST(SampleUniform, DistinctAndUniformOverPositions) {
    Rng rng = make_rng(2);
    std::vector<int> hits(10, 0);
    for (int i = 0; i < 20000; ++i) {
        const auto s = sample_uniform(10, 3, rng);
        EXPECT_EQ(std::set<std::size_t>(s.begin(), s.end()).size(), 3u);
        for (auto k : s) ++hits[k];
    }
    // Each position is drawn with probability 0.3.
    for (int h : hits) {
        EXPECT_NEAR(h / 20000.0, 0.3, 3 * std::sqrt(0.3 * 0.7 / 20000));
    }
}

TEST(SampleImportance, Examples) {
    Rng rng = make_rng(3);
    ImportanceState one_hot{{1, 0, 0}};
    for (int i = 0; i < 100; ++i) {
        EXPECT_EQ(sample_importance(one_hot, 1, rng), std::vector<std::size_t>{0});
    }
    ImportanceState skewed{{3, 1}};
    int first = 0;
    for (int i = 0; i < 10000; ++i) {
        first += sample_importance(skewed, 1, rng)[0] == 0;
    }
    EXPECT_GE(first, 7300);
    EXPECT_LE(first, 7700);
}

TEST(SampleImportance, EqualScoresAreUniform) {
    Rng rng = make_rng(4);
    const auto state = ImportanceState::uniform(5, 2.0);
    std::vector<int> hits(5, 0);
    for (int i = 0; i < 20000; ++i) {
        for (auto k : sample_importance(state, 2, rng)) ++hits[k];
    }
    for (int h : hits) {
        EXPECT_NEAR(h / 20000.0, 0.4, 3 * std::sqrt(0.4 * 0.6 / 20000));
    }
}

TEST(SampleImportance, FallsBackToUniformWhenScoresRunOut) {
    Rng rng = make_rng(5);
    ImportanceState state{{0, 2, 0, 0}};
    for (int i = 0; i < 200; ++i) {
        const auto s = sample_importance(state, 3, rng);
        EXPECT_EQ(s[0], 1u);
        EXPECT_EQ(std::set<std::size_t>(s.begin(), s.end()).size(), 3u);
    }
    EXPECT_THROW(sample_importance(state, 5, rng), ParameterError);
}

TEST(UpdateImportance, Ema) {
    ImportanceState s{{1.0, 4.0}};
    update_importance(s, 0, 2.0, 0.9);
    EXPECT_DOUBLE_EQ(s.scores[0], 1.9);
    update_importance(s, 1, 4.0, 0.3);
    EXPECT_EQ(s.scores[1], 4.0);
    EXPECT_THROW(update_importance(s, 0, -1.0, 0.5), NumericError);
    EXPECT_THROW(update_importance(s, 0, 1.0, 1.0), ParameterError);
    EXPECT_THROW(update_importance(s, 0, 1.0, 0.0), ParameterError);
    EXPECT_THROW(update_importance(s, 2, 1.0, 0.5), ParameterError);
}

// ---------------------------------------------------------------- fixtures

std::vector<data::ClientDataset> iid_clients(std::size_t count, std::size_t per_client,
                                             std::uint64_t seed, int classes = 2) {
    data::SynthSpec spec;
    spec.samples = count * per_client;
    spec.seed = seed;
    spec.classes = classes;
    const auto ds = data::synth_gaussian_mixture(spec);
    std::vector<data::ClientDataset> clients;
    for (std::size_t k = 0; k < count; ++k) {
        std::vector<std::size_t> rows;
        for (std::size_t r = k * per_client; r < (k + 1) * per_client; ++r) rows.push_back(r);
        clients.push_back(data::make_client(ds, static_cast<int>(k), rows));
    }
    return clients;
}

// One client per class.
std::vector<data::ClientDataset> single_class_clients(int classes, std::size_t samples,
                                                      std::uint64_t seed) {
    data::SynthSpec spec;
    spec.samples = samples;
    spec.seed = seed;
    spec.classes = classes;
    const auto ds = data::synth_gaussian_mixture(spec);
    std::vector<std::vector<std::size_t>> rows(static_cast<std::size_t>(classes));
    for (std::size_t r = 0; r < ds.size(); ++r) rows[static_cast<std::size_t>(ds.labels[r])].push_back(r);
    std::vector<data::ClientDataset> clients;
    for (int k = 0; k < classes; ++k) {
        clients.push_back(data::make_client(ds, k, rows[static_cast<std::size_t>(k)]));
    }
    return clients;
}

std::vector<LocalClient> locals(const std::vector<data::ClientDataset>& data) {
    return {data.begin(), data.end()};
}

model::ModelState initial_for(const FederatedConfig& cfg, const data::ClientDataset& c,
                              std::size_t classes = 2) {
    return model::init_model(cfg.model.family_for(c.features.cols(), classes), 0);
}

// ---------------------------------------------------------------- config

TEST(Config, Validation) {
    FederatedConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.participation = 0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = {};
    cfg.redistribution_rounds = 0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = {};
    cfg.algorithm = Algorithm::radfed_is;
    cfg.alpha = 1.0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    EXPECT_THROW(algorithm_from_string("fedsgd"), ConfigError);
    for (auto a : {Algorithm::fedavg, Algorithm::fedprox, Algorithm::radfed, Algorithm::radfed_is}) {
        EXPECT_EQ(algorithm_from_string(to_string(a)), a);
    }
}

TEST(Config, Replicas) {
    FederatedConfig cfg;
    cfg.participation = 0.1;
    EXPECT_EQ(cfg.replicas(60), 6u);
    EXPECT_EQ(cfg.replicas(5), 1u);
    cfg.participation = 1.0;
    EXPECT_EQ(cfg.replicas(7), 7u);
}

// ---------------------------------------------------------------- rounds

TEST(RadfedRound, SingleStepEqualsUnweightedFedAvg) {
    const auto data = iid_clients(10, 15, 1);
    const auto clients = locals(data);
    const auto eps = testing::endpoints_of(clients);
    FederatedConfig cfg;
    cfg.participation = 0.4;
    cfg.redistribution_rounds = 1;
    cfg.seed = 7;
    const auto global = initial_for(cfg, data[0]);
    for (std::size_t round = 1; round <= 3; ++round) {
        cfg.algorithm = Algorithm::radfed;
        const auto r = run_radfed_round(global, eps, cfg, round);
        cfg.algorithm = Algorithm::fedavg;
        cfg.aggregation = Aggregation::unweighted;
        const auto f = run_fedavg_round(global, eps, cfg, round);
        EXPECT_EQ(r.record.selected, f.record.selected);
        EXPECT_EQ(r.global.params, f.global.params);
    }
}

TEST(RadfedRound, SingleReplicaTrainsSequentially) {
    const auto data = iid_clients(4, 10, 2);
    const auto clients = locals(data);
    const auto eps = testing::endpoints_of(clients);
    FederatedConfig cfg;
    cfg.participation = 0.25;
    cfg.redistribution_rounds = 4;
    cfg.seed = 3;
    const auto global = initial_for(cfg, data[0]);
    const auto out = run_radfed_round(global, eps, cfg, 1);
    ASSERT_EQ(out.record.selected.size(), 4u);
    EXPECT_TRUE(out.record.local_divergence.empty());
    // Replay the chain of local updates on the documented per-client streams.
    model::ModelState w = global;
    for (std::size_t s = 0; s < 4; ++s) {
        ASSERT_EQ(out.record.selected[s].size(), 1u);
        const int id = out.record.selected[s][0];
        Rng rng = make_rng(cfg.seed, {tag("train"), 1, s + 1, static_cast<std::uint64_t>(id)});
        w = model::client_update(w, data[static_cast<std::size_t>(id)], cfg.training, nullptr, rng)
                .model;
    }
    EXPECT_EQ(out.global.params, w.params);
}

TEST(RadfedRound, ReplicaCountIsConstant) {
    const auto data = iid_clients(20, 8, 3);
    const auto clients = locals(data);
    const auto eps = testing::endpoints_of(clients);
    FederatedConfig cfg;
    cfg.participation = 0.25;
    cfg.redistribution_rounds = 6;
    const auto out = run_radfed_round(initial_for(cfg, data[0]), eps, cfg, 1);
    ASSERT_EQ(out.record.selected.size(), 6u);
    EXPECT_EQ(out.record.local_divergence.size(), 6u);
    for (const auto& step : out.record.selected) {
        EXPECT_EQ(step.size(), 5u);
        EXPECT_EQ(std::set<int>(step.begin(), step.end()).size(), 5u);
    }
}

// Counts how often the server asks for a client's size.
class TrackingClient final : public ClientEndpoint {
public:
    TrackingClient(const data::ClientDataset& data, std::atomic<int>& counter)
        : inner_(data), counter_(&counter) {}
    int id() const override { return inner_.id(); }
    std::size_t sample_count() const override {
        ++*counter_;
        return inner_.sample_count();
    }
    model::ClientUpdateResult update(const model::ModelState& m, const model::TrainingConfig& cfg,
                                     const model::ModelState* anchor, Rng& rng) const override {
        return inner_.update(m, cfg, anchor, rng);
    }

private:
    LocalClient inner_;
    std::atomic<int>* counter_;
};

TEST(RadfedRound, NeverReadsClientSizes) {
    const auto data = iid_clients(6, 10, 4);
    std::atomic<int> counter{0};
    std::vector<TrackingClient> clients;
    for (const auto& d : data) clients.emplace_back(d, counter);
    std::vector<const ClientEndpoint*> eps;
    for (const auto& c : clients) eps.push_back(&c);
    for (auto alg : {Algorithm::radfed, Algorithm::radfed_is}) {
        FederatedConfig cfg;
        cfg.algorithm = alg;
        cfg.participation = 0.5;
        cfg.redistribution_rounds = 3;
        Server server(cfg, eps, initial_for(cfg, data[0]));
        server.step();
        server.step();
    }
    EXPECT_EQ(counter.load(), 0);
    FederatedConfig cfg;
    cfg.algorithm = Algorithm::fedavg;
    cfg.participation = 0.5;
    Server server(cfg, eps, initial_for(cfg, data[0]));
    server.step();
    EXPECT_GT(counter.load(), 0);
}

// Returns a fixed model whatever it is given.
class FixedClient final : public ClientEndpoint {
public:
    FixedClient(int id, std::size_t size, std::vector<double> params)
        : id_(id), size_(size), params_(std::move(params)) {}
    int id() const override { return id_; }
    std::size_t sample_count() const override { return size_; }
    model::ClientUpdateResult update(const model::ModelState& m, const model::TrainingConfig&,
                                     const model::ModelState*, Rng&) const override {
        model::ClientUpdateResult r;
        r.model = m;
        r.model.params = params_;
        r.importance = 1.0;
        return r;
    }

private:
    int id_;
    std::size_t size_;
    std::vector<double> params_;
};

TEST(FedAvgRound, WeightedFixture) {
    const FixedClient a(0, 3, {1, 3});
    const FixedClient b(1, 1, {3, 5});
    const std::vector<const ClientEndpoint*> eps{&a, &b};
    FederatedConfig cfg;
    cfg.algorithm = Algorithm::fedavg;
    cfg.participation = 1.0;
    const auto global = model::init_model(model::ModelFamily::linear(2), 0);
    EXPECT_EQ(run_fedavg_round(global, eps, cfg, 1).global.params, (std::vector<double>{1.5, 3.5}));
    cfg.aggregation = Aggregation::unweighted;
    EXPECT_EQ(run_fedavg_round(global, eps, cfg, 1).global.params, (std::vector<double>{2, 4}));
    const std::vector<const ClientEndpoint*> only{&b};
    EXPECT_EQ(run_fedavg_round(global, only, cfg, 1).global.params, (std::vector<double>{3, 5}));
}

TEST(FedAvgRound, EqualSizesMatchPlainMean) {
    const auto data = iid_clients(6, 12, 5);
    const auto clients = locals(data);
    const auto eps = testing::endpoints_of(clients);
    FederatedConfig cfg;
    cfg.algorithm = Algorithm::fedavg;
    cfg.participation = 0.5;
    const auto global = initial_for(cfg, data[0]);
    const auto weighted = run_fedavg_round(global, eps, cfg, 2);
    cfg.aggregation = Aggregation::unweighted;
    EXPECT_EQ(run_fedavg_round(global, eps, cfg, 2).global.params, weighted.global.params);
}

TEST(FedProxRound, ProxPullsTowardsTheGlobalModel) {
    const auto data = iid_clients(4, 20, 6);
    const auto clients = locals(data);
    const auto eps = testing::endpoints_of(clients);
    FederatedConfig cfg;
    cfg.participation = 1.0;
    cfg.training.epochs = 5;
    cfg.training.learning_rate = 0.2;
    const auto global = initial_for(cfg, data[0]);
    cfg.algorithm = Algorithm::fedavg;
    const auto plain = run_fedavg_round(global, eps, cfg, 1);
    cfg.algorithm = Algorithm::fedprox;
    cfg.prox_mu = 5.0;
    const auto prox = run_fedavg_round(global, eps, cfg, 1);
    EXPECT_LT(model::l2_norm(prox.global.params), model::l2_norm(plain.global.params));
}

TEST(Importance, ScoresStayPositive) {
    const auto data = iid_clients(8, 10, 7);
    const auto clients = locals(data);
    FederatedConfig cfg;
    cfg.algorithm = Algorithm::radfed_is;
    cfg.participation = 0.25;
    cfg.redistribution_rounds = 5;
    cfg.alpha = 0.9;
    Server server(cfg, testing::endpoints_of(clients), initial_for(cfg, data[0]));
    bool changed = false;
    for (int t = 0; t < 6; ++t) {
        server.step();
        for (double p : server.importance().scores) {
            EXPECT_GT(p, 0.0);
            changed = changed || p != 1.0;
        }
    }
    EXPECT_TRUE(changed);
}

TEST(RadfedRound, GoldenCheckpoint) {
    const auto data = single_class_clients(2, 60, 11);
    const auto clients = locals(data);
    FederatedConfig cfg;
    cfg.algorithm = Algorithm::radfed;
    cfg.participation = 1.0;
    cfg.redistribution_rounds = 3;
    cfg.seed = 2024;
    Server server(cfg, testing::endpoints_of(clients), initial_for(cfg, data[0]));
    for (int t = 0; t < 3; ++t) server.step();
    const auto path = std::filesystem::path(RADFED_TEST_DATA_DIR) / "golden_radfed.ckpt";
    if (std::getenv("RADFED_REGENERATE_GOLDEN") != nullptr) {
        model::save_checkpoint(path, {server.global()});
        GTEST_SKIP() << "regenerated " << path;
    }
    const auto golden = model::load_checkpoint(path);
    EXPECT_EQ(golden.model.family, server.global().family);
    EXPECT_EQ(golden.model.params, server.global().params);
}

TEST(RadfedRound, LocalDivergenceGrowsAcrossSteps) {
    // Replicas start each round identical and drift apart as they visit single-class clients.
    const std::size_t steps = 10;
    const std::size_t rounds = 3;
    std::vector<double> mean(steps, 0.0);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto data = single_class_clients(10, 1000, seed);
        const auto clients = locals(data);
        FederatedConfig cfg;
        cfg.participation = 0.3;
        cfg.redistribution_rounds = steps;
        cfg.model.kind = model::ModelKind::mlp;
        cfg.model.hidden = {16};
        cfg.seed = seed;
        const auto eps = testing::endpoints_of(clients);
        model::ModelState global =
            model::init_model(cfg.model.family_for(data[0].features.cols(), 10), seed);
        for (std::size_t t = 1; t <= rounds; ++t) {
            auto out = run_radfed_round(global, eps, cfg, t);
            global = std::move(out.global);
            for (std::size_t s = 0; s < steps; ++s) {
                mean[s] += out.record.local_divergence[s] / (10.0 * rounds);
            }
        }
    }
    EXPECT_GT(mean.back(), mean.front());
    EXPECT_GT(mean[steps / 2], mean.front());
}

TEST(RadfedRound, ErrorsCarryRoundContext) {
    auto data = iid_clients(2, 5, 8);
    const auto clients = locals(data);
    FederatedConfig cfg;
    cfg.participation = 1.0;
    cfg.training.learning_rate = 1e300;
    cfg.model.kind = model::ModelKind::linear;
    const auto eps = testing::endpoints_of(clients);
    auto global = model::init_model(model::ModelFamily::linear(2), 0);
    global.params = {1e300, 1e300};
    try {
        run_radfed_round(global, eps, cfg, 4);
        FAIL() << "expected a numeric error";
    } catch (const NumericError& e) {
        EXPECT_NE(std::string(e.what()).find("round 4"), std::string::npos) << e.what();
    }
}

// ---------------------------------------------------------------- experiments

FoldSplit split_of(std::size_t train, std::size_t validation, std::size_t test) {
    FoldSplit s;
    std::size_t k = 0;
    for (std::size_t i = 0; i < train; ++i) s.train.push_back(k++);
    for (std::size_t i = 0; i < validation; ++i) s.validation.push_back(k++);
    for (std::size_t i = 0; i < test; ++i) s.test.push_back(k++);
    return s;
}

TEST(Experiment, ZeroRoundsReturnsTheInitialModel) {
    const auto data = iid_clients(5, 10, 9);
    FederatedConfig cfg;
    cfg.rounds = 0;
    const auto r = run_experiment(cfg, data, split_of(3, 1, 1));
    EXPECT_TRUE(r.records.empty());
    EXPECT_EQ(r.final_model.params,
              model::init_model(r.final_model.family, derive_seed(cfg.seed, {tag("init")})).params);
    EXPECT_EQ(r.best_round, 0u);
}

TEST(Experiment, DeterministicAndWorkerIndependent) {
    const auto data = iid_clients(12, 15, 10);
    FederatedConfig cfg;
    cfg.algorithm = Algorithm::radfed_is;
    cfg.participation = 0.3;
    cfg.redistribution_rounds = 3;
    cfg.rounds = 4;
    cfg.model.kind = model::ModelKind::mlp;
    cfg.model.hidden = {6};
    cfg.seed = 5;
    const auto split = split_of(8, 2, 2);
    const auto a = run_experiment(cfg, data, split);
    const auto b = run_experiment(cfg, data, split);
    cfg.workers = 3;
    const auto c = run_experiment(cfg, data, split);
    for (const auto* other : {&b, &c}) {
        EXPECT_EQ(a.final_model.params, other->final_model.params);
        EXPECT_EQ(a.best_round, other->best_round);
        ASSERT_EQ(a.records.size(), other->records.size());
        for (std::size_t t = 0; t < a.records.size(); ++t) {
            EXPECT_EQ(a.records[t].selected, other->records[t].selected);
            EXPECT_EQ(a.records[t].mean_train_loss, other->records[t].mean_train_loss);
            EXPECT_EQ(a.records[t].validation_metric, other->records[t].validation_metric);
        }
    }
}

TEST(Experiment, RadfedSingleStepMatchesFedAvgOnEqualClients) {
    const auto data = iid_clients(10, 12, 11);
    FederatedConfig cfg;
    cfg.participation = 0.3;
    cfg.redistribution_rounds = 1;
    cfg.rounds = 5;
    cfg.seed = 8;
    const auto split = split_of(6, 2, 2);
    cfg.algorithm = Algorithm::radfed;
    const auto r = run_experiment(cfg, data, split);
    cfg.algorithm = Algorithm::fedavg;
    cfg.aggregation = Aggregation::weighted;
    const auto f = run_experiment(cfg, data, split);
    EXPECT_EQ(r.final_model.params, f.final_model.params);
    EXPECT_EQ(r.test_metric, f.test_metric);
}

TEST(Experiment, BestCheckpointTracksValidation) {
    const auto data = iid_clients(6, 30, 12);
    FederatedConfig cfg;
    cfg.participation = 0.5;
    cfg.rounds = 6;
    cfg.eval_every = 4;
    std::size_t observed = 0;
    const auto r = run_experiment(cfg, data, split_of(4, 1, 1),
                                  [&](const RoundRecord&, const model::ModelState&,
                                      const model::ModelState* twin) {
                                      ++observed;
                                      EXPECT_EQ(twin, nullptr);
                                  });
    EXPECT_EQ(observed, 6u);
    ASSERT_EQ(r.records.size(), 6u);
    for (std::size_t t = 0; t < 6; ++t) {
        EXPECT_EQ(r.records[t].validation_metric.has_value(), t == 3 || t == 5) << t;
    }
    EXPECT_TRUE(r.best_round == 4 || r.best_round == 6);
    ASSERT_TRUE(r.best_validation.has_value());
    EXPECT_EQ(*r.best_validation, *r.records[r.best_round - 1].validation_metric);
}

TEST(Experiment, InvalidSplitsAreConfigErrors) {
    const auto data = iid_clients(4, 5, 13);
    FederatedConfig cfg;
    EXPECT_THROW(run_experiment(cfg, data, split_of(0, 2, 2)), ConfigError);
    FoldSplit overlap = split_of(2, 1, 1);
    overlap.test = {0};
    EXPECT_THROW(run_experiment(cfg, data, overlap), ConfigError);
    FoldSplit outside = split_of(2, 1, 1);
    outside.train.push_back(9);
    EXPECT_THROW(run_experiment(cfg, data, outside), ConfigError);
}

// ---------------------------------------------------------------- folds

TEST(Folds, HundredClientsFiveFolds) {
    std::vector<std::size_t> ids(100);
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    const auto folds = make_folds(ids, 5, 3);
    ASSERT_EQ(folds.size(), 5u);
    std::vector<int> tested(100, 0);
    for (const auto& f : folds) {
        EXPECT_EQ(f.train.size(), 60u);
        EXPECT_EQ(f.validation.size(), 20u);
        EXPECT_EQ(f.test.size(), 20u);
        std::set<std::size_t> all(f.train.begin(), f.train.end());
        all.insert(f.validation.begin(), f.validation.end());
        all.insert(f.test.begin(), f.test.end());
        EXPECT_EQ(all.size(), 100u);
        for (auto k : f.test) ++tested[k];
    }
    EXPECT_EQ(tested, std::vector<int>(100, 1));
    const auto again = make_folds(ids, 5, 3);
    for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_EQ(folds[i].test, again[i].test);
        EXPECT_EQ(folds[i].validation, again[i].validation);
    }
}

TEST(Folds, NestedAndErrors) {
    std::vector<std::size_t> ids(10);
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    const auto nested = make_folds(ids, 5, 0, true);
    EXPECT_EQ(nested.size(), 20u);
    for (const auto& f : nested) {
        EXPECT_NE(f.test_fold, f.validation_fold);
        EXPECT_EQ(f.train.size(), 6u);
    }
    EXPECT_THROW(make_folds(std::vector<std::size_t>{1, 2, 3}, 5, 0), ParameterError);
}

TEST(ParallelFor, CoversEveryIndexAndRethrowsTheFirstFailure) {
    std::vector<int> seen(50, 0);
    parallel_for(50, 4, [&](std::size_t i) { seen[i] += 1; });
    EXPECT_EQ(seen, std::vector<int>(50, 1));
    try {
        parallel_for(20, 4, [](std::size_t i) {
            if (i == 7 || i == 13) throw ParameterError("fail " + std::to_string(i));
        });
        FAIL();
    } catch (const ParameterError& e) {
        EXPECT_STREQ(e.what(), "fail 7");
    }
}

}  // namespace
}  // namespace radfed::fed
