#include <numeric>

#include <benchmark/benchmark.h>

#include "radfed/fedcore.hpp"
#include "radfed/metrics.hpp"

using namespace radfed;

namespace {

data::ClientDataset make_data(std::size_t samples, int features, int classes) {
    data::SynthSpec spec;
    spec.samples = samples;
    spec.features = features;
    spec.classes = classes;
    const auto ds = data::synth_gaussian_mixture(spec);
    std::vector<std::size_t> rows(ds.size());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return data::make_client(ds, 0, rows);
}

void BM_ClientUpdateLogistic(benchmark::State& state) {
    const auto client = make_data(static_cast<std::size_t>(state.range(0)), 20, 2);
    const auto m = model::init_model(model::ModelFamily::logistic(20), 0);
    const model::TrainingConfig cfg;
    for (auto _ : state) {
        Rng rng = make_rng(0);
        benchmark::DoNotOptimize(model::client_update(m, client, cfg, nullptr, rng));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ClientUpdateLogistic)->Arg(100)->Arg(1000);

void BM_ClientUpdateMlp(benchmark::State& state) {
    const auto client = make_data(static_cast<std::size_t>(state.range(0)), 20, 7);
    const auto m = model::init_model(model::ModelFamily::mlp(20, {64, 64}, 7), 0);
    const model::TrainingConfig cfg;
    for (auto _ : state) {
        Rng rng = make_rng(0);
        benchmark::DoNotOptimize(model::client_update(m, client, cfg, nullptr, rng));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ClientUpdateMlp)->Arg(100)->Arg(1000);

void BM_DlDivergence(benchmark::State& state) {
    Rng rng = make_rng(1);
    std::vector<std::vector<double>> models(static_cast<std::size_t>(state.range(0)),
                                            std::vector<double>(5000));
    for (auto& m : models) {
        for (double& v : m) v = uniform01(rng) - 0.5;
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(metrics::dl_divergence(models));
    }
}
BENCHMARK(BM_DlDivergence)->Arg(6)->Arg(30);

void BM_RadfedRound(benchmark::State& state) {
    std::vector<data::ClientDataset> data;
    for (int k = 0; k < 60; ++k) {
        auto c = make_data(100, 10, 2);
        c.id = k;
        data.push_back(std::move(c));
    }
    const std::vector<fed::LocalClient> clients(data.begin(), data.end());
    std::vector<const fed::ClientEndpoint*> eps;
    for (const auto& c : clients) eps.push_back(&c);
    fed::FederatedConfig cfg;
    cfg.redistribution_rounds = static_cast<std::size_t>(state.range(0));
    const auto global = model::init_model(model::ModelFamily::logistic(10), 0);
    std::size_t round = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(fed::run_radfed_round(global, eps, cfg, ++round));
    }
}
BENCHMARK(BM_RadfedRound)->Arg(1)->Arg(15)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
