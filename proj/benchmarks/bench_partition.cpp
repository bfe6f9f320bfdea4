#include <benchmark/benchmark.h>

#include "radfed/log.hpp"
#include "radfed/partition.hpp"

using namespace radfed;
using namespace radfed::partition;

namespace {

PartitionTarget make_target(int clients, int classes) {
    DirichletPriors p;
    p.clients = clients;
    p.classes = classes;
    std::vector<std::int64_t> totals(static_cast<std::size_t>(classes), 1000);
    return build_target_class_size(p, totals, 1);
}

void BM_RandomizeStep(benchmark::State& state) {
    const auto t = make_target(static_cast<int>(state.range(0)), 10);
    RealMatrix a = snap_to_grid(solve_qp(t).counts);
    Rng rng = make_rng(0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(randomize_step_inplace(a, 0.002, rng));
    }
}
BENCHMARK(BM_RandomizeStep)->Arg(10)->Arg(100)->Arg(1000);

void BM_SolveQp(benchmark::State& state) {
    logger().set_level(spdlog::level::err);
    const auto t = make_target(static_cast<int>(state.range(0)), 10);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_qp(t));
    }
}
BENCHMARK(BM_SolveQp)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_RandomWalk(benchmark::State& state) {
    const auto t = make_target(100, 10);
    const auto start = solve_qp(t);
    WalkOptions opts;
    opts.burn_in = 10000;
    opts.steps = state.range(0);
    for (auto _ : state) {
        Rng rng = make_rng(0);
        benchmark::DoNotOptimize(random_qp_solution(start, t, opts, rng));
    }
    state.SetItemsProcessed(state.iterations() * (opts.burn_in + opts.steps));
}
BENCHMARK(BM_RandomWalk)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_RoundPartition(benchmark::State& state) {
    const auto t = make_target(static_cast<int>(state.range(0)), 10);
    const auto a = solve_qp(t);
    for (auto _ : state) {
        benchmark::DoNotOptimize(round_partition(a));
    }
}
BENCHMARK(BM_RoundPartition)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
