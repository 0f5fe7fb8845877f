// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "memorepair/selector.hpp"

using namespace memorepair;

namespace {

struct Rng {
    std::uint64_t state;
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    std::uint64_t below(std::uint64_t n) { return next() % n; }
};

SelectionProblem make_problem(int items, int edges) {
    Rng rng{(std::uint64_t)items * 2654435761u + edges};
    SelectionProblem prob;
    for (int i = 0; i < items; ++i) {
        SelectionItem it;
        it.id = "i" + std::to_string(i);
        it.value = Rational((std::int64_t)rng.below(101), 100);
        it.cost = Rational((std::int64_t)rng.below(101), 100);
        it.executable = rng.below(12) != 0;
        prob.items.push_back(std::move(it));
    }
    for (int e = 0; e < edges; ++e) {
        std::size_t a = rng.below(items), b = rng.below(items);
        if (a != b) prob.closure_edges.emplace_back(prob.items[a].id, prob.items[b].id);
    }
    prob.lambda = Rational(3, 10);
    return prob;
}

}  // namespace

static void BM_MinCutSelect(benchmark::State& state) {
    SelectionProblem prob = make_problem((int)state.range(0), (int)state.range(0) * 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(min_cut_select(prob));
    }
}
BENCHMARK(BM_MinCutSelect)->Arg(16)->Arg(64)->Arg(256)->Arg(1024);

static void BM_GreedySelect(benchmark::State& state) {
    SelectionProblem prob = make_problem((int)state.range(0), (int)state.range(0) * 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(greedy_select(prob));
    }
}
BENCHMARK(BM_GreedySelect)->Arg(16)->Arg(64)->Arg(256)->Arg(1024);

static void BM_BruteForceSelect(benchmark::State& state) {
    SelectionProblem prob = make_problem((int)state.range(0), 20);
    for (auto _ : state) {
        benchmark::DoNotOptimize(brute_force_select(prob));
    }
}
BENCHMARK(BM_BruteForceSelect)->Arg(10)->Arg(15)->Arg(18);

BENCHMARK_MAIN();
