// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "memorepair/graph.hpp"

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

ProvenanceGraph make_graph(int nodes) {
    Rng rng{(std::uint64_t)nodes};
    ProvenanceGraph g;
    for (int i = 0; i < nodes; ++i) {
        Artifact a;
        a.id = "n" + std::to_string(i);
        g.add_artifact(a);
    }
    for (int e = 0; e < nodes * 3; ++e) {
        g.add_influence_edge("n" + std::to_string(rng.below(nodes)),
                             "n" + std::to_string(rng.below(nodes)));
    }
    return g;
}

}  // namespace

static void BM_Condense(benchmark::State& state) {
    ProvenanceGraph g = make_graph((int)state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(condense(g));
    }
}
BENCHMARK(BM_Condense)->Arg(100)->Arg(1000)->Arg(10000);

static void BM_Cascade(benchmark::State& state) {
    ProvenanceGraph g = make_graph((int)state.range(0));
    std::set<ArtifactId> roots{"n0", "n1"};
    for (auto _ : state) {
        benchmark::DoNotOptimize(cascade(g, roots));
    }
}
BENCHMARK(BM_Cascade)->Arg(100)->Arg(1000)->Arg(10000);

BENCHMARK_MAIN();
