// Serial reference vs OpenMP kernels on random unit-scale vectors.
#include <random>

#include <benchmark/benchmark.h>

#include "topiclabel/kernels.hpp"

using namespace topiclabel;

namespace {

std::vector<EmbeddingVector> random_vectors(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<EmbeddingVector> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v(dim);
    for (auto& x : v) x = g(rng);
    out.emplace_back(std::move(v), "bench");
  }
  return out;
}

constexpr std::size_t kDim = 384;

template <auto Kernel>
void BM_ScoreCandidates(benchmark::State& state) {
  const auto query = random_vectors(1, kDim, 1).front();
  const auto cands = random_vectors(static_cast<std::size_t>(state.range(0)), kDim, 2);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(query, cands));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Kernel>
void BM_PairwiseCosine(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto rows = random_vectors(n, kDim, 3);
  const auto cols = random_vectors(n, kDim, 4);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(rows, cols));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

}  // namespace

BENCHMARK(BM_ScoreCandidates<kernels::serial::score_candidates>)->Name("score_candidates/serial")->RangeMultiplier(8)->Range(64, 32768)->UseRealTime();
BENCHMARK(BM_ScoreCandidates<kernels::parallel::score_candidates>)->Name("score_candidates/parallel")->RangeMultiplier(8)->Range(64, 32768)->UseRealTime();
BENCHMARK(BM_PairwiseCosine<kernels::serial::pairwise_cosine>)->Name("pairwise_cosine/serial")->RangeMultiplier(4)->Range(4, 256)->UseRealTime();
BENCHMARK(BM_PairwiseCosine<kernels::parallel::pairwise_cosine>)->Name("pairwise_cosine/parallel")->RangeMultiplier(4)->Range(4, 256)->UseRealTime();

BENCHMARK_MAIN();
