#include <benchmark/benchmark.h>

#include "gtmprod/catalog.hpp"
#include "gtmprod/dirichlet.hpp"
#include "gtmprod/evaluator.hpp"
#include "gtmprod/seqcore.hpp"

namespace {

using namespace gtmprod;

void BM_PartialSum(benchmark::State& state) {
  const auto seq = parse_sequence_spec("gtm:5:0110");
  std::uint64_t n = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(seq.partial_sum(n));
    n = n * 6364136223846793005ULL + 1442695040888963407ULL;
  }
}
BENCHMARK(BM_PartialSum);

void BM_SignStream(benchmark::State& state) {
  const auto seq = parse_sequence_spec("gtm:3:11");
  SignStream s(seq.pattern());
  for (auto _ : state) {
    benchmark::DoNotOptimize(s.sign());
    s.advance();
  }
}
BENCHMARK(BM_SignStream);

// Cold ladder evaluation at order s, no cache.
void BM_DirichletValue(benchmark::State& state) {
  const auto seq = parse_sequence_spec("gtm:3:01");
  const int s = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(dirichlet_value(seq, s, 1e-12));
}
BENCHMARK(BM_DirichletValue)->Arg(1)->Arg(2)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_EvaluateWoodsRobbins(benchmark::State& state) {
  const ProductSpec spec{parse_sequence_spec("gtm:2:1"), ExponentMode::delta, 0,
                         parse_product_term("(2n+1)/(2n+2)")};
  DirichletCache cache;
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_product(spec, 1e-12, &cache));
}
BENCHMARK(BM_EvaluateWoodsRobbins)->Unit(benchmark::kMillisecond);

void BM_EvaluateDirect(benchmark::State& state) {
  const ProductSpec spec{parse_sequence_spec("gtm:3:001"), ExponentMode::delta, 0,
                         parse_product_term("(3n+2)/(3n+3)")};
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_direct(spec, n));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_EvaluateDirect)->Arg(59049)->Arg(531441)->Unit(benchmark::kMillisecond);

void BM_CatalogRun(benchmark::State& state) {
  const auto records = load_catalog("builtin");
  for (auto _ : state) {
    DirichletCache cache;
    benchmark::DoNotOptimize(run_catalog(records, "", {}, &cache));
  }
}
BENCHMARK(BM_CatalogRun)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace

BENCHMARK_MAIN();
