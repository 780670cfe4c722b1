#include <benchmark/benchmark.h>

#include "spath/posterior.hpp"
#include "spath/samplers.hpp"

namespace {

using namespace spath;

PosteriorModel make_model(int subjects, std::uint64_t seed) {
  const std::vector<HazardPiece> pieces{{0.0, 1.0}, {1.0, 0.5}};
  auto data = simulate_piecewise_exponential(pieces, subjects, 3.0, seed);
  PriorSpec prior;
  prior.eta_upper = 6.0;
  return PosteriorModel(std::move(data), prior);
}

void BM_ModelTables(benchmark::State& state) {
  const std::vector<HazardPiece> pieces{{0.0, 1.0}, {1.0, 0.5}};
  const auto data = simulate_piecewise_exponential(pieces, int(state.range(0)), 3.0, 99);
  PriorSpec prior;
  prior.eta_upper = 6.0;
  for (auto _ : state) {
    PosteriorModel model(data, prior);
    benchmark::DoNotOptimize(model.log_xi_at_time(1, 1));
  }
}
BENCHMARK(BM_ModelTables)->Arg(100)->Arg(500)->Arg(1000);

void BM_ApCycle(benchmark::State& state) {
  const auto model = make_model(int(state.range(0)), 17);
  ChainState chain{SPath{}, make_rng(3, 1), 0};
  std::vector<int> coords(std::size_t(model.n()) + 1);
  for (int j = 0; j <= model.n(); ++j) coords[std::size_t(j)] = j;
  chain.path = validate_path(coords);
  for (auto _ : state) {
    for (int r = 1; r <= model.n() - 1; ++r) ap_step(chain, r, model);
    benchmark::DoNotOptimize(chain.path.coords.back());
  }
}
BENCHMARK(BM_ApCycle)->Arg(100)->Arg(500);

void BM_GibbsCycle(benchmark::State& state) {
  const auto model = make_model(int(state.range(0)), 17);
  ChainState chain{SPath{}, make_rng(3, 1), 0};
  std::vector<int> coords(std::size_t(model.n()) + 1);
  for (int j = 0; j <= model.n(); ++j) coords[std::size_t(j)] = j;
  chain.path = validate_path(coords);
  for (auto _ : state) {
    for (int r = 1; r <= model.n() - 1; ++r) gibbs_path_step(chain, r, model);
    benchmark::DoNotOptimize(chain.path.coords.back());
  }
}
BENCHMARK(BM_GibbsCycle)->Arg(100)->Arg(500);

void BM_GwcrCycle(benchmark::State& state) {
  const auto model = make_model(int(state.range(0)), 17);
  PartitionChainState chain;
  chain.rng = make_rng(3, 1);
  for (int i = 1; i <= model.n(); ++i) chain.cells.push_back({i});
  for (auto _ : state) {
    for (int item = 1; item <= model.n(); ++item) gwcr_reseat_step(chain, item, model);
    benchmark::DoNotOptimize(chain.cells.size());
  }
}
BENCHMARK(BM_GwcrCycle)->Arg(100)->Arg(500);

void BM_ExactEstimator(benchmark::State& state) {
  const auto model = make_model(8, 21);
  const std::vector<double> grid{0.5, 1.0, 2.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_hazard_exact(grid, model, 12));
  }
}
BENCHMARK(BM_ExactEstimator);

}  // namespace

BENCHMARK_MAIN();
