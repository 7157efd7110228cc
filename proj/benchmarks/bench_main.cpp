#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include <cascadenet/cascade.hpp>
#include <cascadenet/market_data.hpp>
#include <cascadenet/network.hpp>
#include <cascadenet/risk.hpp>

using namespace cascadenet;

namespace {

ReturnMatrix synthetic_panel(std::size_t n, std::size_t t) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> z;
    ReturnMatrix m;
    for (std::size_t j = 0; j < n; ++j) m.asset_ids.push_back("A" + std::to_string(j));
    m.returns = Matrix(t, n);
    for (std::size_t r = 0; r < t; ++r) {
        const double f = z(rng);
        for (std::size_t j = 0; j < n; ++j) m.returns(r, j) = 0.01 * (0.7 * f + z(rng));
    }
    return m;
}

ExposureNetwork synthetic_network(std::size_t n, double theta) {
    const ReturnMatrix m = synthetic_panel(n, 750);
    std::vector<double> prices(n);
    for (std::size_t i = 0; i < n; ++i) prices[i] = 10.0 + static_cast<double>(i % 17) * 5.0;
    return threshold_filter(exposure_matrix(correlation_matrix(m), volatilities(m), prices), theta);
}

void BM_CorrelationMatrix(benchmark::State& state) {
    const ReturnMatrix m = synthetic_panel(static_cast<std::size_t>(state.range(0)), 2500);
    for (auto _ : state) benchmark::DoNotOptimize(correlation_matrix(m));
}
BENCHMARK(BM_CorrelationMatrix)->Arg(30)->Arg(100);

void BM_MonteCarlo(benchmark::State& state) {
    const ExposureNetwork net = synthetic_network(static_cast<std::size_t>(state.range(0)), 0.3);
    const CapitalConfig cfg;
    const MonteCarloOptions opts{static_cast<std::size_t>(state.range(1))};
    for (auto _ : state) benchmark::DoNotOptimize(monte_carlo(net, cfg, Scenario::general(), 1000, 42, opts));
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_MonteCarlo)->Args({30, 1})->Args({30, 4})->Args({100, 1})->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_HillPlot(benchmark::State& state) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u;
    std::vector<double> losses(static_cast<std::size_t>(state.range(0)));
    for (auto& x : losses) x = std::pow(1.0 - u(rng), -1.0 / 2.5);
    for (auto _ : state) benchmark::DoNotOptimize(hill_plot_data(losses, 5, losses.size() / 5));
}
BENCHMARK(BM_HillPlot)->Arg(2500)->Arg(100000);

void BM_Clustering(benchmark::State& state) {
    const ExposureNetwork net = synthetic_network(static_cast<std::size_t>(state.range(0)), 0.2);
    for (auto _ : state) benchmark::DoNotOptimize(clustering_coefficients(net));
}
BENCHMARK(BM_Clustering)->Arg(30)->Arg(200);

}  // namespace
BENCHMARK_MAIN();
