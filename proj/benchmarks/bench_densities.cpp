#include <vector>

#include <benchmark/benchmark.h>

#include "compdist/distributions.hpp"
#include "compdist/numeric.hpp"
#include "compdist/simplex.hpp"
#include "compdist/verification.hpp"

namespace {

void BM_LogGamma(benchmark::State& state) {
    const double a = static_cast<double>(state.range(0)) / 100.0;
    for (auto _ : state) benchmark::DoNotOptimize(compdist::log_gamma(a));
}
BENCHMARK(BM_LogGamma)->Arg(5)->Arg(150)->Arg(700)->Arg(100000);

void BM_DirichletMultinomialLogPmf(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    std::vector<double> shapes(n);
    std::vector<std::uint64_t> counts(n, 3);
    for (std::size_t i = 0; i < n; ++i) shapes[i] = 0.5 + static_cast<double>(i);
    const compdist::GammaMixtureParams params(shapes);
    const compdist::CountVector x(counts);
    for (auto _ : state) benchmark::DoNotOptimize(compdist::dirichlet_multinomial_log_pmf(params, 3 * n, x));
}
BENCHMARK(BM_DirichletMultinomialLogPmf)->Arg(2)->Arg(8)->Arg(64);

void BM_EnumerateCompositions(benchmark::State& state) {
    const auto m = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(compdist::enumerate_compositions(4, m));
}
BENCHMARK(BM_EnumerateCompositions)->Arg(4)->Arg(12);

void BM_AlrRoundTrip(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const compdist::Composition x = compdist::Composition::from_weights(std::vector<double>(n, 1.0));
    for (auto _ : state) benchmark::DoNotOptimize(compdist::log_ratio_inverse(compdist::log_ratio_forward(x)));
}
BENCHMARK(BM_AlrRoundTrip)->Arg(3)->Arg(32);

void BM_AlrDirichletLogPdf(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const compdist::DirichletParams alpha(std::vector<double>(n, 1.5));
    const compdist::LogRatioVector y(std::vector<double>(n - 1, 0.25));
    for (auto _ : state) benchmark::DoNotOptimize(compdist::alr_dirichlet_log_pdf(alpha, y));
}
BENCHMARK(BM_AlrDirichletLogPdf)->Arg(3)->Arg(32);

void BM_NormalizedNbLogPmf(benchmark::State& state) {
    const compdist::GammaMixtureParams params({1.0, 2.5, 0.7}, 1.5);
    for (auto _ : state) benchmark::DoNotOptimize(compdist::normalized_nb_log_pmf(params, 1, 7, 20));
}
BENCHMARK(BM_NormalizedNbLogPmf);

}  // namespace

BENCHMARK_MAIN();
