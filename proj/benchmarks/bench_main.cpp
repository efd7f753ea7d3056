#include <benchmark/benchmark.h>

#include "polarlab/asymptotics.hpp"
#include "polarlab/limitlaw.hpp"
#include "polarlab/montecarlo.hpp"
#include "polarlab/oracle.hpp"
#include "polarlab/stats.hpp"

using namespace polarlab;

namespace {

PolarModel f1()
{
    return PolarModel(RadialLaw::exponential(1.0), AngularLaw::uniform(-1.0, 1.0, 0.0),
                      ShapeU::power(0.0, 2.0, 2.0, 1.0), std::nullopt, Sidedness::OneSidedRight);
}

void BM_SolvePhi(benchmark::State& state)
{
    const PolarModel model = f1();
    const double x = static_cast<double>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(compute_normalizers(model, x));
    }
}
BENCHMARK(BM_SolvePhi)->Arg(10)->Arg(1000)->Arg(100000);

void BM_TailQuadrature(benchmark::State& state)
{
    const PolarModel model = f1();
    const double x = static_cast<double>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            tail_probability_ratio_quadrature(model, x, Condition::RightSided).value);
    }
}
BENCHMARK(BM_TailQuadrature)->Arg(10)->Arg(100)->Arg(1000);

void BM_LimitSampler(benchmark::State& state)
{
    const LimitLawOneSided law(2.0, 0.0);
    std::uint64_t k = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_one_sided(law, state.range(0), SeedStream{1, k++}));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LimitSampler)->Arg(1 << 16);

void BM_ConditionalSampler(benchmark::State& state)
{
    const PolarModel model = f1();
    SamplerOptions options;
    options.skip_validation = true;
    options.workers = static_cast<unsigned>(state.range(1));
    std::uint64_t k = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_conditional(model, 100.0, state.range(0),
                                                    Condition::RightSided, SeedStream{2, k++},
                                                    options));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ConditionalSampler)->Args({10000, 1})->Args({10000, 4})->Unit(benchmark::kMillisecond);

void BM_KsTwoSample(benchmark::State& state)
{
    const auto a = sample_one_sided(LimitLawOneSided(2.0, 0.0), state.range(0), SeedStream{3, 0});
    const auto b = sample_one_sided(LimitLawOneSided(2.0, 0.0), state.range(0), SeedStream{3, 1});
    std::vector<double> ra;
    std::vector<double> rb;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ra.push_back(a[i].r);
        rb.push_back(b[i].r);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(ks_two_sample(ra, rb));
    }
}
BENCHMARK(BM_KsTwoSample)->Arg(50000);

}  // namespace
BENCHMARK_MAIN();
