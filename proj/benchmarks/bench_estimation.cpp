#include <benchmark/benchmark.h>

#include "fixture.hpp"
#include "scutinav/estimation.hpp"

using namespace scutinav;

namespace {

const bench::Campaign& campaign() {
    static const auto c = bench::make_campaign();
    return c;
}

void BM_ProfileEvaluation(benchmark::State& state) {
    const auto& c = campaign();
    const estimation::ShiftObjective obj(c.measurements.stars[0], c.models[0]);
    double dt = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(obj.profile(dt));
        dt += 1.0;
    }
}
BENCHMARK(BM_ProfileEvaluation);

void BM_DirectEvaluation(benchmark::State& state) {
    const auto& c = campaign();
    const estimation::ShiftObjective obj(c.measurements.stars[0], c.models[0]);
    double dt = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(obj.direct_best_scale(dt));
        dt += 1.0;
    }
}
BENCHMARK(BM_DirectEvaluation);

// window width in days; the nominal search spans +-10 d plus light time
void BM_EnumerateCandidates(benchmark::State& state) {
    const auto& c = campaign();
    const double half = static_cast<double>(state.range(0)) * 86400.0;
    estimation::EnumerationOptions opt;
    opt.correlated_residuals = true;
    std::size_t found = 0;
    for (auto _ : state) {
        const estimation::ShiftObjective obj(c.measurements.stars[3], c.models[3]);
        found = estimation::enumerate_candidates(obj, c.clock_offset_s - half, c.clock_offset_s + half, opt).size();
    }
    state.counters["candidates"] = static_cast<double>(found);
}
BENCHMARK(BM_EnumerateCandidates)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

} // namespace
