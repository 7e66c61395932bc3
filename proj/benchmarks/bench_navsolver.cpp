#include <benchmark/benchmark.h>

#include "fixture.hpp"
#include "scutinav/estimation.hpp"
#include "scutinav/navsolver.hpp"
#include "scutinav/units.hpp"

using namespace scutinav;

namespace {

struct Prepared {
    std::vector<std::vector<estimation::ToaCandidate>> candidates;
    std::vector<catalog::LosVector> los;
    navsolver::SearchRegion region;
};

const Prepared& prepared() {
    static const Prepared p = [] {
        const auto c = bench::make_campaign();
        Prepared out;
        estimation::EnumerationOptions opt;
        opt.correlated_residuals = true;
        for (std::size_t i = 0; i < c.models.size(); ++i) {
            const double light = out.region.radius_au / kLightAuPerSecond;
            const double lo = -out.region.time_half_width_s - light;
            const double hi = out.region.time_half_width_s + light;
            out.candidates.push_back(
                estimation::enumerate_candidates(c.measurements.stars[i], c.models[i], lo, hi, opt));
            out.los.push_back(c.models[i].los);
        }
        return out;
    }();
    return p;
}

void BM_AmbiguitySearch(benchmark::State& state) {
    const auto& p = prepared();
    navsolver::SearchStats stats;
    for (auto _ : state) {
        stats = {};
        auto sols = navsolver::ambiguity_search(p.candidates, p.los, Eigen::Vector3d::Zero(), p.region, {}, &stats);
        benchmark::DoNotOptimize(sols);
    }
    state.counters["nodes"] = static_cast<double>(stats.nodes);
    state.counters["wls"] = static_cast<double>(stats.wls_solves);
}
BENCHMARK(BM_AmbiguitySearch)->Unit(benchmark::kMillisecond);

void BM_SolveWls(benchmark::State& state) {
    const auto& p = prepared();
    std::vector<navsolver::TimingSelection> sel;
    for (const auto& list : p.candidates) sel.push_back({list.front().delta_t_s, list.front().sigma_s});
    const auto sys = navsolver::build_system(sel, p.los, Eigen::Vector3d::Zero());
    for (auto _ : state) benchmark::DoNotOptimize(navsolver::solve_wls(sys));
}
BENCHMARK(BM_SolveWls);

} // namespace
