#include "dcfwb/batch.hpp"

#include <benchmark/benchmark.h>

using namespace dcfwb;

namespace {

MockScript script(std::vector<std::pair<std::size_t, std::string>> guesses, std::size_t horizon = 40) {
    MockScript s;
    s.horizon = horizon;
    ScriptedElement e;
    for (auto& [st, p] : guesses)
        e.guesses.push_back(Guess{st, parse(p)});
    e.truth = e.guesses.back().p;
    s.elements.push_back(e);
    return s;
}

std::vector<MockScript> scripts() {
    return {script({{0, "X0^2 - 2"}}), script({{0, "X0 - 3"}}), script({{0, "0"}}), script({{0, "X0'"}}),
            script({{0, "X0'"}, {10, "X0^2 - 2"}}), script({{0, "0"}, {8, "X0 - 5"}})};
}

std::vector<Graph> graphs() {
    std::vector<Graph> gs;
    for (std::size_t n = 1; n <= 4; ++n)
        for (const Graph& g : all_graphs(n))
            gs.push_back(g);
    return gs;
}

void BM_ScenariosSerial(benchmark::State& st) {
    auto s = scripts();
    for (auto _ : st)
        benchmark::DoNotOptimize(run_scenarios_serial(s));
}

void BM_ScenariosParallel(benchmark::State& st) {
    auto s = scripts();
    for (auto _ : st)
        benchmark::DoNotOptimize(run_scenarios(s, static_cast<int>(st.range(0))));
}

void BM_RoundTripsSerial(benchmark::State& st) {
    auto gs = graphs();
    for (auto _ : st)
        benchmark::DoNotOptimize(round_trips_serial(gs, 5, 7));
}

void BM_RoundTripsParallel(benchmark::State& st) {
    auto gs = graphs();
    for (auto _ : st)
        benchmark::DoNotOptimize(round_trips(gs, 5, 7, static_cast<int>(st.range(0))));
}

} // namespace

BENCHMARK(BM_ScenariosSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScenariosParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RoundTripsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RoundTripsParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
