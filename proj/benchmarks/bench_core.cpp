#include <benchmark/benchmark.h>

#include <random>

#include "gen.hpp"
#include "rfseq/crosstalk.hpp"
#include "rfseq/dds.hpp"
#include "rfseq/playback.hpp"
#include "rfseq/sequencer.hpp"
#include "rfseq/spline.hpp"

using namespace rfseq;

namespace {

void BM_DdsStep(benchmark::State& state)
{
    ChannelState ch;
    ch.tones[0].freq = FreqWord(268435456000);
    ch.tones[1].freq = FreqWord(281857228800);
    ch.tones[0].amp = ch.tones[1].amp = AmpWord(20000);
    for (auto _ : state)
        benchmark::DoNotOptimize(step(ch));
    state.SetItemsProcessed(state.iterations() * kTonesPerChannel);
}
BENCHMARK(BM_DdsStep);

void BM_SplineCubic(benchmark::State& state)
{
    const auto n = std::uint64_t(state.range(0));
    auto k = poly_to_knot({1e9, 3e7, -2e5, 4e3}, n);
    SplineWord w;
    w.coeffs = k.coeffs;
    w.meta.shift = k.shift;
    w.duration = n;
    for (auto _ : state) {
        SplineEngine e;
        e.push(w);
        e.close_input();
        e.trigger();
        for (std::uint64_t j = 0; j < n; j++)
            benchmark::DoNotOptimize(e.step());
    }
    state.SetItemsProcessed(state.iterations() * std::int64_t(n));
}
BENCHMARK(BM_SplineCubic)->Arg(64)->Arg(4096);

GateProgram random_program(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    gen::Limits lim;
    lim.max_gates = 20;
    lim.max_sequence = 2000;
    return gen::program(rng, lim);
}

void BM_CompileProgram(benchmark::State& state)
{
    auto p = random_program(11);
    for (auto _ : state)
        benchmark::DoNotOptimize(compile_program(p, LutStrategy::Reprogram));
}
BENCHMARK(BM_CompileProgram);

void BM_Expand(benchmark::State& state)
{
    auto c = compile_program(random_program(12), LutStrategy::Reprogram);
    for (auto _ : state)
        benchmark::DoNotOptimize(expand(c.records, GateLibrary{}));
    state.SetItemsProcessed(state.iterations() * std::int64_t(c.records.size()));
}
BENCHMARK(BM_Expand);

void BM_Machine(benchmark::State& state)
{
    auto c = compile_program(random_program(13), LutStrategy::Reprogram);
    const auto cycles = std::uint64_t(state.range(0));
    for (auto _ : state) {
        Machine m(c.records, {}, c.program.channels);
        m.run(cycles);
        benchmark::DoNotOptimize(m.take_trace());
    }
    state.SetItemsProcessed(state.iterations() * std::int64_t(cycles));
}
BENCHMARK(BM_Machine)->Arg(10000);

void BM_Crosstalk(benchmark::State& state)
{
    XtalkConfig cfg{{{0, 1, 0.034, 1.187, kDspLatencyCycles}, {1, 0, 0.02, -0.4, 6}}};
    CrosstalkCompensator comp(cfg);
    std::array<IqSample, kChannels> x{};
    x[0] = {20000, -3000};
    x[1] = {-12000, 9000};
    for (auto _ : state)
        benchmark::DoNotOptimize(comp.push(x));
}
BENCHMARK(BM_Crosstalk);

}  // namespace
BENCHMARK_MAIN();
