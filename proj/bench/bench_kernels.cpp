// Serial references against their OpenMP counterparts. The argument of the
// parallel variants is the worker count; times are wall-clock and inputs are
// built before the timed loops.

#include "sparsep/fixtures.hpp"
#include "sparsep/logspec.hpp"
#include "sparsep/parallel.hpp"
#include "sparsep/separate.hpp"
#include "sparsep/stft.hpp"

#include <benchmark/benchmark.h>

using namespace sparsep;

namespace
{

const Fixture& fixture()
{
    static const Fixture fx = [] {
        MelodySpec ms;
        ms.instruments = {recorder_like(), sawtooth_like()};
        ms.duration_s = 2.0;
        ms.seed = 1;
        return synth_melodies(ms);
    }();
    return fx;
}

const StftResult& spectrum()
{
    static const StftResult r = stft_serial(fixture().mix, StftConfig{});
    return r;
}

// A slice of consecutive frames from the middle of the normalized spectrogram.
const SpectrogramGrid& linear_slice()
{
    static const SpectrogramGrid g = [] {
        const auto& z = spectrum().magnitude;
        const std::size_t keep = 16;
        const std::size_t first = (z.frames - keep) / 2;
        const double m = z.max_value();
        SpectrogramGrid out(z.bins, keep, z.axis, z.frame_period_s);
        for (std::size_t i = 0; i < out.values.size(); ++i)
            out.values[i] = z.values[first * z.bins + i] / m;
        return out;
    }();
    return g;
}

const SpectrogramGrid& log_slice()
{
    static const SpectrogramGrid g =
        to_log_spectrogram_serial(linear_slice(), LogTransformConfig::for_stft(StftConfig{})).log_spectrogram;
    return g;
}

const Dictionary& true_profiles()
{
    static const Dictionary d = [] {
        const std::vector<InstrumentSpec> inst{recorder_like(), sawtooth_like()};
        Dictionary out(25, inst.size());
        for (std::size_t k = 0; k < inst.size(); ++k)
            for (std::size_t h = 0; h < inst[k].amplitudes.size() && h < 25; ++h)
                out.at(h, k) = inst[k].amplitudes[h];
        return out;
    }();
    return d;
}

void stft_serial_bench(benchmark::State& state)
{
    fixture();
    for (auto _ : state)
        benchmark::DoNotOptimize(stft_serial(fixture().mix, StftConfig{}));
}

void stft_parallel_bench(benchmark::State& state)
{
    fixture();
    set_thread_count(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(stft(fixture().mix, StftConfig{}));
    set_thread_count(0);
}

void istft_serial_bench(benchmark::State& state)
{
    const auto& r = spectrum();
    for (auto _ : state)
        benchmark::DoNotOptimize(istft_serial(r.magnitude, r.phase, StftConfig{}, fixture().mix.size()));
}

void istft_parallel_bench(benchmark::State& state)
{
    const auto& r = spectrum();
    set_thread_count(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(istft(r.magnitude, r.phase, StftConfig{}, fixture().mix.size()));
    set_thread_count(0);
}

void log_transform_serial_bench(benchmark::State& state)
{
    const auto cfg = LogTransformConfig::for_stft(StftConfig{});
    linear_slice();
    for (auto _ : state)
        benchmark::DoNotOptimize(to_log_spectrogram_serial(linear_slice(), cfg));
}

void log_transform_parallel_bench(benchmark::State& state)
{
    const auto cfg = LogTransformConfig::for_stft(StftConfig{});
    linear_slice();
    set_thread_count(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(to_log_spectrogram(linear_slice(), cfg));
    set_thread_count(0);
}

const std::vector<std::size_t> kBoth{0, 1};

void identify_serial_bench(benchmark::State& state)
{
    log_slice();
    true_profiles();
    for (auto _ : state)
        benchmark::DoNotOptimize(identify_frames_serial(log_slice(), true_profiles(), kBoth, SeparationConfig{}));
}

void identify_parallel_bench(benchmark::State& state)
{
    log_slice();
    true_profiles();
    set_thread_count(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(identify_frames(log_slice(), true_profiles(), kBoth, SeparationConfig{}));
    set_thread_count(0);
}

}  // namespace

BENCHMARK(stft_serial_bench)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(stft_parallel_bench)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(istft_serial_bench)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(istft_parallel_bench)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(log_transform_serial_bench)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(log_transform_parallel_bench)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(identify_serial_bench)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(identify_parallel_bench)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
