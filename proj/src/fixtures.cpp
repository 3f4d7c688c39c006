#include "sparsep/fixtures.hpp"

#include "sparsep/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace sparsep
{

InstrumentSpec recorder_like()
{
    return {"recorder", {1.0, 0.1, 0.05}, 0.0, 300.0, 1000.0};
}

InstrumentSpec sawtooth_like(std::size_t partials)
{
    InstrumentSpec s{"sawtooth", {}, 0.0, 150.0, 600.0};
    for (std::size_t h = 1; h <= partials; ++h)
        s.amplitudes.push_back(1.0 / static_cast<double>(h));
    return s;
}

namespace
{

double quantize(double v)
{
    return std::clamp(std::round(v * 32768.0), -32768.0, 32767.0) / 32768.0;
}

std::vector<double> semitone_grid(double low, double high)
{
    std::vector<double> out;
    const int k0 = static_cast<int>(std::ceil(12.0 * std::log2(low / 440.0)));
    const int k1 = static_cast<int>(std::floor(12.0 * std::log2(high / 440.0)));
    for (int k = k0; k <= k1; ++k)
        out.push_back(440.0 * std::pow(2.0, k / 12.0));
    return out;
}

}  // namespace

Fixture synth_melodies(const MelodySpec& spec)
{
    if (spec.instruments.empty())
        throw ConfigError("fixture needs at least one instrument");
    if (spec.octave_overlap && spec.instruments.size() != 2)
        throw ConfigError("octave overlap needs exactly two instruments");
    if (!(spec.duration_s > 0.0) || !(spec.note_s > 0.02) || !(spec.level > 0.0))
        throw ConfigError("fixture durations and level must be positive");
    require_supported_rate(spec.sample_rate_hz);

    const auto n = static_cast<std::size_t>(std::llround(spec.duration_s * spec.sample_rate_hz));
    const auto note_len = static_cast<std::size_t>(std::llround(spec.note_s * spec.sample_rate_hz));
    std::mt19937_64 rng(spec.seed);

    Fixture fx;
    fx.mix.sample_rate_hz = spec.sample_rate_hz;
    fx.mix.samples.assign(n, 0.0);
    for (std::size_t k = 0; k < spec.instruments.size(); ++k)
    {
        const InstrumentSpec& inst = spec.instruments[k];
        const auto grid = semitone_grid(inst.low_hz, inst.high_hz);
        if (grid.empty())
            throw ConfigError("instrument '" + inst.name + "' has an empty pitch range");
        std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);

        AudioClip ref;
        ref.sample_rate_hz = spec.sample_rate_hz;
        ref.samples.assign(n, 0.0);
        std::vector<double> notes;
        // Later instruments start half a note late so onsets do not coincide.
        const std::size_t start = spec.octave_overlap ? 0 : (k % 2) * note_len / 2;
        for (std::size_t pos = start, i = 0; pos + note_len <= n; pos += note_len, ++i)
        {
            const double f = spec.octave_overlap && k == 1 ? 2.0 * fx.notes_hz[0][i] : grid[pick(rng)];
            notes.push_back(f);
            AudioClip tone = synth_harmonic_tone(f, inst.amplitudes, inst.inharmonicity, spec.note_s,
                                                 spec.sample_rate_hz);
            const double g = spec.level / 0.5;
            for (std::size_t j = 0; j < tone.size() && pos + j < n; ++j)
                ref.samples[pos + j] += g * tone.samples[j];
        }
        for (double& v : ref.samples)
            v = quantize(v);
        for (std::size_t j = 0; j < n; ++j)
            fx.mix.samples[j] += ref.samples[j];
        fx.references.push_back(std::move(ref));
        fx.notes_hz.push_back(std::move(notes));
    }
    return fx;
}

}  // namespace sparsep
