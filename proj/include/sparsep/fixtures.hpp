#pragma once

#include "sparsep/audio.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace sparsep
{

/// A synthetic instrument: fixed relative partial amplitudes and a pitch range.
struct InstrumentSpec
{
    std::string name;
    std::vector<double> amplitudes;
    double inharmonicity = 0.0;
    double low_hz = 200.0;
    double high_hz = 800.0;
};

/// Mostly fundamental, faint second and third partials.
InstrumentSpec recorder_like();
/// Partials falling off as 1/h.
InstrumentSpec sawtooth_like(std::size_t partials = 15);

struct MelodySpec
{
    std::vector<InstrumentSpec> instruments;
    double duration_s = 20.0;
    double note_s = 0.5;
    int sample_rate_hz = 48000;
    std::uint64_t seed = 0;
    /// Peak level of each note.
    double level = 0.45;
    /// The second instrument doubles the first one an octave higher.
    bool octave_overlap = false;
};

struct Fixture
{
    AudioClip mix;
    std::vector<AudioClip> references;
    /// Fundamental of every note, per instrument.
    std::vector<std::vector<double>> notes_hz;
};

/// Random monophonic melodies (semitone grid within each instrument's range),
/// one per instrument, and their sum. Samples are quantized to the 16-bit
/// grid so the mixture equals the sum of the references exactly in a PCM
/// file as well.
Fixture synth_melodies(const MelodySpec& spec);

}  // namespace sparsep
