#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace sparsep
{

/// Mono PCM audio with samples nominally in [-1, 1].
struct AudioClip
{
    std::vector<double> samples;
    int sample_rate_hz = 48000;

    std::size_t size() const noexcept { return samples.size(); }
    double duration_s() const noexcept
    {
        return static_cast<double>(samples.size()) / sample_rate_hz;
    }
};

enum class WavEncoding
{
    pcm16,
    float32,
};

/// True for the sample rates the spectrogram constants are defined for.
bool is_supported_rate(int sample_rate_hz) noexcept;

/// Throws DomainError unless the rate is 44100 or 48000 Hz.
void require_supported_rate(int sample_rate_hz);

/// Reads a RIFF/WAVE file holding 16-bit PCM or 32-bit IEEE float data.
/// Multi-channel data is averaged to mono. Throws IoError when the file
/// cannot be opened and FormatError for anything not understood.
AudioClip read_wav(const std::filesystem::path& path);

/// Writes a mono WAV file. Samples outside [-1, 1] are clamped; the number
/// of clamped samples is returned (and a warning printed to stderr when
/// nonzero). Throws IoError when the path is not writable.
std::size_t write_wav(const AudioClip& clip, const std::filesystem::path& path,
                      WavEncoding encoding = WavEncoding::pcm16);

/// Sum of sinusoids at the partial frequencies (1 + b h^2)^(1/2) h f1,
/// h = 1..amplitudes.size(). Partials at or above Nyquist are dropped, the
/// result gets a 10 ms raised-cosine fade at both ends, and it is scaled so
/// that its peak magnitude is 0.5. Missing phases default to zero.
AudioClip synth_harmonic_tone(double f1_hz, std::span<const double> amplitudes,
                              double inharmonicity, double duration_s,
                              int sample_rate_hz, std::span<const double> phases = {});

/// Frequency of partial h (1-based) of a stiff-string tone.
double partial_frequency(double f1, int h, double inharmonicity) noexcept;

}  // namespace sparsep
