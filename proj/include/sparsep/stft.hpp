#pragma once

#include "sparsep/audio.hpp"
#include "sparsep/grid.hpp"

#include <cstddef>
#include <vector>

namespace sparsep
{

/// Gaussian-window STFT parameters. The window exp(-n^2 / (2 zeta^2)) is cut
/// at +-halfwidth*zeta samples and the FFT size equals the window length.
struct StftConfig
{
    int sample_rate_hz = 48000;
    double zeta_samples = 1024.0;
    int hop_samples = 256;
    double window_halfwidth = 6.0;

    std::size_t window_length() const;
    std::size_t fft_size() const { return window_length(); }
    std::size_t bin_count() const { return fft_size() / 2 + 1; }
    /// Frequency unit F: spacing of linear bins in Hz.
    double hz_per_bin() const;
    /// Frame period T in seconds.
    double frame_period_s() const;
    /// Standard deviation of a stationary sinusoid's spectral peak, in bins.
    double sigma_bins() const;
    /// Peak magnitude of a unit complex exponential, sqrt(2 pi) * zeta.
    double peak_gain() const;

    /// Throws DomainError when the parameters are inconsistent.
    void validate() const;

    static StftConfig for_rate(int sample_rate_hz);
};

struct StftResult
{
    SpectrogramGrid magnitude;
    PhaseGrid phase;
};

std::size_t frame_count(std::size_t n_samples, const StftConfig& cfg);

/// Magnitude and phase of the STFT. Frame t is centered on sample
/// t * hop; samples outside the clip are treated as zero. Throws
/// DomainError when the clip is shorter than one window.
StftResult stft(const AudioClip& clip, const StftConfig& cfg);
StftResult stft_serial(const AudioClip& clip, const StftConfig& cfg);

/// Least-squares overlap-add inverse of magnitude * exp(i phase).
std::vector<double> istft(const SpectrogramGrid& magnitude, const PhaseGrid& phase,
                          const StftConfig& cfg, std::size_t n_samples);
std::vector<double> istft_serial(const SpectrogramGrid& magnitude, const PhaseGrid& phase,
                                 const StftConfig& cfg, std::size_t n_samples);

struct GriffinLimResult
{
    AudioClip signal;
    /// || |STFT(signal_k)| - target ||_2 after iteration k (only when tracked).
    std::vector<double> errors;
};

/// Griffin-Lim phase retrieval started from `initial_phase`. Each iteration
/// imposes the target magnitude on the current phase, inverts, and (except
/// after the last one, unless errors are tracked) re-analyses the result.
GriffinLimResult griffin_lim(const SpectrogramGrid& target, const PhaseGrid& initial_phase,
                             int iterations, const StftConfig& cfg, std::size_t n_samples,
                             bool track_errors = false);

}  // namespace sparsep
