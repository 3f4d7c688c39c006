#pragma once

#include "sparsep/grid.hpp"
#include "sparsep/pursuit.hpp"
#include "sparsep/stft.hpp"

#include <cstddef>
#include <filesystem>
#include <vector>

namespace sparsep
{

/// Logarithmic frequency axis alpha(f) = alpha0 * log2(f / f0), with f in
/// linear STFT bins. The defaults span ten octaves in 1024 bins (20 Hz to
/// 20.48 kHz at 48 kHz).
struct LogAxisConfig
{
    double f0 = 5.12;
    double alpha0 = 102.4;
    std::size_t n_bins = 1024;

    double to_log(double linear_bin) const;
    double to_linear(double log_bin) const;
    void validate() const;
    LogAxis axis() const { return {f0, alpha0}; }
};

struct LogTransformConfig
{
    LogAxisConfig axis{};
    /// Default peak width in linear bins (sigma of the analysis window's
    /// spectral line).
    double sigma_nil = 12.0 / (2.0 * 3.14159265358979323846);
    PursuitConfig pursuit = default_pursuit();
    /// Peak candidates below this fraction of the spectrogram maximum are
    /// ignored (-100 dB).
    double relative_floor = 1e-5;

    static PursuitConfig default_pursuit();
    static LogTransformConfig for_stft(const StftConfig& stft);
};

struct LogTransformResult
{
    SpectrogramGrid log_spectrogram;
    /// Gaussian peaks found in each frame (shift in linear bins).
    std::vector<std::vector<PursuitAtom>> peaks;
};

/// Converts a linear-frequency magnitude spectrogram into the sparse
/// log-frequency spectrogram: each frame is decomposed into Gaussian peaks
/// by the pursuit with the peak selector, and every peak is redrawn on the
/// log axis at alpha(mu) with its width (in bins) and amplitude unchanged.
/// Frames run in parallel; output does not depend on the thread count.
LogTransformResult to_log_spectrogram(const SpectrogramGrid& linear, const LogTransformConfig& cfg);
LogTransformResult to_log_spectrogram_serial(const SpectrogramGrid& linear,
                                             const LogTransformConfig& cfg);

/// Pursuit on one linear frame with the transform's settings.
std::vector<PursuitAtom> log_frame_peaks(std::span<const double> frame, const LogTransformConfig& cfg,
                                         double min_height);

/// Draws Gaussian peaks on the log axis; drops peaks outside its range.
void draw_log_frame(std::span<const PursuitAtom> peaks, const LogAxisConfig& axis,
                    std::span<double> out);

/// Binary cache of a log spectrogram (little-endian):
///   char[4]  "SPLS"
///   uint32   version (1)
///   uint32   m, number of log bins
///   uint32   number of frames
///   float64  f0, alpha0, frame period in seconds
///   float32  values, row-major [bin][frame]
/// The file is written to a temporary name and renamed into place.
void write_log_cache(const SpectrogramGrid& grid, const std::filesystem::path& path);
SpectrogramGrid read_log_cache(const std::filesystem::path& path);

}  // namespace sparsep
