#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <variant>
#include <vector>

namespace sparsep
{

/// Linear frequency axis: bin k sits at k * hz_per_bin.
struct LinearAxis
{
    double hz_per_bin = 0.0;
};

/// Logarithmic axis: bin alpha corresponds to linear bin f0 * 2^(alpha / alpha0).
struct LogAxis
{
    double f0 = 5.12;
    double alpha0 = 102.4;
};

using FrequencyAxis = std::variant<LinearAxis, LogAxis>;

/// Nonnegative magnitudes indexed [bin, frame]. Storage is frame-major so
/// that one frame is a contiguous span.
struct SpectrogramGrid
{
    std::size_t bins = 0;
    std::size_t frames = 0;
    std::vector<double> values;
    FrequencyAxis axis = LinearAxis{};
    double frame_period_s = 0.0;

    SpectrogramGrid() = default;
    SpectrogramGrid(std::size_t n_bins, std::size_t n_frames, FrequencyAxis ax = LinearAxis{},
                    double period = 0.0)
        : bins(n_bins), frames(n_frames), values(n_bins * n_frames, 0.0), axis(ax),
          frame_period_s(period)
    {
    }

    double& at(std::size_t bin, std::size_t frame) { return values[frame * bins + bin]; }
    double at(std::size_t bin, std::size_t frame) const { return values[frame * bins + bin]; }

    std::span<double> frame(std::size_t t) { return {values.data() + t * bins, bins}; }
    std::span<const double> frame(std::size_t t) const { return {values.data() + t * bins, bins}; }

    bool same_shape(const SpectrogramGrid& other) const noexcept
    {
        return bins == other.bins && frames == other.frames;
    }

    double max_value() const noexcept;
};

/// STFT phase in radians, same layout as SpectrogramGrid.
struct PhaseGrid
{
    std::size_t bins = 0;
    std::size_t frames = 0;
    std::vector<double> values;

    PhaseGrid() = default;
    PhaseGrid(std::size_t n_bins, std::size_t n_frames)
        : bins(n_bins), frames(n_frames), values(n_bins * n_frames, 0.0)
    {
    }

    double& at(std::size_t bin, std::size_t frame) { return values[frame * bins + bin]; }
    double at(std::size_t bin, std::size_t frame) const { return values[frame * bins + bin]; }
};

/// Writes a binary PGM (P5) with low frequencies at the bottom. Magnitudes
/// are mapped to gray levels on a dB scale spanning `dynamic_range_db`
/// below the grid maximum (white = silent).
void write_pgm(const SpectrogramGrid& grid, const std::filesystem::path& path,
               double dynamic_range_db = 100.0);

}  // namespace sparsep
