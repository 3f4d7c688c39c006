#pragma once

#include "run_config.hpp"

#include "sparsep/metrics.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace sparsep::cli
{

namespace fs = std::filesystem;

/// Log spectrogram of a WAV file, written as a cache and optionally as a PGM.
void cmd_transform(const fs::path& input, const fs::path& cache, const std::optional<fs::path>& pgm,
                   const RunConfig& cfg, std::ostream& log);

/// Dictionary learned from a cached log spectrogram.
void cmd_train(const fs::path& cache, const fs::path& dictionary, const RunConfig& cfg,
               std::ostream& log);

struct SeparateOptions
{
    /// Reuse a log spectrogram computed by cmd_transform.
    std::optional<fs::path> cache;
    /// Output file stem; defaults to the input stem.
    std::string stem;
    bool pgm = false;
    /// Reference stems to score the separation against.
    std::vector<fs::path> references;
};

/// Writes <output_dir>/<stem>.inst<k>.wav per kept instrument and returns
/// their paths.
std::vector<fs::path> cmd_separate(const fs::path& input, const fs::path& dictionary,
                                   const SeparateOptions& opts, const RunConfig& cfg,
                                   std::ostream& log);

BssScores cmd_eval(const std::vector<fs::path>& references, const std::vector<fs::path>& estimates,
                   std::ostream& log);

struct SynthOptions
{
    double duration_s = 20.0;
    int sample_rate_hz = 48000;
    bool octave_overlap = false;
    std::string stem = "fixture";
};

/// Two-instrument melody fixture: <stem>.mix.wav, <stem>.ref0.wav and
/// <stem>.ref1.wav in the output directory.
std::vector<fs::path> cmd_synth(const SynthOptions& opts, const RunConfig& cfg, std::ostream& log);

}  // namespace sparsep::cli
