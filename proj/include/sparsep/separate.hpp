#pragma once

#include "sparsep/audio.hpp"
#include "sparsep/dictionary.hpp"
#include "sparsep/grid.hpp"
#include "sparsep/logspec.hpp"
#include "sparsep/pursuit.hpp"
#include "sparsep/stft.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace sparsep
{

/// Linear spectrogram, its phase, and the log spectrogram computed from the
/// linear one divided by `scale` (its maximum, or 1 for silence).
struct MixtureAnalysis
{
    StftResult stft;
    double scale = 1.0;
    LogTransformResult log;
    std::size_t n_samples = 0;
};

MixtureAnalysis analyse_mixture(const AudioClip& clip, const StftConfig& stft_cfg,
                                const LogTransformConfig& log_cfg);

struct SeparationConfig
{
    std::size_t n_spr = 1;
    bool use_mask = true;
    int gl_iters = 1;
    double mask_epsilon = 1e-12;
    LogAxisConfig axis{};
    ToneBox tone{};
    /// Per-frame pursuit settings; n_spr is taken from this struct.
    PursuitConfig pursuit = default_pursuit();

    static PursuitConfig default_pursuit();
    PursuitConfig pursuit_config() const;
    void validate() const;
};

struct SeparationResult
{
    /// Atoms per frame; `pattern` indexes the kept-column list.
    std::vector<std::vector<PursuitAtom>> atoms_per_frame;
    /// Model spectrograms per instrument, in the units of Z.
    std::vector<SpectrogramGrid> inst_spectrograms;
    std::vector<SpectrogramGrid> masked_spectrograms;
    std::vector<AudioClip> signals;
};

/// Frame-wise pursuit with the kept columns. Frames run in parallel.
std::vector<std::vector<PursuitAtom>> identify_frames(const SpectrogramGrid& log_spectrogram,
                                                      const Dictionary& dict,
                                                      std::span<const std::size_t> kept,
                                                      const SeparationConfig& cfg);
std::vector<std::vector<PursuitAtom>> identify_frames_serial(const SpectrogramGrid& log_spectrogram,
                                                             const Dictionary& dict,
                                                             std::span<const std::size_t> kept,
                                                             const SeparationConfig& cfg);

/// Linear-axis spectrogram of instrument `eta` (index into `kept`): every
/// atom contributes Gaussians of its width at the partial frequencies
/// (1 + b h^2)^(1/2) h f(mu) with amplitudes a * D[h, kept[eta]]. Partials at
/// or above the Nyquist bin are omitted.
SpectrogramGrid reconstruct_instrument(std::span<const std::vector<PursuitAtom>> atoms_per_frame,
                                       std::size_t eta, const Dictionary& dict,
                                       std::span<const std::size_t> kept, const LogAxisConfig& axis,
                                       std::size_t bins, double hz_per_bin = 0.0,
                                       double frame_period_s = 0.0);

/// inst / (total + epsilon) * original elementwise.
SpectrogramGrid apply_mask(const SpectrogramGrid& inst, const SpectrogramGrid& total,
                           const SpectrogramGrid& original, double epsilon = 1e-12);

/// Identification, reconstruction, optional masking, and Griffin-Lim
/// resynthesis of every kept instrument, seeded with the mixture phase.
SeparationResult separate(const MixtureAnalysis& mixture, const Dictionary& dict,
                          std::span<const std::size_t> kept, const SeparationConfig& cfg,
                          const StftConfig& stft_cfg);

/// Griffin-Lim resynthesis of one spectrogram with the mixture phase.
AudioClip resynthesize(const SpectrogramGrid& magnitude, const PhaseGrid& phase, int gl_iters,
                       const StftConfig& stft_cfg, std::size_t n_samples);

}  // namespace sparsep
