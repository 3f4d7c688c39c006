#include "sparsep/separate.hpp"

#include "sparsep/error.hpp"
#include "sparsep/pattern.hpp"

#include <algorithm>
#include <cmath>

namespace sparsep
{

MixtureAnalysis analyse_mixture(const AudioClip& clip, const StftConfig& stft_cfg,
                                const LogTransformConfig& log_cfg)
{
    MixtureAnalysis out;
    out.n_samples = clip.size();
    out.stft = stft(clip, stft_cfg);
    const double peak = out.stft.magnitude.max_value();
    out.scale = peak > 0.0 ? peak : 1.0;
    SpectrogramGrid normalized = out.stft.magnitude;
    for (double& v : normalized.values)
        v /= out.scale;
    out.log = to_log_spectrogram(normalized, log_cfg);
    return out;
}

PursuitConfig SeparationConfig::default_pursuit()
{
    PursuitConfig p;
    p.q = 0.5;
    p.lambda = 0.9;
    p.n_pre = 1;
    p.selector = Selector::xcorr;
    return p;
}

PursuitConfig SeparationConfig::pursuit_config() const
{
    PursuitConfig p = pursuit;
    p.n_spr = n_spr;
    return p;
}

void SeparationConfig::validate() const
{
    if (n_spr == 0)
        throw ConfigError("n_spr must be at least 1");
    if (gl_iters < 1)
        throw ConfigError("gl_iters must be at least 1");
    if (!(mask_epsilon > 0.0))
        throw ConfigError("mask epsilon must be positive");
    axis.validate();
    pursuit_config().validate();
}

namespace
{

void check_kept(const Dictionary& dict, std::span<const std::size_t> kept)
{
    if (kept.empty())
        throw DomainError("no dictionary columns to separate with");
    for (std::size_t k : kept)
        if (k >= dict.n_pat)
            throw DomainError("kept column " + std::to_string(k) + " is not in the dictionary");
}

template <bool Parallel>
std::vector<std::vector<PursuitAtom>> identify_impl(const SpectrogramGrid& log_spectrogram,
                                                    const Dictionary& dict,
                                                    std::span<const std::size_t> kept,
                                                    const SeparationConfig& cfg)
{
    cfg.validate();
    check_kept(dict, kept);
    if (log_spectrogram.bins != cfg.axis.n_bins)
        throw DomainError("log spectrogram height does not match the axis configuration");
    const HarmonicFamily family(dict, std::vector<std::size_t>(kept.begin(), kept.end()), cfg.axis,
                                cfg.tone);
    const PursuitConfig pcfg = cfg.pursuit_config();
    const auto frames = static_cast<long>(log_spectrogram.frames);
    std::vector<std::vector<PursuitAtom>> atoms(log_spectrogram.frames);
#pragma omp parallel for schedule(dynamic, 4) if (Parallel)
    for (long t = 0; t < frames; ++t)
        atoms[static_cast<std::size_t>(t)] =
            pursue(log_spectrogram.frame(static_cast<std::size_t>(t)), family, pcfg).atoms;
    return atoms;
}

}  // namespace

std::vector<std::vector<PursuitAtom>> identify_frames(const SpectrogramGrid& log_spectrogram,
                                                      const Dictionary& dict,
                                                      std::span<const std::size_t> kept,
                                                      const SeparationConfig& cfg)
{
    return identify_impl<true>(log_spectrogram, dict, kept, cfg);
}

std::vector<std::vector<PursuitAtom>> identify_frames_serial(const SpectrogramGrid& log_spectrogram,
                                                             const Dictionary& dict,
                                                             std::span<const std::size_t> kept,
                                                             const SeparationConfig& cfg)
{
    return identify_impl<false>(log_spectrogram, dict, kept, cfg);
}

SpectrogramGrid reconstruct_instrument(std::span<const std::vector<PursuitAtom>> atoms_per_frame,
                                       std::size_t eta, const Dictionary& dict,
                                       std::span<const std::size_t> kept, const LogAxisConfig& axis,
                                       std::size_t bins, double hz_per_bin, double frame_period_s)
{
    if (eta >= kept.size())
        throw DomainError("instrument index out of range");
    check_kept(dict, kept);
    SpectrogramGrid out(bins, atoms_per_frame.size(), LinearAxis{hz_per_bin}, frame_period_s);
    if (bins == 0)
        return out;
    const std::size_t col = kept[eta];
    const double nyquist = static_cast<double>(bins - 1);
    const auto frames = static_cast<long>(atoms_per_frame.size());

    for (long tl = 0; tl < frames; ++tl)
    {
        const auto t = static_cast<std::size_t>(tl);
        auto dst = out.frame(t);
        for (const PursuitAtom& atom : atoms_per_frame[t])
        {
            if (atom.pattern != eta || atom.amplitude <= 0.0)
                continue;
            const double sigma = atom.params.size() > 0 ? atom.params[0] : 1.0;
            const double b = atom.params.size() > 1 ? atom.params[1] : 0.0;
            const double f1 = axis.to_linear(atom.shift);
            const double reach = PatternFamily::kCutoff * sigma;
            const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
            for (std::size_t h = 1; h <= dict.n_har; ++h)
            {
                const double hh = static_cast<double>(h);
                const double f = std::sqrt(1.0 + b * hh * hh) * hh * f1;
                if (f >= nyquist)
                    break;
                const double amp = atom.amplitude * dict.at(h - 1, col);
                if (amp == 0.0)
                    continue;
                const auto lo = static_cast<long>(std::max(0.0, std::ceil(f - reach)));
                const auto hi = static_cast<long>(std::min(nyquist, std::floor(f + reach)));
                for (long s = lo; s <= hi; ++s)
                {
                    const double d = static_cast<double>(s) - f;
                    dst[static_cast<std::size_t>(s)] += amp * std::exp(-d * d * inv2s2);
                }
            }
        }
    }
    return out;
}

SpectrogramGrid apply_mask(const SpectrogramGrid& inst, const SpectrogramGrid& total,
                           const SpectrogramGrid& original, double epsilon)
{
    if (!inst.same_shape(total) || !inst.same_shape(original))
        throw DomainError("mask inputs differ in shape");
    SpectrogramGrid out = original;
    const auto n = static_cast<long>(out.values.size());
    for (long i = 0; i < n; ++i)
    {
        const auto k = static_cast<std::size_t>(i);
        const double z = total.values[k];
        out.values[k] = z > 0.0 ? inst.values[k] / (z + epsilon) * original.values[k] : 0.0;
    }
    return out;
}

AudioClip resynthesize(const SpectrogramGrid& magnitude, const PhaseGrid& phase, int gl_iters,
                       const StftConfig& stft_cfg, std::size_t n_samples)
{
    return griffin_lim(magnitude, phase, gl_iters, stft_cfg, n_samples).signal;
}

SeparationResult separate(const MixtureAnalysis& mixture, const Dictionary& dict,
                          std::span<const std::size_t> kept, const SeparationConfig& cfg,
                          const StftConfig& stft_cfg)
{
    const SpectrogramGrid& Z = mixture.stft.magnitude;
    const SpectrogramGrid& U = mixture.log.log_spectrogram;
    if (Z.frames != U.frames || Z.bins != stft_cfg.bin_count() ||
        mixture.stft.phase.bins != Z.bins || mixture.stft.phase.frames != Z.frames)
        throw DomainError("spectrogram dimensions do not match");
    if (frame_count(mixture.n_samples, stft_cfg) != Z.frames)
        throw DomainError("spectrogram frame count does not match the sample count");

    SeparationResult result;
    result.atoms_per_frame = identify_frames(U, dict, kept, cfg);

    // Models are computed in the normalized units of U.
    std::vector<SpectrogramGrid> normalized;
    SpectrogramGrid total(Z.bins, Z.frames, Z.axis, Z.frame_period_s);
    for (std::size_t eta = 0; eta < kept.size(); ++eta)
    {
        normalized.push_back(reconstruct_instrument(result.atoms_per_frame, eta, dict, kept, cfg.axis,
                                                    Z.bins, stft_cfg.hz_per_bin(), Z.frame_period_s));
        for (std::size_t i = 0; i < total.values.size(); ++i)
            total.values[i] += normalized.back().values[i];
    }

    for (std::size_t eta = 0; eta < kept.size(); ++eta)
    {
        result.masked_spectrograms.push_back(apply_mask(normalized[eta], total, Z, cfg.mask_epsilon));
        SpectrogramGrid inst = std::move(normalized[eta]);
        for (double& v : inst.values)
            v *= mixture.scale;
        result.inst_spectrograms.push_back(std::move(inst));
    }
    normalized.clear();

    for (std::size_t eta = 0; eta < kept.size(); ++eta)
    {
        const SpectrogramGrid& src = cfg.use_mask ? result.masked_spectrograms[eta]
                                                  : result.inst_spectrograms[eta];
        AudioClip clip = resynthesize(src, mixture.stft.phase, cfg.gl_iters, stft_cfg, mixture.n_samples);
        clip.sample_rate_hz = stft_cfg.sample_rate_hz;
        result.signals.push_back(std::move(clip));
    }
    return result;
}

}  // namespace sparsep
