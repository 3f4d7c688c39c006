#include "commands.hpp"

#include "sparsep/dictionary.hpp"
#include "sparsep/error.hpp"
#include "sparsep/fixtures.hpp"
#include "sparsep/grid.hpp"
#include "sparsep/logspec.hpp"
#include "sparsep/separate.hpp"
#include "sparsep/train.hpp"

#include <cmath>
#include <iomanip>

namespace sparsep::cli
{

namespace
{

void ensure_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

double rms(const AudioClip& c)
{
    if (c.samples.empty())
        return 0.0;
    double s = 0.0;
    for (double v : c.samples)
        s += v * v;
    return std::sqrt(s / static_cast<double>(c.samples.size()));
}

MixtureAnalysis analyse_with_cache(const AudioClip& clip, const StftConfig& sc, const fs::path& cache)
{
    MixtureAnalysis m;
    m.n_samples = clip.size();
    m.stft = stft(clip, sc);
    const double peak = m.stft.magnitude.max_value();
    m.scale = peak > 0.0 ? peak : 1.0;
    m.log.log_spectrogram = read_log_cache(cache);
    if (m.log.log_spectrogram.frames != m.stft.magnitude.frames)
        throw DomainError(cache.string() + " has " + std::to_string(m.log.log_spectrogram.frames) +
                          " frames, the input has " + std::to_string(m.stft.magnitude.frames));
    return m;
}

}  // namespace

void cmd_transform(const fs::path& input, const fs::path& cache, const std::optional<fs::path>& pgm,
                   const RunConfig& cfg, std::ostream& log)
{
    const AudioClip clip = read_wav(input);
    const StftConfig sc = cfg.stft_config(clip.sample_rate_hz);
    const MixtureAnalysis m = analyse_mixture(clip, sc, cfg.log_config(clip.sample_rate_hz));
    const auto& grid = m.log.log_spectrogram;
    write_log_cache(grid, cache);
    if (pgm)
        write_pgm(grid, *pgm);
    const auto& ax = cfg.log.axis;
    const double lo = ax.f0 * sc.hz_per_bin();
    const double hi = ax.to_linear(static_cast<double>(ax.n_bins)) * sc.hz_per_bin();
    log << "bins=" << grid.bins << " frames=" << grid.frames << std::fixed << std::setprecision(3)
        << " low_hz=" << lo << " high_hz=" << hi << " frame_period_s=" << std::setprecision(6)
        << grid.frame_period_s << "\n";
}

void cmd_train(const fs::path& cache, const fs::path& dictionary, const RunConfig& cfg, std::ostream& log)
{
    const SpectrogramGrid grid = read_log_cache(cache);
    const auto* ax = std::get_if<LogAxis>(&grid.axis);
    if (ax == nullptr)
        throw FormatError(cache.string() + " is not a log spectrogram");
    TrainConfig tc = cfg.train;
    // the cache decides the axis it was computed on
    tc.axis.f0 = ax->f0;
    tc.axis.alpha0 = ax->alpha0;
    tc.axis.n_bins = grid.bins;
    const TrainResult r = train(grid, tc);
    write_dictionary(r.dictionary, r.kept, dictionary);
    log << "updates=" << r.updates << " kept=";
    for (std::size_t i = 0; i < r.kept.size(); ++i)
        log << (i ? "," : "") << r.kept[i];
    log << "\n";
}

std::vector<fs::path> cmd_separate(const fs::path& input, const fs::path& dictionary,
                                   const SeparateOptions& opts, const RunConfig& cfg, std::ostream& log)
{
    const DictionaryFile df = read_dictionary(dictionary);
    if (df.kept.empty())
        throw DomainError(dictionary.string() + " keeps no instrument");
    const AudioClip clip = read_wav(input);
    const StftConfig sc = cfg.stft_config(clip.sample_rate_hz);
    const MixtureAnalysis mix = opts.cache ? analyse_with_cache(clip, sc, *opts.cache)
                                           : analyse_mixture(clip, sc, cfg.log_config(clip.sample_rate_hz));
    SeparationConfig sep = cfg.separation;
    if (const auto* ax = std::get_if<LogAxis>(&mix.log.log_spectrogram.axis))
    {
        sep.axis.f0 = ax->f0;
        sep.axis.alpha0 = ax->alpha0;
    }
    sep.axis.n_bins = mix.log.log_spectrogram.bins;
    const SeparationResult r = separate(mix, df.dictionary, df.kept, sep, sc);

    ensure_dir(cfg.output_dir);
    const std::string stem = opts.stem.empty() ? input.stem().string() : opts.stem;
    std::vector<fs::path> out;
    for (std::size_t k = 0; k < r.signals.size(); ++k)
    {
        const fs::path p = cfg.output_dir / (stem + ".inst" + std::to_string(k) + ".wav");
        AudioClip c = r.signals[k];
        c.sample_rate_hz = clip.sample_rate_hz;
        write_wav(c, p, WavEncoding::float32);
        if (opts.pgm)
        {
            const auto& g = sep.use_mask ? r.masked_spectrograms[k] : r.inst_spectrograms[k];
            write_pgm(g, cfg.output_dir / (stem + ".inst" + std::to_string(k) + ".pgm"));
        }
        log << "instrument=" << k << " column=" << df.kept[k] << " file=" << p.string()
            << std::setprecision(6) << " rms=" << rms(c) << "\n";
        out.push_back(p);
    }
    if (!opts.references.empty())
        log << format_report(cmd_eval(opts.references, out, log));
    return out;
}

BssScores cmd_eval(const std::vector<fs::path>& references, const std::vector<fs::path>& estimates,
                   std::ostream& log)
{
    if (references.size() != estimates.size())
        throw DomainError("got " + std::to_string(references.size()) + " references and " +
                          std::to_string(estimates.size()) + " estimates");
    std::vector<AudioClip> refs, ests;
    for (const auto& p : references)
        refs.push_back(read_wav(p));
    for (const auto& p : estimates)
        ests.push_back(read_wav(p));
    for (std::size_t i = 0; i < ests.size(); ++i)
        if (ests[i].size() != refs[0].size())
            log << "warning: " << estimates[i].string() << " has " << ests[i].size()
                << " samples, references have " << refs[0].size() << "; padding or truncating\n";
    for (std::size_t i = 1; i < refs.size(); ++i)
        if (refs[i].size() != refs[0].size())
            throw DomainError("references differ in length");
    return bss_eval(refs, ests);
}

std::vector<fs::path> cmd_synth(const SynthOptions& opts, const RunConfig& cfg, std::ostream& log)
{
    if (!(opts.duration_s > 0.0))
        throw ConfigError("duration must be positive");
    require_supported_rate(opts.sample_rate_hz);
    MelodySpec ms;
    ms.instruments = {recorder_like(), sawtooth_like()};
    ms.duration_s = opts.duration_s;
    ms.sample_rate_hz = opts.sample_rate_hz;
    ms.seed = cfg.train.seed;
    ms.octave_overlap = opts.octave_overlap;
    const Fixture fx = synth_melodies(ms);

    ensure_dir(cfg.output_dir);
    std::vector<fs::path> out{cfg.output_dir / (opts.stem + ".mix.wav")};
    write_wav(fx.mix, out[0]);
    for (std::size_t k = 0; k < fx.references.size(); ++k)
    {
        out.push_back(cfg.output_dir / (opts.stem + ".ref" + std::to_string(k) + ".wav"));
        write_wav(fx.references[k], out.back());
    }
    for (const auto& p : out)
        log << "wrote " << p.string() << "\n";
    return out;
}

}  // namespace sparsep::cli
