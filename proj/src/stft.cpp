#include "sparsep/stft.hpp"

#include "sparsep/error.hpp"
#include "sparsep/fft.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

namespace sparsep
{

std::size_t StftConfig::window_length() const
{
    return static_cast<std::size_t>(std::llround(2.0 * window_halfwidth * zeta_samples));
}

double StftConfig::hz_per_bin() const
{
    return static_cast<double>(sample_rate_hz) / static_cast<double>(fft_size());
}

double StftConfig::frame_period_s() const
{
    return static_cast<double>(hop_samples) / sample_rate_hz;
}

double StftConfig::sigma_bins() const
{
    return static_cast<double>(fft_size()) / (2.0 * std::numbers::pi * zeta_samples);
}

double StftConfig::peak_gain() const
{
    return std::sqrt(2.0 * std::numbers::pi) * zeta_samples;
}

void StftConfig::validate() const
{
    if (sample_rate_hz <= 0 || !(zeta_samples > 0.0) || hop_samples <= 0 ||
        !(window_halfwidth > 0.0))
        throw DomainError("STFT parameters must be positive");
    const std::size_t n = window_length();
    if (n < 2 || n % 2 != 0)
        throw DomainError("STFT window length must be even, got " + std::to_string(n));
    if (static_cast<std::size_t>(hop_samples) > n)
        throw DomainError("hop exceeds window length");
}

StftConfig StftConfig::for_rate(int sample_rate_hz)
{
    require_supported_rate(sample_rate_hz);
    StftConfig cfg;
    cfg.sample_rate_hz = sample_rate_hz;
    return cfg;
}

std::size_t frame_count(std::size_t n_samples, const StftConfig& cfg)
{
    const auto hop = static_cast<std::size_t>(cfg.hop_samples);
    return (n_samples + hop - 1) / hop;
}

namespace
{

std::vector<double> gaussian_window(const StftConfig& cfg)
{
    const std::size_t n = cfg.window_length();
    const double center = static_cast<double>(n / 2);
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        const double x = (static_cast<double>(i) - center) / cfg.zeta_samples;
        w[i] = std::exp(-0.5 * x * x);
    }
    return w;
}

struct Analyzer
{
    const StftConfig& cfg;
    const std::vector<double>& samples;
    std::vector<double> window = gaussian_window(cfg);
    RealFft fft{cfg.fft_size()};

    std::ptrdiff_t frame_start(std::size_t t) const
    {
        return static_cast<std::ptrdiff_t>(t) * cfg.hop_samples -
               static_cast<std::ptrdiff_t>(cfg.fft_size() / 2);
    }

    void frame(std::size_t t, std::vector<double>& buf, std::vector<std::complex<double>>& spec,
               StftResult& out) const
    {
        const std::size_t n = cfg.fft_size();
        const std::ptrdiff_t start = frame_start(t);
        const auto len = static_cast<std::ptrdiff_t>(samples.size());
        for (std::size_t i = 0; i < n; ++i)
        {
            const std::ptrdiff_t k = start + static_cast<std::ptrdiff_t>(i);
            buf[i] = (k >= 0 && k < len) ? samples[static_cast<std::size_t>(k)] * window[i] : 0.0;
        }
        fft.forward(buf, spec);
        auto mag = out.magnitude.frame(t);
        double* ph = out.phase.values.data() + t * out.phase.bins;
        for (std::size_t b = 0; b < spec.size(); ++b)
        {
            mag[b] = std::abs(spec[b]);
            ph[b] = std::arg(spec[b]);
        }
    }
};

StftResult make_result(const AudioClip& clip, const StftConfig& cfg)
{
    cfg.validate();
    if (clip.samples.size() < cfg.window_length())
        throw DomainError("clip of " + std::to_string(clip.samples.size()) +
                          " samples is shorter than the STFT window (" +
                          std::to_string(cfg.window_length()) + ")");
    const std::size_t frames = frame_count(clip.samples.size(), cfg);
    StftResult r;
    r.magnitude = SpectrogramGrid(cfg.bin_count(), frames, LinearAxis{cfg.hz_per_bin()},
                                  cfg.frame_period_s());
    r.phase = PhaseGrid(cfg.bin_count(), frames);
    return r;
}

void check_grid(const SpectrogramGrid& magnitude, const PhaseGrid& phase, const StftConfig& cfg)
{
    cfg.validate();
    if (magnitude.bins != cfg.bin_count())
        throw DomainError("spectrogram has " + std::to_string(magnitude.bins) +
                          " bins, STFT config expects " + std::to_string(cfg.bin_count()));
    if (phase.bins != magnitude.bins || phase.frames != magnitude.frames)
        throw DomainError("phase grid shape does not match magnitude grid");
}

// Overlap-adds every frame touching samples [lo, lo + acc.size()) into
// `acc`, in frame order.
void synthesize_range(const SpectrogramGrid& magnitude, const PhaseGrid& phase,
                      const StftConfig& cfg, const std::vector<double>& window,
                      const RealFft& fft, std::ptrdiff_t lo, std::vector<double>& acc)
{
    const std::size_t n = cfg.fft_size();
    const auto half = static_cast<std::ptrdiff_t>(n / 2);
    const auto hop = static_cast<std::ptrdiff_t>(cfg.hop_samples);
    const std::ptrdiff_t hi = lo + static_cast<std::ptrdiff_t>(acc.size());
    // frames t with t*hop - half < hi and t*hop - half + n > lo
    const std::ptrdiff_t t_first = std::max<std::ptrdiff_t>(0, (lo + half - static_cast<std::ptrdiff_t>(n)) / hop);
    const std::ptrdiff_t t_last =
        std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(magnitude.frames), (hi + half) / hop + 1);
    std::vector<std::complex<double>> spec(cfg.bin_count());
    std::vector<double> buf(n);
    const double scale = 1.0 / static_cast<double>(n);
    for (std::ptrdiff_t tt = t_first; tt < t_last; ++tt)
    {
        const auto t = static_cast<std::size_t>(tt);
        const std::ptrdiff_t start = tt * hop - half;
        if (start >= hi || start + static_cast<std::ptrdiff_t>(n) <= lo)
            continue;
        const auto mag = magnitude.frame(t);
        const double* ph = phase.values.data() + t * phase.bins;
        bool silent = true;
        for (std::size_t b = 0; b < spec.size(); ++b)
        {
            spec[b] = std::polar(mag[b], ph[b]);
            silent = silent && mag[b] == 0.0;
        }
        if (silent)
            continue;
        fft.inverse(spec, buf);
        const std::ptrdiff_t i0 = std::max(lo, start) - start;
        const std::ptrdiff_t i1 = std::min(hi, start + static_cast<std::ptrdiff_t>(n)) - start;
        for (std::ptrdiff_t i = i0; i < i1; ++i)
            acc[static_cast<std::size_t>(start + i - lo)] += buf[static_cast<std::size_t>(i)] * scale *
                                                            window[static_cast<std::size_t>(i)];
    }
}

std::vector<double> window_norm(const StftConfig& cfg, const std::vector<double>& window,
                                std::size_t frames, std::size_t n_samples)
{
    std::vector<double> norm(n_samples, 0.0);
    const std::size_t n = cfg.fft_size();
    const auto len = static_cast<std::ptrdiff_t>(n_samples);
    for (std::size_t t = 0; t < frames; ++t)
    {
        const std::ptrdiff_t start = static_cast<std::ptrdiff_t>(t) * cfg.hop_samples -
                                     static_cast<std::ptrdiff_t>(n / 2);
        for (std::size_t i = 0; i < n; ++i)
        {
            const std::ptrdiff_t k = start + static_cast<std::ptrdiff_t>(i);
            if (k >= 0 && k < len)
                norm[static_cast<std::size_t>(k)] += window[i] * window[i];
        }
    }
    return norm;
}

void normalize(std::vector<double>& acc, const std::vector<double>& norm)
{
    for (std::size_t i = 0; i < acc.size(); ++i)
        acc[i] = norm[i] > 0.0 ? acc[i] / norm[i] : 0.0;
}

}  // namespace

StftResult stft(const AudioClip& clip, const StftConfig& cfg)
{
    StftResult r = make_result(clip, cfg);
    const Analyzer an{cfg, clip.samples};
    const auto frames = static_cast<std::ptrdiff_t>(r.magnitude.frames);
#pragma omp parallel
    {
        std::vector<double> buf(cfg.fft_size());
        std::vector<std::complex<double>> spec(cfg.bin_count());
#pragma omp for schedule(static)
        for (std::ptrdiff_t t = 0; t < frames; ++t)
            an.frame(static_cast<std::size_t>(t), buf, spec, r);
    }
    return r;
}

StftResult stft_serial(const AudioClip& clip, const StftConfig& cfg)
{
    StftResult r = make_result(clip, cfg);
    const Analyzer an{cfg, clip.samples};
    std::vector<double> buf(cfg.fft_size());
    std::vector<std::complex<double>> spec(cfg.bin_count());
    for (std::size_t t = 0; t < r.magnitude.frames; ++t)
        an.frame(t, buf, spec, r);
    return r;
}

std::vector<double> istft(const SpectrogramGrid& magnitude, const PhaseGrid& phase,
                          const StftConfig& cfg, std::size_t n_samples)
{
    check_grid(magnitude, phase, cfg);
    const auto window = gaussian_window(cfg);
    const RealFft fft(cfg.fft_size());

    // Fixed output chunks; each sample sums its frames in the same order as
    // the serial version, whatever the thread count.
    constexpr std::size_t chunk = 1 << 16;
    const auto chunks = static_cast<std::ptrdiff_t>((n_samples + chunk - 1) / chunk);
    std::vector<double> acc(n_samples, 0.0);
#pragma omp parallel
    {
        std::vector<double> part;
#pragma omp for schedule(dynamic, 1)
        for (std::ptrdiff_t c = 0; c < chunks; ++c)
        {
            const std::size_t lo = static_cast<std::size_t>(c) * chunk;
            part.assign(std::min(chunk, n_samples - lo), 0.0);
            synthesize_range(magnitude, phase, cfg, window, fft, static_cast<std::ptrdiff_t>(lo), part);
            std::copy(part.begin(), part.end(), acc.begin() + static_cast<std::ptrdiff_t>(lo));
        }
    }
    normalize(acc, window_norm(cfg, window, magnitude.frames, n_samples));
    return acc;
}

std::vector<double> istft_serial(const SpectrogramGrid& magnitude, const PhaseGrid& phase,
                                 const StftConfig& cfg, std::size_t n_samples)
{
    check_grid(magnitude, phase, cfg);
    const auto window = gaussian_window(cfg);
    const RealFft fft(cfg.fft_size());
    std::vector<double> acc(n_samples, 0.0);
    synthesize_range(magnitude, phase, cfg, window, fft, 0, acc);
    normalize(acc, window_norm(cfg, window, magnitude.frames, n_samples));
    return acc;
}

GriffinLimResult griffin_lim(const SpectrogramGrid& target, const PhaseGrid& initial_phase,
                             int iterations, const StftConfig& cfg, std::size_t n_samples,
                             bool track_errors)
{
    if (iterations < 1)
        throw DomainError("Griffin-Lim needs at least one iteration");
    check_grid(target, initial_phase, cfg);
    if (frame_count(n_samples, cfg) != target.frames)
        throw DomainError("signal length " + std::to_string(n_samples) + " does not match " +
                          std::to_string(target.frames) + " frames");

    GriffinLimResult result;
    result.signal.sample_rate_hz = cfg.sample_rate_hz;
    PhaseGrid phase = initial_phase;
    for (int k = 0; k < iterations; ++k)
    {
        result.signal.samples = istft(target, phase, cfg, n_samples);
        const bool last = k + 1 == iterations;
        if (last && !track_errors)
            break;
        StftResult analysed = stft(result.signal, cfg);
        if (track_errors)
        {
            double err = 0.0;
            for (std::size_t i = 0; i < target.values.size(); ++i)
            {
                const double d = analysed.magnitude.values[i] - target.values[i];
                err += d * d;
            }
            result.errors.push_back(std::sqrt(err));
        }
        phase = std::move(analysed.phase);
    }
    return result;
}

}  // namespace sparsep
