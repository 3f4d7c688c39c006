#include "sparsep/logspec.hpp"

#include "sparsep/error.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

namespace sparsep
{

double LogAxisConfig::to_log(double linear_bin) const
{
    return alpha0 * std::log2(linear_bin / f0);
}

double LogAxisConfig::to_linear(double log_bin) const
{
    return f0 * std::exp2(log_bin / alpha0);
}

void LogAxisConfig::validate() const
{
    if (!(f0 > 0.0) || !(alpha0 > 0.0) || n_bins == 0)
        throw ConfigError("log axis parameters must be positive");
}

PursuitConfig LogTransformConfig::default_pursuit()
{
    PursuitConfig p;
    p.q = 1.0;
    p.lambda = 1.0;
    p.n_pre = 1000;
    p.n_spr = 1000;
    p.n_itr = 20;
    p.selector = Selector::peaks;
    p.n_dom = 3;
    // Onset frames carry hundreds of nearly collinear atoms; refinements
    // there are cut off early and the greedy loop fills in what remains.
    p.optimizer.max_evals = 200;
    p.optimizer.pg_tolerance = 1e-5;
    p.optimizer.f_tolerance = 2.2e-9;
    return p;
}

LogTransformConfig LogTransformConfig::for_stft(const StftConfig& stft)
{
    LogTransformConfig cfg;
    cfg.sigma_nil = stft.sigma_bins();
    return cfg;
}

std::vector<PursuitAtom> log_frame_peaks(std::span<const double> frame, const LogTransformConfig& cfg,
                                         double min_height)
{
    const GaussianFamily family(cfg.sigma_nil);
    PursuitConfig p = cfg.pursuit;
    p.min_height = std::max(p.min_height, min_height);
    return pursue(frame, family, p).atoms;
}

void draw_log_frame(std::span<const PursuitAtom> peaks, const LogAxisConfig& axis,
                    std::span<double> out)
{
    const double m = static_cast<double>(out.size());
    for (const auto& pk : peaks)
    {
        if (!(pk.shift > 0.0))
            continue;
        const double center = axis.to_log(pk.shift);
        if (!(center >= 0.0 && center < m))
            continue;
        const double sigma = pk.params.at(0);
        const double radius = PatternFamily::kCutoff * sigma;
        const double lo = std::max(0.0, std::ceil(center - radius));
        const double hi = std::min(m - 1.0, std::floor(center + radius));
        const double inv2 = 1.0 / (2.0 * sigma * sigma);
        for (double s = lo; s <= hi; s += 1.0)
            out[static_cast<std::size_t>(s)] += pk.amplitude * std::exp(-(s - center) * (s - center) * inv2);
    }
}

namespace
{

LogTransformResult prepare(const SpectrogramGrid& linear, const LogTransformConfig& cfg, double& min_height)
{
    cfg.axis.validate();
    cfg.pursuit.validate();
    if (!std::holds_alternative<LinearAxis>(linear.axis))
        throw DomainError("log transform expects a linear-frequency spectrogram");
    LogTransformResult r;
    r.log_spectrogram = SpectrogramGrid(cfg.axis.n_bins, linear.frames, cfg.axis.axis(), linear.frame_period_s);
    r.peaks.resize(linear.frames);
    min_height = cfg.relative_floor * linear.max_value();
    return r;
}

void transform_frame(const SpectrogramGrid& linear, const LogTransformConfig& cfg, double min_height,
                     std::size_t t, LogTransformResult& r)
{
    r.peaks[t] = log_frame_peaks(linear.frame(t), cfg, min_height);
    draw_log_frame(r.peaks[t], cfg.axis, r.log_spectrogram.frame(t));
}

}  // namespace

LogTransformResult to_log_spectrogram(const SpectrogramGrid& linear, const LogTransformConfig& cfg)
{
    double min_height = 0.0;
    LogTransformResult r = prepare(linear, cfg, min_height);
    const auto frames = static_cast<std::ptrdiff_t>(linear.frames);
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t t = 0; t < frames; ++t)
        transform_frame(linear, cfg, min_height, static_cast<std::size_t>(t), r);
    return r;
}

LogTransformResult to_log_spectrogram_serial(const SpectrogramGrid& linear, const LogTransformConfig& cfg)
{
    double min_height = 0.0;
    LogTransformResult r = prepare(linear, cfg, min_height);
    for (std::size_t t = 0; t < linear.frames; ++t)
        transform_frame(linear, cfg, min_height, t, r);
    return r;
}

namespace
{

constexpr std::array<char, 4> kMagic{'S', 'P', 'L', 'S'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::string& out, T v)
{
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(b, b + sizeof(T));
    out.append(reinterpret_cast<const char*>(b), sizeof(T));
}

template <typename T>
T get(const std::string& in, std::size_t& pos)
{
    if (pos + sizeof(T) > in.size())
        throw FormatError("log cache truncated");
    unsigned char b[sizeof(T)];
    std::memcpy(b, in.data() + pos, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(b, b + sizeof(T));
    pos += sizeof(T);
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
}

}  // namespace

void write_log_cache(const SpectrogramGrid& grid, const std::filesystem::path& path)
{
    const auto* ax = std::get_if<LogAxis>(&grid.axis);
    if (ax == nullptr)
        throw DomainError("only log-frequency spectrograms can be cached");
    std::string out;
    out.reserve(40 + 4 * grid.values.size());
    out.append(kMagic.data(), kMagic.size());
    put<std::uint32_t>(out, kVersion);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(grid.bins));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(grid.frames));
    put<double>(out, ax->f0);
    put<double>(out, ax->alpha0);
    put<double>(out, grid.frame_period_s);
    for (std::size_t b = 0; b < grid.bins; ++b)
        for (std::size_t t = 0; t < grid.frames; ++t)
            put<float>(out, static_cast<float>(grid.at(b, t)));

    auto tmp = path;
    tmp += ".partial";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f)
            throw IoError("cannot write " + tmp.string());
        f.write(out.data(), static_cast<std::streamsize>(out.size()));
        if (!f)
        {
            std::filesystem::remove(tmp);
            throw IoError("write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

SpectrogramGrid read_log_cache(const std::filesystem::path& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot open " + path.string());
    const std::string in((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (in.size() < 4 || std::memcmp(in.data(), kMagic.data(), 4) != 0)
        throw FormatError(path.string() + ": not a log-spectrogram cache");
    std::size_t pos = 4;
    const auto version = get<std::uint32_t>(in, pos);
    if (version != kVersion)
        throw FormatError(path.string() + ": unsupported cache version " + std::to_string(version));
    const auto bins = get<std::uint32_t>(in, pos);
    const auto frames = get<std::uint32_t>(in, pos);
    LogAxis axis;
    axis.f0 = get<double>(in, pos);
    axis.alpha0 = get<double>(in, pos);
    const double period = get<double>(in, pos);
    if (in.size() - pos != 4ull * bins * frames)
        throw FormatError(path.string() + ": payload size does not match header");
    SpectrogramGrid grid(bins, frames, axis, period);
    for (std::size_t b = 0; b < bins; ++b)
        for (std::size_t t = 0; t < frames; ++t)
        {
            const float v = get<float>(in, pos);
            if (!std::isfinite(v) || v < 0.0f)
                throw FormatError(path.string() + ": invalid magnitude in cache");
            grid.at(b, t) = v;
        }
    return grid;
}

}  // namespace sparsep
