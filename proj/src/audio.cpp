#include "sparsep/audio.hpp"

#include "sparsep/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>

namespace sparsep
{
namespace
{

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t le16(const unsigned char* p)
{
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t le32(const unsigned char* p)
{
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put16(std::string& out, std::uint16_t v)
{
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>(v >> 8));
}

void put32(std::string& out, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

struct WavFormat
{
    std::uint16_t tag = 0;
    std::uint16_t channels = 0;
    std::uint32_t rate = 0;
    std::uint16_t bits = 0;
};

}  // namespace

bool is_supported_rate(int sample_rate_hz) noexcept
{
    return sample_rate_hz == 44100 || sample_rate_hz == 48000;
}

void require_supported_rate(int sample_rate_hz)
{
    if (!is_supported_rate(sample_rate_hz))
        throw DomainError("unsupported sample rate " + std::to_string(sample_rate_hz) +
                          " Hz (expected 44100 or 48000)");
}

AudioClip read_wav(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());

    const std::string name = path.string();
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw FormatError(name + ": not a RIFF/WAVE file");

    WavFormat fmt;
    bool have_fmt = false;
    const unsigned char* data = nullptr;
    std::size_t data_size = 0;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size())
    {
        const unsigned char* chunk = bytes.data() + pos;
        const std::size_t size = le32(chunk + 4);
        const std::size_t body = pos + 8;
        const std::size_t available = std::min(size, bytes.size() - body);
        if (std::memcmp(chunk, "fmt ", 4) == 0)
        {
            if (available < 16)
                throw FormatError(name + ": truncated fmt chunk");
            const unsigned char* f = bytes.data() + body;
            fmt.tag = le16(f);
            fmt.channels = le16(f + 2);
            fmt.rate = le32(f + 4);
            fmt.bits = le16(f + 14);
            if (fmt.tag == kFormatExtensible)
            {
                if (available < 26)
                    throw FormatError(name + ": truncated extensible fmt chunk");
                fmt.tag = le16(f + 24);
            }
            have_fmt = true;
        }
        else if (std::memcmp(chunk, "data", 4) == 0)
        {
            data = bytes.data() + body;
            data_size = available;
        }
        pos = body + size + (size & 1);
    }

    if (!have_fmt)
        throw FormatError(name + ": missing fmt chunk");
    if (data == nullptr)
        throw FormatError(name + ": missing data chunk");
    if (fmt.channels == 0 || fmt.rate == 0)
        throw FormatError(name + ": invalid channel count or sample rate");

    const bool pcm16 = fmt.tag == kFormatPcm && fmt.bits == 16;
    const bool float32 = fmt.tag == kFormatFloat && fmt.bits == 32;
    if (!pcm16 && !float32)
        throw FormatError(name + ": unsupported codec (format " + std::to_string(fmt.tag) +
                          ", " + std::to_string(fmt.bits) + " bits)");

    const std::size_t width = fmt.bits / 8;
    const std::size_t frame_bytes = width * fmt.channels;
    const std::size_t frames = data_size / frame_bytes;

    AudioClip clip;
    clip.sample_rate_hz = static_cast<int>(fmt.rate);
    clip.samples.resize(frames);
    for (std::size_t i = 0; i < frames; ++i)
    {
        double acc = 0.0;
        for (std::size_t c = 0; c < fmt.channels; ++c)
        {
            const unsigned char* p = data + i * frame_bytes + c * width;
            if (pcm16)
            {
                acc += static_cast<std::int16_t>(le16(p)) / 32768.0;
            }
            else
            {
                const std::uint32_t bits = le32(p);
                float v;
                std::memcpy(&v, &bits, sizeof v);
                acc += v;
            }
        }
        const double value = acc / fmt.channels;
        if (!std::isfinite(value))
            throw FormatError(name + ": non-finite sample at index " + std::to_string(i));
        clip.samples[i] = value;
    }
    return clip;
}

std::size_t write_wav(const AudioClip& clip, const std::filesystem::path& path,
                      WavEncoding encoding)
{
    if (clip.sample_rate_hz <= 0)
        throw DomainError("sample rate must be positive");

    const bool pcm16 = encoding == WavEncoding::pcm16;
    const std::uint16_t bits = pcm16 ? 16 : 32;
    const std::uint32_t width = bits / 8;
    const auto data_size = static_cast<std::uint32_t>(clip.samples.size() * width);

    std::string out;
    out.reserve(44 + data_size);
    out.append("RIFF");
    put32(out, 36 + data_size);
    out.append("WAVE");
    out.append("fmt ");
    put32(out, 16);
    put16(out, pcm16 ? kFormatPcm : kFormatFloat);
    put16(out, 1);
    put32(out, static_cast<std::uint32_t>(clip.sample_rate_hz));
    put32(out, static_cast<std::uint32_t>(clip.sample_rate_hz) * width);
    put16(out, static_cast<std::uint16_t>(width));
    put16(out, bits);
    out.append("data");
    put32(out, data_size);

    std::size_t clipped = 0;
    for (double s : clip.samples)
    {
        if (!std::isfinite(s))
            throw DomainError("cannot write non-finite sample");
        double v = s;
        if (v > 1.0 || v < -1.0)
        {
            ++clipped;
            v = std::clamp(v, -1.0, 1.0);
        }
        if (pcm16)
        {
            const long q = std::lround(v * 32768.0);
            put16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(std::clamp(q, -32768L, 32767L))));
        }
        else
        {
            const float f = static_cast<float>(v);
            std::uint32_t u;
            std::memcpy(&u, &f, sizeof u);
            put32(out, u);
        }
    }

    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file)
        throw IoError("cannot write " + path.string());
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!file)
        throw IoError("write failed for " + path.string());

    if (clipped > 0)
        std::cerr << "warning: " << clipped << " sample(s) clamped to [-1, 1] in "
                  << path.string() << '\n';
    return clipped;
}

double partial_frequency(double f1, int h, double inharmonicity) noexcept
{
    const double hh = static_cast<double>(h);
    return std::sqrt(1.0 + inharmonicity * hh * hh) * hh * f1;
}

AudioClip synth_harmonic_tone(double f1_hz, std::span<const double> amplitudes,
                              double inharmonicity, double duration_s, int sample_rate_hz,
                              std::span<const double> phases)
{
    if (!(f1_hz > 0.0))
        throw DomainError("fundamental frequency must be positive");
    if (!(duration_s > 0.0) || sample_rate_hz <= 0)
        throw DomainError("duration and sample rate must be positive");
    if (inharmonicity < 0.0)
        throw DomainError("inharmonicity must be non-negative");

    const double fs = sample_rate_hz;
    const auto n = static_cast<std::size_t>(std::llround(duration_s * fs));
    AudioClip clip;
    clip.sample_rate_hz = sample_rate_hz;
    clip.samples.assign(n, 0.0);

    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t h = 1; h <= amplitudes.size(); ++h)
    {
        const double f = partial_frequency(f1_hz, static_cast<int>(h), inharmonicity);
        const double amp = amplitudes[h - 1];
        if (f >= fs / 2.0 || amp == 0.0)
            continue;
        const double phase = h - 1 < phases.size() ? phases[h - 1] : 0.0;
        const double w = two_pi * f / fs;
        for (std::size_t i = 0; i < n; ++i)
            clip.samples[i] += amp * std::sin(w * static_cast<double>(i) + phase);
    }

    const auto fade = std::min<std::size_t>(static_cast<std::size_t>(std::llround(0.010 * fs)), n / 2);
    for (std::size_t i = 0; i < fade; ++i)
    {
        const double g = 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(i) / fade);
        clip.samples[i] *= g;
        clip.samples[n - 1 - i] *= g;
    }

    double peak = 0.0;
    for (double s : clip.samples)
        peak = std::max(peak, std::abs(s));
    if (peak > 0.0)
        for (double& s : clip.samples)
            s *= 0.5 / peak;
    return clip;
}

}  // namespace sparsep
