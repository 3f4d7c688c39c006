#include "doctest.h"

#include "sparsep/error.hpp"
#include "sparsep/fixtures.hpp"
#include "sparsep/metrics.hpp"
#include "sparsep/separate.hpp"

#include <cmath>

using namespace sparsep;

namespace
{

Dictionary profiles(const std::vector<InstrumentSpec>& inst, std::size_t n_har = 25)
{
    Dictionary d(n_har, inst.size());
    for (std::size_t k = 0; k < inst.size(); ++k)
        for (std::size_t h = 0; h < inst[k].amplitudes.size() && h < n_har; ++h)
            d.at(h, k) = inst[k].amplitudes[h];
    return d;
}

PursuitAtom atom(std::size_t pattern, double a, double mu, double sigma, double b = 0.0)
{
    PursuitAtom at;
    at.pattern = pattern;
    at.amplitude = a;
    at.shift = mu;
    at.params = {sigma, b};
    return at;
}

}  // namespace

TEST_CASE("instrument spectrogram puts partials at h f(mu)")
{
    const LogAxisConfig axis;
    Dictionary d(4, 2);
    d.at(0, 1) = 1.0;
    d.at(1, 1) = 0.5;
    d.at(3, 1) = 0.25;
    const std::vector<std::size_t> kept{1};
    const double mu = axis.to_log(40.0);
    const std::vector<std::vector<PursuitAtom>> frames{{atom(0, 2.0, mu, 1.9)}, {}};
    const auto z = reconstruct_instrument(frames, 0, d, kept, axis, 6145);
    CHECK(z.frames == 2);
    CHECK(z.at(40, 0) == doctest::Approx(2.0));
    CHECK(z.at(80, 0) == doctest::Approx(1.0));
    CHECK(z.at(120, 0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(z.at(160, 0) == doctest::Approx(0.5));
    CHECK(z.at(41, 0) == doctest::Approx(2.0 * std::exp(-1.0 / (2.0 * 1.9 * 1.9))));
    for (double v : z.frame(1))
        CHECK(v == 0.0);
}

TEST_CASE("inharmonic partials and the Nyquist cut")
{
    const LogAxisConfig axis;
    Dictionary d(10, 1);
    for (std::size_t h = 0; h < 10; ++h)
        d.at(h, 0) = 1.0;
    const std::vector<std::size_t> kept{0};
    const double b = 1e-3;
    const std::vector<std::vector<PursuitAtom>> frames{{atom(0, 1.0, axis.to_log(30.0), 1.0, b)}};
    const auto z = reconstruct_instrument(frames, 0, d, kept, axis, 200);
    // partial 5 sits at sqrt(1 + 25 b) * 150
    const double f5 = std::sqrt(1.0 + 25.0 * b) * 150.0;
    const auto k5 = static_cast<std::size_t>(std::lround(f5));
    CHECK(z.at(k5, 0) == doctest::Approx(std::exp(-(k5 - f5) * (k5 - f5) / 2.0)));
    // partial 7 would be above bin 199
    double tail = 0.0;
    for (std::size_t k = 195; k < 200; ++k)
        tail += z.at(k, 0);
    CHECK(tail < 1e-12);
}

TEST_CASE("masks split the original spectrogram exactly")
{
    SpectrogramGrid a(50, 3), b(50, 3), z(50, 3);
    for (std::size_t i = 0; i < a.values.size(); ++i)
    {
        a.values[i] = (i % 7) * 0.1;
        b.values[i] = (i % 5) * 0.2;
        z.values[i] = 1.0 + (i % 3);
    }
    SpectrogramGrid total(50, 3);
    for (std::size_t i = 0; i < total.values.size(); ++i)
        total.values[i] = a.values[i] + b.values[i];
    const auto ma = apply_mask(a, total, z);
    const auto mb = apply_mask(b, total, z);
    for (std::size_t i = 0; i < z.values.size(); ++i)
    {
        if (total.values[i] > 0.0)
            CHECK(ma.values[i] + mb.values[i] == doctest::Approx(z.values[i]).epsilon(1e-9));
        else
            CHECK(ma.values[i] + mb.values[i] == 0.0);
    }
    CHECK_THROWS_AS(apply_mask(a, SpectrogramGrid(50, 2), z), DomainError);
}

TEST_CASE("parallel and serial identification agree")
{
    MelodySpec ms;
    ms.instruments = {recorder_like(), sawtooth_like()};
    ms.duration_s = 1.0;
    const auto fx = synth_melodies(ms);
    const auto d = profiles(ms.instruments);
    const std::vector<std::size_t> kept{0, 1};
    // a crude log spectrogram is enough to exercise identification
    const auto z = stft(fx.mix, StftConfig{}).magnitude;
    const LogAxisConfig axis;
    SpectrogramGrid u(axis.n_bins, z.frames, axis.axis(), z.frame_period_s);
    for (std::size_t t = 0; t < z.frames; ++t)
        for (std::size_t s = 0; s < u.bins; ++s)
        {
            const double f = axis.to_linear(static_cast<double>(s));
            if (f < static_cast<double>(z.bins - 1))
                u.at(s, t) = z.at(static_cast<std::size_t>(f), t);
        }
    const SeparationConfig cfg;
    const auto p = identify_frames(u, d, kept, cfg);
    const auto s = identify_frames_serial(u, d, kept, cfg);
    REQUIRE(p.size() == s.size());
    for (std::size_t t = 0; t < p.size(); ++t)
    {
        REQUIRE(p[t].size() == s[t].size());
        for (std::size_t j = 0; j < p[t].size(); ++j)
        {
            CHECK(p[t][j].amplitude == s[t][j].amplitude);
            CHECK(p[t][j].shift == s[t][j].shift);
        }
    }
}

TEST_CASE("separation configuration and inputs are checked")
{
    SeparationConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.gl_iters = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = SeparationConfig{};
    cfg.n_spr = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    const Dictionary d(5, 2);
    const SpectrogramGrid u(1024, 2, LogAxis{5.12, 102.4});
    const std::vector<std::size_t> bad{3};
    CHECK_THROWS_AS(identify_frames(u, d, bad, SeparationConfig{}), DomainError);
    const std::vector<std::size_t> none;
    CHECK_THROWS_AS(identify_frames(u, d, none, SeparationConfig{}), DomainError);
    const SpectrogramGrid short_u(100, 2, LogAxis{5.12, 102.4});
    const std::vector<std::size_t> ok{0};
    CHECK_THROWS_AS(identify_frames(short_u, d, ok, SeparationConfig{}), DomainError);
}

TEST_CASE("silence separates into silence")
{
    AudioClip silent;
    silent.samples.assign(24000, 0.0);
    const StftConfig sc;
    const auto mix = analyse_mixture(silent, sc, LogTransformConfig::for_stft(sc));
    CHECK(mix.scale == 1.0);
    const auto d = profiles({recorder_like(), sawtooth_like()});
    const std::vector<std::size_t> kept{0, 1};
    const auto r = separate(mix, d, kept, SeparationConfig{}, sc);
    REQUIRE(r.signals.size() == 2);
    for (const auto& s : r.signals)
    {
        CHECK(s.size() == 24000);
        for (double v : s.samples)
            CHECK(v == 0.0);
    }
}

TEST_CASE("the true instrument profiles separate a two-instrument mixture")
{
    MelodySpec ms;
    ms.instruments = {recorder_like(), sawtooth_like()};
    ms.duration_s = 2.0;
    ms.seed = 3;
    const auto fx = synth_melodies(ms);
    const StftConfig sc;
    const auto mix = analyse_mixture(fx.mix, sc, LogTransformConfig::for_stft(sc));
    const auto d = profiles(ms.instruments);
    const std::vector<std::size_t> kept{0, 1};

    SeparationConfig cfg;
    const auto r = separate(mix, d, kept, cfg, sc);
    const auto s = bss_eval(fx.references, r.signals);
    CHECK(s.permutation == std::vector<std::size_t>{0, 1});
    CHECK(s.sdr_db[0] > 10.0);
    CHECK(s.sdr_db[1] > 10.0);

    // each model spectrogram is the reconstruction of its own atoms
    Dictionary single(25, 1);
    for (std::size_t h = 0; h < 25; ++h)
        single.at(h, 0) = d.at(h, 0);
    const std::vector<std::size_t> first{0};
    std::vector<std::vector<PursuitAtom>> only_first(r.atoms_per_frame.size());
    for (std::size_t t = 0; t < only_first.size(); ++t)
        for (const auto& a : r.atoms_per_frame[t])
            if (a.pattern == 0)
                only_first[t].push_back(a);
    const auto z0 = reconstruct_instrument(only_first, 0, single, first, cfg.axis, sc.bin_count());
    for (std::size_t i = 0; i < z0.values.size(); i += 97)
        CHECK(z0.values[i] * mix.scale == doctest::Approx(r.inst_spectrograms[0].values[i]));

    // the masked spectrograms sum to the mixture wherever the model is active
    for (std::size_t i = 0; i < z0.values.size(); i += 31)
    {
        const double m = r.masked_spectrograms[0].values[i] + r.masked_spectrograms[1].values[i];
        const double total = r.inst_spectrograms[0].values[i] + r.inst_spectrograms[1].values[i];
        if (total > 1e-6 * mix.scale)
            CHECK(m == doctest::Approx(mix.stft.magnitude.values[i]).epsilon(1e-6));
    }
}
