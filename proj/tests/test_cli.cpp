#include "doctest.h"

#include "commands.hpp"
#include "run_config.hpp"

#include "sparsep/error.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace sparsep;
using namespace sparsep::cli;

TEST_CASE("config text parsing")
{
    const auto m = parse_config_text("# comment\n  n_trn = 1000 \n\nseed=3 # trailing\nuse_mask = false\n");
    CHECK(m.size() == 3);
    CHECK(m.at("n_trn") == "1000");
    CHECK(m.at("seed") == "3");
    CHECK(m.at("use_mask") == "false");
    CHECK_THROWS_AS(parse_config_text("n_trn 1000\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(" = 3\n"), ConfigError);
    CHECK_THROWS_AS(read_config_file("/nonexistent/run.cfg"), ConfigError);
}

TEST_CASE("flags override the file, which overrides the defaults")
{
    const RunConfig d = resolve_config({}, {});
    CHECK(d.train.n_trn == 2000);
    CHECK(d.train.n_ins == 2);
    CHECK(d.separation.use_mask);
    CHECK(d.separation.gl_iters == 1);

    const RunConfig f = resolve_config({{"n_trn", "1000"}, {"seed", "7"}, {"n_spr", "2"}}, {});
    CHECK(f.train.n_trn == 1000);
    CHECK(f.train.seed == 7);
    CHECK(f.train.n_spr == 2);
    CHECK(f.separation.n_spr == 2);

    const RunConfig b = resolve_config({{"n_trn", "1000"}, {"seed", "7"}}, {{"seed", "9"}});
    CHECK(b.train.n_trn == 1000);
    CHECK(b.train.seed == 9);
}

TEST_CASE("shared keys reach every module")
{
    const RunConfig c = resolve_config({{"q", "0.25"}, {"alpha0", "48"}, {"b_max", "0.001"}}, {});
    CHECK(c.train.pursuit.q == 0.25);
    CHECK(c.separation.pursuit.q == 0.25);
    CHECK(c.log.pursuit.q == 1.0);
    CHECK(c.log.axis.alpha0 == 48.0);
    CHECK(c.train.axis.alpha0 == 48.0);
    CHECK(c.separation.axis.alpha0 == 48.0);
    CHECK(c.separation.tone.b_max == 0.001);
    CHECK(c.train.tone.sigma_nil == doctest::Approx(c.stft.sigma_bins()));
}

TEST_CASE("configs are validated at load time")
{
    CHECK_THROWS_AS(resolve_config({{"colour", "blue"}}, {}), ConfigError);
    CHECK_THROWS_AS(resolve_config({{"n_trn", "-5"}}, {}), ConfigError);
    CHECK_THROWS_AS(resolve_config({{"n_trn", "12x"}}, {}), ConfigError);
    CHECK_THROWS_AS(resolve_config({{"n_trn", "250"}}, {}), ConfigError);
    CHECK_THROWS_AS(resolve_config({{"q", "1.5"}}, {}), ConfigError);
    CHECK_THROWS_AS(resolve_config({{"use_mask", "maybe"}}, {}), ConfigError);
    CHECK_THROWS_AS(resolve_config({}, {{"gl_iters", "0"}}), ConfigError);
    CHECK_THROWS_AS(resolve_config({{"zeta", "1000.05"}}, {}), ConfigError);
}

TEST_CASE("the config dump reads back to the same settings")
{
    const RunConfig a = resolve_config({{"seed", "12"}, {"lambda", "0.8"}, {"output_dir", "stems"}}, {});
    const RunConfig b = resolve_config(parse_config_text(a.to_text()), {});
    CHECK(b.to_text() == a.to_text());
    CHECK(b.output_dir == "stems");
}

TEST_CASE("evaluation pads short estimates without changing scores for trailing silence")
{
    const auto dir = fs::temp_directory_path() / "sparsep_test_cli_eval";
    fs::create_directories(dir);
    AudioClip r0, r1;
    for (int i = 0; i < 4800; ++i)
    {
        const double t = i / 48000.0;
        r0.samples.push_back(0.3 * std::sin(2.0 * std::numbers::pi * 440.0 * t));
        r1.samples.push_back(0.2 * std::sin(2.0 * std::numbers::pi * 1250.0 * t + 0.4));
    }
    for (int i = 0; i < 1200; ++i)
    {
        r0.samples.push_back(0.0);
        r1.samples.push_back(0.0);
    }
    AudioClip e0 = r0, e1 = r1;
    for (std::size_t i = 0; i < 4800; ++i)
    {
        e0.samples[i] += 0.05 * r1.samples[i] + 0.01 * std::cos(0.37 * static_cast<double>(i));
        e1.samples[i] -= 0.02 * r0.samples[i];
    }
    AudioClip s0 = e0, s1 = e1;
    s0.samples.resize(4800);
    s1.samples.resize(5000);
    write_wav(r0, dir / "r0.wav", WavEncoding::float32);
    write_wav(r1, dir / "r1.wav", WavEncoding::float32);
    write_wav(e0, dir / "e0.wav", WavEncoding::float32);
    write_wav(e1, dir / "e1.wav", WavEncoding::float32);
    write_wav(s0, dir / "s0.wav", WavEncoding::float32);
    write_wav(s1, dir / "s1.wav", WavEncoding::float32);

    std::ostringstream full_log, short_log;
    const auto full = cmd_eval({dir / "r0.wav", dir / "r1.wav"}, {dir / "e0.wav", dir / "e1.wav"}, full_log);
    const auto trimmed = cmd_eval({dir / "r0.wav", dir / "r1.wav"}, {dir / "s0.wav", dir / "s1.wav"}, short_log);
    CHECK(full_log.str().empty());
    CHECK(short_log.str().find("warning") != std::string::npos);
    for (std::size_t k = 0; k < 2; ++k)
    {
        CHECK(trimmed.sdr_db[k] == doctest::Approx(full.sdr_db[k]).epsilon(1e-9));
        CHECK(trimmed.sir_db[k] == doctest::Approx(full.sir_db[k]).epsilon(1e-9));
        CHECK(trimmed.sar_db[k] == doctest::Approx(full.sar_db[k]).epsilon(1e-9));
    }
    CHECK_THROWS_AS(cmd_eval({dir / "r0.wav"}, {dir / "e0.wav", dir / "e1.wav"}, short_log), DomainError);
    fs::remove_all(dir);
}

TEST_CASE("synthesized mixtures are the exact sum of their references")
{
    RunConfig cfg = resolve_config({{"seed", "5"}}, {});
    cfg.output_dir = fs::temp_directory_path() / "sparsep_test_cli_synth";
    SynthOptions opts;
    opts.duration_s = 1.0;
    opts.octave_overlap = true;
    std::ostringstream log;
    const auto files = cmd_synth(opts, cfg, log);
    REQUIRE(files.size() == 3);
    const auto mix = read_wav(files[0]);
    const auto a = read_wav(files[1]);
    const auto b = read_wav(files[2]);
    REQUIRE(mix.size() == 48000);
    for (std::size_t i = 0; i < mix.size(); ++i)
        REQUIRE(mix.samples[i] == a.samples[i] + b.samples[i]);
    fs::remove_all(cfg.output_dir);
}
