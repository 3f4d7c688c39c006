// Acceptance criteria 1-9. Prints one PASS/FAIL line per criterion with its
// runtime; pass criterion numbers as arguments to run a subset.

#include "commands.hpp"
#include "oracles.hpp"

#include "sparsep/audio.hpp"
#include "sparsep/dictionary.hpp"
#include "sparsep/fixtures.hpp"
#include "sparsep/logspec.hpp"
#include "sparsep/metrics.hpp"
#include "sparsep/optim.hpp"
#include "sparsep/pattern.hpp"
#include "sparsep/pursuit.hpp"
#include "sparsep/separate.hpp"
#include "sparsep/stft.hpp"
#include "sparsep/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace sparsep;

namespace
{

struct Outcome
{
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double relative_l2(const std::vector<double>& a, const std::vector<double>& b, std::size_t lo, std::size_t hi)
{
    double num = 0.0, den = 0.0;
    for (std::size_t i = lo; i < hi; ++i)
    {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return std::sqrt(num / den);
}

// Peak-normalized STFT magnitude restricted to its central frames.
SpectrogramGrid central_frames(const AudioClip& c, std::size_t keep)
{
    const auto z = stft(c, StftConfig{}).magnitude;
    const double m = z.max_value();
    const std::size_t first = (z.frames - keep) / 2;
    SpectrogramGrid out(z.bins, keep, z.axis, z.frame_period_s);
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = z.values[first * z.bins + i] / m;
    return out;
}

// Sub-bin center of the largest sample via a log-parabola fit.
double peak_center(std::span<const double> col)
{
    std::size_t k = 1;
    for (std::size_t i = 1; i + 1 < col.size(); ++i)
        if (col[i] > col[k])
            k = i;
    const double l0 = std::log(col[k - 1]);
    const double l1 = std::log(col[k]);
    const double l2 = std::log(col[k + 1]);
    return static_cast<double>(k) + 0.5 * (l0 - l2) / (l0 - 2.0 * l1 + l2);
}

Outcome pursuit_exactness()
{
    const TemplateFamily fam({{{0.0, 1.0}, {20.0, 0.5}, {35.0, 0.3}}, {{0.0, 1.0}, {12.0, 0.8}}}, 2.0, 0.5, 8.0);
    const std::vector<PursuitAtom> truth{{1.5, 30.3, 0, {2.0}}, {0.8, 87.6, 1, {2.0}}};
    const auto y = render(truth, fam, 200);
    PursuitConfig cfg;
    cfg.n_spr = 1;
    const auto r = pursue(y, fam, cfg);
    double worst = 0.0;
    bool found = r.atoms.size() == truth.size();
    for (const auto& t : truth)
    {
        const auto it = std::find_if(r.atoms.begin(), r.atoms.end(),
                                     [&](const PursuitAtom& a) { return a.pattern == t.pattern; });
        if (it == r.atoms.end())
        {
            found = false;
            continue;
        }
        worst = std::max({worst, std::abs(it->amplitude - t.amplitude), std::abs(it->shift - t.shift)});
    }
    return {found && worst < 1e-4 && r.loss < 1e-8,
            "atoms " + std::to_string(r.atoms.size()) + ", max error " + fmt("%.2e", worst) + ", loss " +
                fmt("%.2e", r.loss)};
}

Outcome gradient_correctness()
{
    std::mt19937_64 rng(2024);
    double worst = 0.0;
    std::size_t compared = 0;
    for (int i = 0; i < 50; ++i)
    {
        const auto c = oracle::random_gradient_case(rng);
        const auto g = oracle::check_gradients(c);
        worst = std::max(worst, g.worst_relative);
        compared += g.compared;
    }
    return {worst < 1e-5, std::to_string(compared) + " components, worst relative error " + fmt("%.2e", worst)};
}

Outcome log_axis_covariance()
{
    double worst = 0.0;
    for (double f : {110.0, 220.0, 330.0, 1000.0})
    {
        double centers[2];
        for (int k = 0; k < 2; ++k)
        {
            const double hz = f * (k + 1);
            AudioClip c;
            for (int i = 0; i < 24000; ++i)
                c.samples.push_back(0.3 * std::sin(2.0 * std::numbers::pi * hz * i / 48000.0));
            const auto r = to_log_spectrogram(central_frames(c, 3), LogTransformConfig{});
            centers[k] = peak_center(r.log_spectrogram.frame(1));
        }
        worst = std::max(worst, std::abs(centers[1] - centers[0] - 102.4));
    }
    return {worst < 0.2, "octave distance error up to " + fmt("%.1e", worst) + " bin"};
}

Outcome inharmonicity()
{
    const double b = 3.25e-4;
    const std::vector<double> amps{1.0, 0.8, 0.6, 0.5, 0.45, 0.4, 0.35, 0.3, 0.25, 0.2, 0.15, 0.12};
    // generic 1/h profile rather than the true amplitudes
    Dictionary d(amps.size(), 1);
    for (std::size_t h = 0; h < amps.size(); ++h)
        d.at(h, 0) = 1.0 / static_cast<double>(h + 1);
    const StftConfig sc;
    const LogAxisConfig ax;
    ToneBox box;
    box.sigma_nil = sc.sigma_bins();
    const HarmonicFamily fam(d, ax, box);
    PursuitConfig pc;
    pc.n_spr = 1;

    double worst_b = 0.0, worst_bin = 0.0;
    bool ok = true;
    for (double f1 : {110.0, 220.0, 440.0})
    {
        const auto clip = synth_harmonic_tone(f1, amps, b, 0.5, 48000);
        const auto r = to_log_spectrogram(central_frames(clip, 1), LogTransformConfig::for_stft(sc));
        const auto fit = pursue(r.log_spectrogram.frame(0), fam, pc);
        if (fit.atoms.size() != 1)
        {
            ok = false;
            continue;
        }
        const auto& a = fit.atoms[0];
        worst_b = std::max(worst_b, std::abs(a.params[1] - b) / b);
        const double f_lin = ax.to_linear(a.shift);
        for (int h = 1; h <= 10; ++h)
        {
            const double predicted = std::sqrt(1.0 + a.params[1] * h * h) * h * f_lin;
            const double actual = partial_frequency(f1, h, b) / sc.hz_per_bin();
            worst_bin = std::max(worst_bin, std::abs(predicted - actual));
        }
    }
    return {ok && worst_b <= 0.2 && worst_bin < 1.0,
            "b relative error " + fmt("%.2e", worst_b) + ", partial error up to " + fmt("%.2e", worst_bin) +
                " bin"};
}

Outcome modified_adam()
{
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0.0, 0.01);
    double worst_textbook = 0.0, worst_entry = 0.0, worst_scripted = 0.0, worst_ratio = 0.0;

    // one harmonic: the column mean is the entry itself
    for (double eps : {0.0, 1e-8})
    {
        const std::size_t cols = 6;
        AdamState st(1, cols);
        st.epsilon = eps;
        std::vector<double> d(cols, 0.5), ref = d, m(cols, 0.0), v(cols, 0.0);
        std::vector<std::size_t> all(cols);
        for (std::size_t i = 0; i < cols; ++i)
            all[i] = i;
        for (int t = 1; t <= 300; ++t)
        {
            std::vector<double> g(cols);
            for (double& x : g)
                x = n(rng);
            adam_step(d, st, g, all);
            for (std::size_t i = 0; i < cols; ++i)
            {
                m[i] = 0.9 * m[i] + 0.1 * g[i];
                v[i] = 0.999 * v[i] + 0.001 * g[i] * g[i];
                const double mh = m[i] / (1.0 - std::pow(0.9, t));
                const double vh = v[i] / (1.0 - std::pow(0.999, t));
                // textbook Adam adds eps outside the root; both agree at eps = 0
                const double step = eps == 0.0 ? mh / (std::sqrt(vh) + eps) : mh / std::sqrt(vh + eps);
                ref[i] = std::clamp(ref[i] - 1e-3 * step, 0.0, 1.0);
            }
        }
        double& worst = eps == 0.0 ? worst_textbook : worst_entry;
        for (std::size_t i = 0; i < cols; ++i)
            worst = std::max(worst, std::abs(d[i] - ref[i]));
    }

    // scripted column-mean reference with several harmonics
    {
        const std::size_t rows = 5, cols = 3;
        AdamState st(rows, cols);
        std::vector<double> d(rows * cols, 0.5), ref = d, m(rows * cols, 0.0), v(cols, 0.0);
        const std::vector<std::size_t> active{0, 2};
        int tau[cols] = {0, 0, 0};
        for (int step = 0; step < 200; ++step)
        {
            std::vector<double> g(rows * cols);
            for (double& x : g)
                x = n(rng);
            adam_step(d, st, g, active);
            for (std::size_t c : active)
            {
                ++tau[c];
                double mean_sq = 0.0;
                for (std::size_t h = 0; h < rows; ++h)
                    mean_sq += g[c * rows + h] * g[c * rows + h];
                v[c] = 0.999 * v[c] + 0.001 * mean_sq / rows;
                const double vh = v[c] / (1.0 - std::pow(0.999, tau[c]));
                for (std::size_t h = 0; h < rows; ++h)
                {
                    const std::size_t i = c * rows + h;
                    m[i] = 0.9 * m[i] + 0.1 * g[i];
                    const double mh = m[i] / (1.0 - std::pow(0.9, tau[c]));
                    ref[i] = std::clamp(ref[i] - 1e-3 * mh / std::sqrt(vh + 1e-8), 0.0, 1.0);
                }
            }
        }
        for (std::size_t i = 0; i < d.size(); ++i)
            worst_scripted = std::max(worst_scripted, std::abs(d[i] - ref[i]));
    }

    // constant gradient, eps = 0: every step moves entry h by kappa * g_h / rms(g)
    {
        const std::vector<double> g{0.3, -0.1, 0.05, 0.0, -0.2};
        double ms = 0.0;
        for (double x : g)
            ms += x * x;
        const double rms = std::sqrt(ms / static_cast<double>(g.size()));
        AdamState st(g.size(), 1);
        st.epsilon = 0.0;
        std::vector<double> d(g.size(), 0.5);
        const std::vector<std::size_t> all{0};
        for (int t = 1; t <= 50; ++t)
        {
            const auto before = d;
            adam_step(d, st, g, all);
            for (std::size_t h = 0; h < g.size(); ++h)
                worst_ratio = std::max(worst_ratio, std::abs((before[h] - d[h]) / 1e-3 - g[h] / rms));
        }
    }
    const bool ok = worst_textbook < 1e-12 && worst_entry < 1e-12 && worst_scripted < 1e-12 && worst_ratio < 1e-9;
    return {ok, "textbook " + fmt("%.1e", worst_textbook) + ", per-entry " + fmt("%.1e", worst_entry) +
                    ", scripted " + fmt("%.1e", worst_scripted) + ", constant-gradient ratio " +
                    fmt("%.1e", worst_ratio)};
}

Outcome blind_separation()
{
    MelodySpec ms;
    ms.instruments = {recorder_like(), sawtooth_like()};
    ms.duration_s = 20.0;
    ms.seed = 1;
    const Fixture fx = synth_melodies(ms);
    const StftConfig sc;
    const MixtureAnalysis mix = analyse_mixture(fx.mix, sc, LogTransformConfig::for_stft(sc));

    struct Run
    {
        double mean_sdr = -std::numeric_limits<double>::infinity();
        double sdr[2] = {0.0, 0.0};
        bool improved = false;
    };
    std::vector<Run> runs;
    std::string detail;
    for (std::uint64_t seed = 0; seed < 5; ++seed)
    {
        TrainConfig tc;
        tc.n_ins = 2;
        tc.n_spr = 1;
        tc.n_trn = 2000;
        tc.seed = seed;
        tc.tone.sigma_nil = sc.sigma_bins();
        const TrainResult tr = train(mix.log.log_spectrogram, tc);
        SeparationConfig cfg;
        cfg.n_spr = 1;
        cfg.tone = tc.tone;
        Run run;
        double plain_mean = 0.0;
        for (bool mask : {false, true})
        {
            cfg.use_mask = mask;
            const auto r = separate(mix, tr.dictionary, tr.kept, cfg, sc);
            const auto s = bss_eval(fx.references, r.signals);
            if (mask)
            {
                run.mean_sdr = s.mean_sdr();
                run.sdr[0] = s.sdr_db[0];
                run.sdr[1] = s.sdr_db[1];
            }
            else
                plain_mean = s.mean_sdr();
        }
        run.improved = run.mean_sdr > plain_mean;
        detail += " seed" + std::to_string(seed) + "=" + fmt("%.2f", run.sdr[0]) + "/" + fmt("%.2f", run.sdr[1]) +
                  (run.improved ? "+" : "-");
        runs.push_back(run);
    }
    const auto best = std::max_element(runs.begin(), runs.end(),
                                       [](const Run& a, const Run& b) { return a.mean_sdr < b.mean_sdr; });
    const auto improved = std::count_if(runs.begin(), runs.end(), [](const Run& r) { return r.improved; });
    const bool ok = best->sdr[0] > 10.0 && best->sdr[1] > 10.0 && improved >= 4;
    return {ok, "best masked SDR " + fmt("%.2f", best->sdr[0]) + "/" + fmt("%.2f", best->sdr[1]) +
                    " dB, masking helped " + std::to_string(improved) + "/5;" + detail};
}

Outcome bss_metrics()
{
    const std::size_t n = 9600;
    std::mt19937_64 rng(77);
    std::normal_distribution<double> g(0.0, 1.0);
    auto noise = [&] {
        std::vector<double> v(n);
        for (double& x : v)
            x = g(rng);
        return v;
    };
    auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
            s += a[i] * b[i];
        return s;
    };
    std::vector<std::vector<double>> refs{noise(), noise()};
    for (std::size_t i = 0; i < n; ++i)
        refs[0][i] = std::sin(0.021 * static_cast<double>(i)) + 0.1 * refs[0][i];

    // 20 dB: noise orthogonal to both references at 1% of the energy
    bool ok20 = true;
    double worst20 = 0.0;
    {
        auto est = refs;
        for (std::size_t k = 0; k < 2; ++k)
        {
            auto e = noise();
            const auto p = project(e, refs);
            for (std::size_t i = 0; i < n; ++i)
                e[i] -= p[i];
            const double gain = std::sqrt(0.01 * dot(refs[k], refs[k]) / dot(e, e));
            for (std::size_t i = 0; i < n; ++i)
                est[k][i] += gain * e[i];
        }
        const auto s = bss_eval(refs, est);
        for (std::size_t k = 0; k < 2; ++k)
        {
            worst20 = std::max({worst20, std::abs(s.sdr_db[k] - 20.0), std::abs(s.sar_db[k] - 20.0)});
            ok20 = ok20 && s.sir_db[k] == std::numeric_limits<double>::infinity();
        }
    }

    // scale invariance and permutation choice on a mixed-up estimate pair
    auto est = refs;
    const auto e0 = noise();
    const auto e1 = noise();
    for (std::size_t i = 0; i < n; ++i)
    {
        est[0][i] += 0.3 * e0[i] + 0.4 * refs[1][i];
        est[1][i] += 0.2 * e1[i] + 0.6 * refs[0][i];
    }
    const std::vector<std::vector<double>> swapped{est[1], est[0]};
    const auto base = bss_eval(refs, swapped);
    auto scaled = swapped;
    for (auto& v : scaled)
        for (double& x : v)
            x *= -3.7;
    const auto sc = bss_eval(refs, scaled);
    double worst_scale = 0.0;
    for (std::size_t k = 0; k < 2; ++k)
        worst_scale = std::max({worst_scale, std::abs(sc.sdr_db[k] - base.sdr_db[k]),
                                std::abs(sc.sir_db[k] - base.sir_db[k]), std::abs(sc.sar_db[k] - base.sar_db[k])});

    // brute force: SIR of every (reference, estimate) pair, best mean wins
    double pair_sir[2][2];
    for (std::size_t j = 0; j < 2; ++j)
    {
        const auto s = bss_eval(refs, std::vector<std::vector<double>>{swapped[j], swapped[j]});
        pair_sir[0][j] = s.sir_db[0];
        pair_sir[1][j] = s.sir_db[1];
    }
    const double identity = pair_sir[0][0] + pair_sir[1][1];
    const double crossed = pair_sir[0][1] + pair_sir[1][0];
    const std::vector<std::size_t> expected = identity >= crossed ? std::vector<std::size_t>{0, 1}
                                                                  : std::vector<std::size_t>{1, 0};
    const bool ok = ok20 && worst20 < 0.1 && worst_scale < 1e-9 && base.permutation == expected &&
                    sc.permutation == expected && expected == std::vector<std::size_t>{1, 0};
    return {ok, "20 dB case off by " + fmt("%.4f", worst20) + " dB, scale drift " + fmt("%.1e", worst_scale) +
                    ", permutation " + std::to_string(base.permutation[0]) + std::to_string(base.permutation[1])};
}

Outcome griffin_lim_check()
{
    const StftConfig cfg;
    const std::size_t n = 48000;
    std::mt19937_64 rng(12);
    std::normal_distribution<double> g(0.0, 0.05);
    AudioClip x;
    for (std::size_t i = 0; i < n; ++i)
        x.samples.push_back(0.3 * std::sin(0.05 * static_cast<double>(i)) + g(rng));
    const auto r = stft(x, cfg);
    const auto fixed = griffin_lim(r.magnitude, r.phase, 1, cfg, n);
    const std::size_t edge = cfg.window_length() / 2;
    const double fixed_err = relative_l2(fixed.signal.samples, x.samples, edge, n - edge);

    SpectrogramGrid target = r.magnitude;
    for (std::size_t t = 0; t < target.frames; ++t)
        for (double& v : target.frame(t))
            v *= 1.0 + 0.5 * std::sin(0.3 * static_cast<double>(t));
    const auto gl = griffin_lim(target, r.phase, 5, cfg, n, true);
    bool monotone = gl.errors.size() == 5;
    for (std::size_t k = 1; k < gl.errors.size(); ++k)
        monotone = monotone && gl.errors[k] <= gl.errors[k - 1];
    std::string errs;
    for (double e : gl.errors)
        errs += " " + fmt("%.4g", e);
    return {fixed_err < 1e-6 && monotone, "fixed-point error " + fmt("%.2e", fixed_err) + ", errors" + errs};
}

Outcome determinism()
{
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "sparsep_acceptance_determinism";
    fs::remove_all(dir);
    cli::RunConfig cfg = cli::resolve_config({{"n_trn", "1000"}, {"seed", "3"}}, {});
    cfg.output_dir = dir;
    std::ostringstream log;
    cli::SynthOptions so;
    so.duration_s = 2.0;
    const auto files = cli::cmd_synth(so, cfg, log);
    cli::cmd_transform(files[0], dir / "mix.spls", std::nullopt, cfg, log);
    cli::cmd_train(dir / "mix.spls", dir / "a.txt", cfg, log);
    cli::cmd_train(dir / "mix.spls", dir / "b.txt", cfg, log);
    auto slurp = [](const fs::path& p) {
        std::ifstream f(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
    };
    const std::string a = slurp(dir / "a.txt");
    const std::string b = slurp(dir / "b.txt");
    fs::remove_all(dir);
    return {!a.empty() && a == b, std::to_string(a.size()) + " bytes, " + (a == b ? "identical" : "different")};
}

struct Criterion
{
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv)
{
    const std::vector<Criterion> all{
        {1, "pursuit exactness", 5.0, pursuit_exactness},
        {2, "gradient correctness", 30.0, gradient_correctness},
        {3, "log-axis covariance", 30.0, log_axis_covariance},
        {4, "inharmonicity model", 60.0, inharmonicity},
        {5, "modified Adam", 5.0, modified_adam},
        {6, "blind separation", 900.0, blind_separation},
        {7, "BSS metrics", 10.0, bss_metrics},
        {8, "Griffin-Lim", 30.0, griffin_lim_check},
        {9, "training determinism", std::numeric_limits<double>::infinity(), determinism},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i)
        only.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& c : all)
    {
        if (!only.empty() && only.count(c.id) == 0)
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try
        {
            o = c.run();
        }
        catch (const std::exception& e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < c.budget_s;
        const bool pass = o.pass && in_time;
        failures += pass ? 0 : 1;
        std::printf("%s criterion %d (%s): %.2f s%s; %s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs,
                    in_time ? "" : " over budget", o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
