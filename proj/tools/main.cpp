#include "commands.hpp"

#include "sparsep/error.hpp"
#include "sparsep/parallel.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

namespace
{

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kDataError = 2;

}  // namespace

int main(int argc, char** argv)
{
    using namespace sparsep;
    using namespace sparsep::cli;

    CLI::App app{"Sparse pursuit source separation"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_file;
    int threads = 0;
    app.add_option("--config", config_file, "flat key = value config file");
    app.add_option("--threads", threads, std::string("worker thread cap (default from ") + kThreadsEnv + ")")
        ->check(CLI::PositiveNumber);
    std::map<std::string, std::string> flag_values;
    for (const auto& key : config_keys())
        app.add_option("--" + key.name, flag_values[key.name], key.help);

    std::string input, output, pgm;
    auto* transform = app.add_subcommand("transform", "compute and cache the log spectrogram of a WAV file");
    transform->add_option("input", input, "input WAV")->required();
    transform->add_option("-o,--output", output, "log spectrogram cache")->required();
    transform->add_option("--pgm", pgm, "also write the log spectrogram as a PGM image");

    std::string cache, dictionary;
    auto* train = app.add_subcommand("train", "learn a dictionary from a cached log spectrogram");
    train->add_option("cache", cache, "log spectrogram cache")->required();
    train->add_option("-o,--output", dictionary, "dictionary file")->required();

    SeparateOptions sep_opts;
    std::string sep_cache;
    auto* separate = app.add_subcommand("separate", "separate a WAV file with a learned dictionary");
    separate->add_option("input", input, "mixture WAV")->required();
    separate->add_option("dictionary", dictionary, "dictionary file")->required();
    separate->add_option("--cache", sep_cache, "reuse this log spectrogram cache of the input");
    separate->add_option("--stem", sep_opts.stem, "output file stem (default: input stem)");
    separate->add_flag("--pgm", sep_opts.pgm, "also write the separated spectrograms as PGM images");
    std::vector<std::string> refs, ests;
    separate->add_option("--ref", refs, "reference stems to score against");

    auto* eval = app.add_subcommand("eval", "score estimated stems against references");
    eval->add_option("--ref", refs, "reference WAVs")->required();
    eval->add_option("--est", ests, "estimated WAVs")->required();

    SynthOptions synth_opts;
    auto* synth = app.add_subcommand("synth", "write a two-instrument melody fixture");
    synth->add_option("--duration", synth_opts.duration_s, "length in seconds");
    synth->add_option("--rate", synth_opts.sample_rate_hz, "sample rate in Hz (44100 or 48000)");
    synth->add_flag("--octave-overlap", synth_opts.octave_overlap, "second melody doubles the first an octave up");
    synth->add_option("--stem", synth_opts.stem, "output file stem");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::Success& e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e)
    {
        app.exit(e);
        return kUsage;
    }

    try
    {
        apply_thread_env();
        if (threads > 0)
            set_thread_count(threads);

        std::map<std::string, std::string> file_entries;
        if (!config_file.empty())
            file_entries = read_config_file(config_file);
        std::map<std::string, std::string> flags;
        for (const auto& key : config_keys())
            if (app.count("--" + key.name) > 0)
                flags[key.name] = flag_values[key.name];
        const RunConfig cfg = resolve_config(file_entries, flags);

        auto paths = [](const std::vector<std::string>& v) { return std::vector<fs::path>(v.begin(), v.end()); };
        if (*transform)
            cmd_transform(input, output, pgm.empty() ? std::nullopt : std::optional<fs::path>(pgm), cfg, std::cout);
        else if (*train)
            cmd_train(cache, dictionary, cfg, std::cout);
        else if (*separate)
        {
            if (!sep_cache.empty())
                sep_opts.cache = sep_cache;
            sep_opts.references = paths(refs);
            cmd_separate(input, dictionary, sep_opts, cfg, std::cout);
        }
        else if (*eval)
            std::cout << format_report(cmd_eval(paths(refs), paths(ests), std::cout));
        else if (*synth)
            cmd_synth(synth_opts, cfg, std::cout);
        return kOk;
    }
    catch (const ConfigError& e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return kUsage;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kDataError;
    }
}
