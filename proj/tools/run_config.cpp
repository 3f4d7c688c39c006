#include "run_config.hpp"

#include "sparsep/error.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace sparsep::cli
{

namespace
{

double to_double(const std::string& key, const std::string& v)
{
    double out = 0.0;
    const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || end != v.data() + v.size())
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    return out;
}

template <typename T>
T to_unsigned(const std::string& key, const std::string& v)
{
    T out = 0;
    const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || end != v.data() + v.size())
        throw ConfigError(key + ": expected a nonnegative integer, got '" + v + "'");
    return out;
}

int to_int(const std::string& key, const std::string& v)
{
    int out = 0;
    const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || end != v.data() + v.size())
        throw ConfigError(key + ": expected an integer, got '" + v + "'");
    return out;
}

bool to_bool(const std::string& key, const std::string& v)
{
    if (v == "1" || v == "true" || v == "yes" || v == "on")
        return true;
    if (v == "0" || v == "false" || v == "no" || v == "off")
        return false;
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::string num(double v)
{
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

struct Entry
{
    ConfigKey key;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

const std::vector<Entry>& entries()
{
    static const std::vector<Entry> table = [] {
        std::vector<Entry> t;
        auto add = [&t](std::string name, std::string help, auto set, auto get) {
            t.push_back({{std::move(name), std::move(help)}, set, get});
        };
        add("zeta", "Gaussian window standard deviation in samples",
            [](RunConfig& c, const std::string& v) { c.stft.zeta_samples = to_double("zeta", v); },
            [](const RunConfig& c) { return num(c.stft.zeta_samples); });
        add("hop", "STFT hop in samples",
            [](RunConfig& c, const std::string& v) { c.stft.hop_samples = to_int("hop", v); },
            [](const RunConfig& c) { return std::to_string(c.stft.hop_samples); });
        add("window_halfwidth", "window cut-off in multiples of zeta",
            [](RunConfig& c, const std::string& v) { c.stft.window_halfwidth = to_double("window_halfwidth", v); },
            [](const RunConfig& c) { return num(c.stft.window_halfwidth); });
        add("f0", "lowest log-axis frequency in linear bins",
            [](RunConfig& c, const std::string& v) {
                const double f0 = to_double("f0", v);
                c.log.axis.f0 = c.train.axis.f0 = c.separation.axis.f0 = f0;
            },
            [](const RunConfig& c) { return num(c.log.axis.f0); });
        add("alpha0", "log-axis bins per octave",
            [](RunConfig& c, const std::string& v) {
                const double a = to_double("alpha0", v);
                c.log.axis.alpha0 = c.train.axis.alpha0 = c.separation.axis.alpha0 = a;
            },
            [](const RunConfig& c) { return num(c.log.axis.alpha0); });
        add("m", "number of log-axis bins",
            [](RunConfig& c, const std::string& v) {
                const auto m = to_unsigned<std::size_t>("m", v);
                c.log.axis.n_bins = c.train.axis.n_bins = c.separation.axis.n_bins = m;
            },
            [](const RunConfig& c) { return std::to_string(c.log.axis.n_bins); });
        add("log_floor", "log transform peak floor relative to the maximum",
            [](RunConfig& c, const std::string& v) { c.log.relative_floor = to_double("log_floor", v); },
            [](const RunConfig& c) { return num(c.log.relative_floor); });
        add("log_max_evals", "optimizer evaluation cap of the log transform",
            [](RunConfig& c, const std::string& v) {
                c.log.pursuit.optimizer.max_evals = to_unsigned<std::size_t>("log_max_evals", v);
            },
            [](const RunConfig& c) { return std::to_string(c.log.pursuit.optimizer.max_evals); });
        add("q", "lifted loss exponent",
            [](RunConfig& c, const std::string& v) { c.train.pursuit.q = c.separation.pursuit.q = to_double("q", v); },
            [](const RunConfig& c) { return num(c.train.pursuit.q); });
        add("delta", "lifted loss offset",
            [](RunConfig& c, const std::string& v) {
                c.train.pursuit.delta = c.separation.pursuit.delta = to_double("delta", v);
            },
            [](const RunConfig& c) { return num(c.train.pursuit.delta); });
        add("lambda", "required loss reduction factor per pursuit iteration",
            [](RunConfig& c, const std::string& v) {
                c.train.pursuit.lambda = c.separation.pursuit.lambda = to_double("lambda", v);
            },
            [](const RunConfig& c) { return num(c.train.pursuit.lambda); });
        add("n_pre", "pursuit candidates per iteration",
            [](RunConfig& c, const std::string& v) {
                c.train.pursuit.n_pre = c.separation.pursuit.n_pre = to_unsigned<std::size_t>("n_pre", v);
            },
            [](const RunConfig& c) { return std::to_string(c.train.pursuit.n_pre); });
        add("n_itr", "pursuit iteration limit (0 for automatic)",
            [](RunConfig& c, const std::string& v) {
                c.train.pursuit.n_itr = c.separation.pursuit.n_itr = to_unsigned<std::size_t>("n_itr", v);
            },
            [](const RunConfig& c) { return std::to_string(c.train.pursuit.n_itr); });
        add("max_evals", "optimizer evaluation cap of training and separation",
            [](RunConfig& c, const std::string& v) {
                const auto n = to_unsigned<std::size_t>("max_evals", v);
                c.train.pursuit.optimizer.max_evals = c.separation.pursuit.optimizer.max_evals = n;
            },
            [](const RunConfig& c) { return std::to_string(c.train.pursuit.optimizer.max_evals); });
        add("n_ins", "number of instruments",
            [](RunConfig& c, const std::string& v) { c.train.n_ins = to_unsigned<std::size_t>("n_ins", v); },
            [](const RunConfig& c) { return std::to_string(c.train.n_ins); });
        add("n_spr", "maximum simultaneous tones per instrument",
            [](RunConfig& c, const std::string& v) {
                c.train.n_spr = c.separation.n_spr = to_unsigned<std::size_t>("n_spr", v);
            },
            [](const RunConfig& c) { return std::to_string(c.train.n_spr); });
        add("n_trn", "training iterations",
            [](RunConfig& c, const std::string& v) { c.train.n_trn = to_unsigned<std::size_t>("n_trn", v); },
            [](const RunConfig& c) { return std::to_string(c.train.n_trn); });
        add("n_har", "harmonics per dictionary column",
            [](RunConfig& c, const std::string& v) { c.train.n_har = to_unsigned<std::size_t>("n_har", v); },
            [](const RunConfig& c) { return std::to_string(c.train.n_har); });
        add("prune_interval", "training iterations between prunings",
            [](RunConfig& c, const std::string& v) {
                c.train.prune_interval = to_unsigned<std::size_t>("prune_interval", v);
            },
            [](const RunConfig& c) { return std::to_string(c.train.prune_interval); });
        add("seed", "random seed for training and fixtures",
            [](RunConfig& c, const std::string& v) { c.train.seed = to_unsigned<std::uint64_t>("seed", v); },
            [](const RunConfig& c) { return std::to_string(c.train.seed); });
        add("b_max", "largest inharmonicity coefficient",
            [](RunConfig& c, const std::string& v) {
                c.train.tone.b_max = c.separation.tone.b_max = to_double("b_max", v);
            },
            [](const RunConfig& c) { return num(c.train.tone.b_max); });
        add("use_mask", "apply spectral masking before resynthesis",
            [](RunConfig& c, const std::string& v) { c.separation.use_mask = to_bool("use_mask", v); },
            [](const RunConfig& c) { return std::string(c.separation.use_mask ? "true" : "false"); });
        add("gl_iters", "Griffin-Lim iterations",
            [](RunConfig& c, const std::string& v) { c.separation.gl_iters = to_int("gl_iters", v); },
            [](const RunConfig& c) { return std::to_string(c.separation.gl_iters); });
        add("mask_epsilon", "regularizer of the mask denominator",
            [](RunConfig& c, const std::string& v) { c.separation.mask_epsilon = to_double("mask_epsilon", v); },
            [](const RunConfig& c) { return num(c.separation.mask_epsilon); });
        add("output_dir", "directory for separated stems and fixtures",
            [](RunConfig& c, const std::string& v) { c.output_dir = v; },
            [](const RunConfig& c) { return c.output_dir.string(); });
        return t;
    }();
    return table;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value)
{
    for (const auto& e : entries())
        if (e.key.name == key)
        {
            e.set(*this, value);
            return;
        }
    throw ConfigError("unknown config key '" + key + "'");
}

void RunConfig::validate() const
{
    try
    {
        stft.validate();
    }
    catch (const DomainError& e)
    {
        throw ConfigError(e.what());
    }
    log.axis.validate();
    log.pursuit.validate();
    if (!(log.relative_floor >= 0.0))
        throw ConfigError("log_floor must be nonnegative");
    train.validate();
    separation.validate();
    if (!(train.tone.b_max >= 0.0))
        throw ConfigError("b_max must be nonnegative");
}

std::string RunConfig::to_text() const
{
    std::string out;
    for (const auto& e : entries())
        out += e.key.name + " = " + e.get(*this) + "\n";
    return out;
}

StftConfig RunConfig::stft_config(int sample_rate_hz) const
{
    require_supported_rate(sample_rate_hz);
    StftConfig c = stft;
    c.sample_rate_hz = sample_rate_hz;
    return c;
}

LogTransformConfig RunConfig::log_config(int sample_rate_hz) const
{
    LogTransformConfig c = log;
    c.sigma_nil = stft_config(sample_rate_hz).sigma_bins();
    return c;
}

const std::vector<ConfigKey>& config_keys()
{
    static const std::vector<ConfigKey> keys = [] {
        std::vector<ConfigKey> k;
        for (const auto& e : entries())
            k.push_back(e.key);
        return k;
    }();
    return keys;
}

std::map<std::string, std::string> parse_config_text(const std::string& text, const std::string& source)
{
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    for (int n = 1; std::getline(in, line); ++n)
    {
        line = trim(line.substr(0, line.find('#')));
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(source + ":" + std::to_string(n) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty())
            throw ConfigError(source + ":" + std::to_string(n) + ": missing key");
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path)
{
    std::ifstream f(path);
    if (!f)
        throw ConfigError("cannot open config file " + path.string());
    std::ostringstream s;
    s << f.rdbuf();
    return parse_config_text(s.str(), path.string());
}

RunConfig resolve_config(const std::map<std::string, std::string>& file_entries,
                         const std::map<std::string, std::string>& flag_entries)
{
    RunConfig cfg;
    for (const auto& [k, v] : file_entries)
        cfg.set(k, v);
    for (const auto& [k, v] : flag_entries)
        cfg.set(k, v);
    // tone widths follow the analysis window
    cfg.train.tone.sigma_nil = cfg.separation.tone.sigma_nil = cfg.stft.sigma_bins();
    cfg.validate();
    return cfg;
}

}  // namespace sparsep::cli
