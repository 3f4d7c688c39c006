#include "sparsep/dictionary.hpp"

#include "sparsep/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

namespace sparsep
{

void Dictionary::validate() const
{
    if (n_har == 0 || values.size() != n_har * n_pat)
        throw DomainError("dictionary shape is inconsistent");
    for (double v : values)
        if (!(v >= 0.0 && v <= 1.0))
            throw DomainError("dictionary entries must lie in [0, 1]");
}

double harmonic_offset(int h, double inharmonicity, double alpha0)
{
    const double hh = static_cast<double>(h);
    return alpha0 * (std::log2(hh) + 0.5 * std::log2(1.0 + inharmonicity * hh * hh));
}

HarmonicFamily::HarmonicFamily(const Dictionary& dict, const LogAxisConfig& axis, ToneBox box)
    : HarmonicFamily(dict, {}, axis, box)
{
    columns_.resize(dict.n_pat);
    for (std::size_t i = 0; i < dict.n_pat; ++i)
        columns_[i] = i;
}

HarmonicFamily::HarmonicFamily(const Dictionary& dict, std::vector<std::size_t> columns,
                               const LogAxisConfig& axis, ToneBox box)
    : dict_(dict), columns_(std::move(columns)), axis_(axis), box_(box)
{
    dict_.validate();
    axis_.validate();
    if (!(box_.sigma_nil > 0.0) || !(box_.b_max >= 0.0))
        throw DomainError("invalid tone parameter box");
    for (std::size_t c : columns_)
        if (c >= dict_.n_pat)
            throw DomainError("dictionary column index out of range");
    for (std::size_t h = 1; h <= dict_.n_har; ++h)
        base_offsets_.push_back(axis_.alpha0 * std::log2(static_cast<double>(h)));
}

BoxSpec HarmonicFamily::param_box() const
{
    return {{0.25 * box_.sigma_nil, 0.0}, {4.0 * box_.sigma_nil, box_.b_max}};
}

void HarmonicFamily::peaks(std::size_t pattern, std::span<const double> params,
                           std::vector<PatternPeak>& out) const
{
    const std::size_t col = columns_.at(pattern);
    const double b = params[1];
    const double half_alpha = 0.5 * axis_.alpha0;
    out.resize(dict_.n_har);
    for (std::size_t h = 1; h <= dict_.n_har; ++h)
    {
        const double h2 = static_cast<double>(h * h);
        const double stretch = 1.0 + b * h2;
        PatternPeak& p = out[h - 1];
        p.weight = dict_.at(h - 1, col);
        p.offset = base_offsets_[h - 1] + (b == 0.0 ? 0.0 : half_alpha * std::log2(stretch));
        p.d_offset = half_alpha * h2 / (stretch * std::numbers::ln2);
        p.weight_index = static_cast<std::ptrdiff_t>(col * dict_.n_har + h - 1);
    }
}

std::vector<double> init_column(std::size_t n_har, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    // Inverse CDF of Pareto(x_m = 1, shape 0.5): (1 - U)^(-1 / 0.5).
    const double u = uniform(rng);
    const double e = std::pow(1.0 - u, -2.0);
    std::vector<double> d(n_har);
    for (std::size_t h = 1; h <= n_har; ++h)
        d[h - 1] = uniform(rng) / std::pow(static_cast<double>(h), e);
    return d;
}

void write_dictionary(const Dictionary& dict, std::span<const std::size_t> kept,
                      const std::filesystem::path& path)
{
    dict.validate();
    std::string out = "sparsep-dictionary 1\n";
    out += "n_har " + std::to_string(dict.n_har) + "\n";
    out += "n_pat " + std::to_string(dict.n_pat) + "\n";
    out += "kept " + std::to_string(kept.size());
    for (std::size_t k : kept)
    {
        if (k >= dict.n_pat)
            throw DomainError("kept column index out of range");
        out += " " + std::to_string(k);
    }
    out += "\n";
    char buf[32];
    for (std::size_t eta = 0; eta < dict.n_pat; ++eta)
    {
        for (std::size_t h = 0; h < dict.n_har; ++h)
        {
            std::snprintf(buf, sizeof buf, "%.17g", dict.at(h, eta));
            if (h > 0)
                out += ' ';
            out += buf;
        }
        out += '\n';
    }
    std::ofstream f(path, std::ios::trunc);
    if (!f)
        throw IoError("cannot write " + path.string());
    f << out;
    if (!f)
        throw IoError("write failed for " + path.string());
}

DictionaryFile read_dictionary(const std::filesystem::path& path)
{
    std::ifstream f(path);
    if (!f)
        throw IoError("cannot open " + path.string());
    const std::string name = path.string();
    auto expect = [&](const std::string& key) {
        std::string k;
        if (!(f >> k) || k != key)
            throw FormatError(name + ": expected '" + key + "'");
    };

    expect("sparsep-dictionary");
    int version = 0;
    if (!(f >> version) || version != 1)
        throw FormatError(name + ": unsupported dictionary version");
    std::size_t n_har = 0, n_pat = 0, n_kept = 0;
    expect("n_har");
    if (!(f >> n_har) || n_har == 0)
        throw FormatError(name + ": bad n_har");
    expect("n_pat");
    if (!(f >> n_pat) || n_pat == 0)
        throw FormatError(name + ": bad n_pat");
    expect("kept");
    if (!(f >> n_kept) || n_kept > n_pat)
        throw FormatError(name + ": bad kept count");

    DictionaryFile df;
    df.kept.resize(n_kept);
    for (auto& k : df.kept)
        if (!(f >> k) || k >= n_pat)
            throw FormatError(name + ": bad kept index");
    df.dictionary = Dictionary(n_har, n_pat);
    for (std::size_t eta = 0; eta < n_pat; ++eta)
        for (std::size_t h = 0; h < n_har; ++h)
            if (!(f >> df.dictionary.at(h, eta)))
                throw FormatError(name + ": truncated dictionary values");
    std::string extra;
    if (f >> extra)
        throw FormatError(name + ": trailing data");
    try
    {
        df.dictionary.validate();
    }
    catch (const DomainError& e)
    {
        throw FormatError(name + ": " + e.what());
    }
    return df;
}

void adam_step(Dictionary& dict, AdamState& state, std::span<const double> gradient,
               std::span<const std::size_t> active)
{
    adam_step(std::span<double>(dict.values), state, gradient, active);
}

}  // namespace sparsep
