#pragma once

#include "sparsep/logspec.hpp"
#include "sparsep/optim.hpp"
#include "sparsep/pattern.hpp"

#include <cstddef>
#include <filesystem>
#include <random>
#include <span>
#include <vector>

namespace sparsep
{

/// Relative harmonic amplitudes, one column per (supposed) instrument,
/// entries in [0, 1]. Column-major: entry (h, eta) with h = 0 for the
/// fundamental lives at eta * n_har + h.
struct Dictionary
{
    std::size_t n_har = 25;
    std::size_t n_pat = 0;
    std::vector<double> values;

    Dictionary() = default;
    Dictionary(std::size_t harmonics, std::size_t patterns)
        : n_har(harmonics), n_pat(patterns), values(harmonics * patterns, 0.0)
    {
    }

    double& at(std::size_t h, std::size_t eta) { return values[eta * n_har + h]; }
    double at(std::size_t h, std::size_t eta) const { return values[eta * n_har + h]; }
    std::span<double> column(std::size_t eta) { return {values.data() + eta * n_har, n_har}; }
    std::span<const double> column(std::size_t eta) const
    {
        return {values.data() + eta * n_har, n_har};
    }

    /// Throws DomainError if any entry leaves [0, 1] or the shape is inconsistent.
    void validate() const;
};

/// Log-axis offset of harmonic h (1-based) relative to the fundamental.
double harmonic_offset(int h, double inharmonicity, double alpha0);

/// Box for the tone parameters (sigma, b): sigma in [0.25, 4] * sigma_nil,
/// b in [0, b_max].
struct ToneBox
{
    double sigma_nil = 12.0 / (2.0 * 3.14159265358979323846);
    double b_max = 5e-3;
};

/// Harmonic instrument patterns on the log axis:
///   y_eta(s) = sum_h D[h, eta] exp(-(s - alpha0 log2(h sqrt(1 + b h^2)))^2 / (2 sigma^2))
/// with params (sigma, b). Only the listed dictionary columns are exposed,
/// in the given order; learnable-weight indices refer to the full dictionary.
class HarmonicFamily final : public PatternFamily
{
public:
    HarmonicFamily(const Dictionary& dict, const LogAxisConfig& axis, ToneBox box = {});
    HarmonicFamily(const Dictionary& dict, std::vector<std::size_t> columns,
                   const LogAxisConfig& axis, ToneBox box = {});

    std::size_t pattern_count() const override { return columns_.size(); }
    std::size_t param_count() const override { return 2; }
    std::vector<double> default_params() const override { return {box_.sigma_nil, 0.0}; }
    BoxSpec param_box() const override;
    void peaks(std::size_t pattern, std::span<const double> params,
               std::vector<PatternPeak>& out) const override;
    std::size_t weight_count() const override { return dict_.values.size(); }

    const std::vector<std::size_t>& columns() const { return columns_; }

private:
    Dictionary dict_;
    std::vector<std::size_t> columns_;
    LogAxisConfig axis_;
    ToneBox box_;
    std::vector<double> base_offsets_;
};

/// New dictionary column d[h] / h^e with d[h] ~ U[0, 1) and e drawn from a
/// Pareto distribution with minimum 1 and shape 0.5.
std::vector<double> init_column(std::size_t n_har, std::mt19937_64& rng);

/// Text format:
///   sparsep-dictionary 1
///   n_har <n>
///   n_pat <n>
///   kept <k> <i_1> ... <i_k>
///   <n_har values of column 0>
///   ...
void write_dictionary(const Dictionary& dict, std::span<const std::size_t> kept,
                      const std::filesystem::path& path);

struct DictionaryFile
{
    Dictionary dictionary;
    std::vector<std::size_t> kept;
};

DictionaryFile read_dictionary(const std::filesystem::path& path);

/// Modified-Adam step on a dictionary.
void adam_step(Dictionary& dict, AdamState& state, std::span<const double> gradient,
               std::span<const std::size_t> active);

}  // namespace sparsep
