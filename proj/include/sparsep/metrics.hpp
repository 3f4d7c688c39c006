#pragma once

#include "sparsep/audio.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace sparsep
{

/// Scores in dB per reference, under the selected permutation. A score is
/// -inf when its numerator vanishes and +inf when its denominator does.
struct BssScores
{
    std::vector<double> sdr_db;
    std::vector<double> sir_db;
    std::vector<double> sar_db;
    /// permutation[eta] is the estimate assigned to reference eta.
    std::vector<std::size_t> permutation;

    double mean_sdr() const;
    double mean_sir() const;
};

/// Orthogonal projection of x onto span(basis). Rank-deficient bases are
/// handled with a least-squares solution.
std::vector<double> project(std::span<const double> x, std::span<const std::vector<double>> basis);

/// BSS-eval measures from orthogonal projections over the full signals,
/// choosing the estimate permutation with the highest mean SIR.
/// Estimates are truncated or zero-padded to the reference length.
BssScores bss_eval(std::span<const AudioClip> references, std::span<const AudioClip> estimates);
BssScores bss_eval(std::span<const std::vector<double>> references,
                   std::span<const std::vector<double>> estimates);

/// "inf", "-inf", or the value with two decimals.
std::string format_db(double value);

/// Human-readable table followed by key=value lines.
std::string format_report(const BssScores& scores);

}  // namespace sparsep
