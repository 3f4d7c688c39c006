#pragma once

#include "sparsep/dictionary.hpp"
#include "sparsep/grid.hpp"
#include "sparsep/logspec.hpp"
#include "sparsep/optim.hpp"
#include "sparsep/pursuit.hpp"

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace sparsep
{

struct TrainConfig
{
    std::size_t n_ins = 2;
    std::size_t n_spr = 1;
    std::size_t n_trn = 2000;
    std::size_t n_har = 25;
    std::size_t prune_interval = 500;
    std::uint64_t seed = 0;
    LogAxisConfig axis{};
    ToneBox tone{};
    /// Pursuit settings; n_spr is taken from this struct's n_spr.
    PursuitConfig pursuit = default_pursuit();

    static PursuitConfig default_pursuit();
    std::size_t n_pat() const { return 2 * n_ins; }
    PursuitConfig pursuit_config() const;
    /// Throws ConfigError; n_trn must be a positive multiple of prune_interval.
    void validate() const;
};

struct TrainState
{
    AdamState adam;
    /// Sum of identified amplitudes per column since its (re)initialization.
    std::vector<double> amp_acc;
    std::size_t prune_interval = 500;
    /// Head start for fresh columns when ranking, prune_interval / 2.
    double head_start = 250.0;
    std::size_t n_ins = 2;
    std::mt19937_64 rng;

    TrainState(std::size_t n_har, std::size_t n_pat, std::size_t n_ins, std::size_t prune_interval,
               std::uint64_t seed);
};

/// Dictionary with every column drawn by init_column.
Dictionary initial_dictionary(std::size_t n_har, std::size_t n_pat, std::mt19937_64& rng);

/// Ranks columns by amp_acc / (tau - head_start), keeps the best n_ins
/// (ties go to the lower index) and reinitializes the others together with
/// their optimizer state and amplitude sums. Returns the kept columns in
/// ascending order.
std::vector<std::size_t> prune_columns(Dictionary& dict, TrainState& state);

/// Column ranking used by prune_columns without modifying anything.
std::vector<std::size_t> rank_columns(const TrainState& state);

/// Outcome of one stochastic training step.
struct StepOutcome
{
    std::size_t frame = 0;
    std::size_t atoms = 0;
    bool updated = false;
    bool pruned = false;
};

/// One step: pursuit on `frame` with the current dictionary, gradient of the
/// loss with respect to the dictionary at the found atoms, modified-Adam
/// update of all columns, and pruning whenever the smallest column step
/// count reaches a multiple of the pruning interval. Frames without atoms
/// leave everything untouched.
StepOutcome train_step(std::span<const double> frame, Dictionary& dict, TrainState& state,
                       const TrainConfig& cfg, std::vector<std::size_t>& kept);

struct TrainResult
{
    Dictionary dictionary;
    /// Columns left intact by the latest pruning.
    std::vector<std::size_t> kept;
    std::size_t updates = 0;
};

/// Stochastic dictionary learning over n_trn uniformly drawn frames.
TrainResult train(const SpectrogramGrid& log_spectrogram, const TrainConfig& cfg);

}  // namespace sparsep
