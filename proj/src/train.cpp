#include "sparsep/train.hpp"

#include "sparsep/error.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace sparsep
{

PursuitConfig TrainConfig::default_pursuit()
{
    PursuitConfig p;
    p.q = 0.5;
    p.lambda = 0.9;
    p.n_pre = 1;
    p.selector = Selector::xcorr;
    p.optimizer.max_evals = 1000;
    return p;
}

PursuitConfig TrainConfig::pursuit_config() const
{
    PursuitConfig p = pursuit;
    p.n_spr = n_spr;
    return p;
}

void TrainConfig::validate() const
{
    if (n_ins == 0)
        throw ConfigError("n_ins must be at least 1");
    if (n_spr == 0)
        throw ConfigError("n_spr must be at least 1");
    if (n_har == 0)
        throw ConfigError("n_har must be at least 1");
    if (prune_interval < 2)
        throw ConfigError("prune interval must be at least 2");
    if (n_trn == 0 || n_trn % prune_interval != 0)
        throw ConfigError("n_trn must be a positive multiple of the pruning interval (" +
                          std::to_string(prune_interval) + ")");
    axis.validate();
    pursuit_config().validate();
}

TrainState::TrainState(std::size_t n_har, std::size_t n_pat, std::size_t ins, std::size_t interval,
                       std::uint64_t seed)
    : adam(n_har, n_pat), amp_acc(n_pat, 0.0), prune_interval(interval),
      head_start(static_cast<double>(interval) / 2.0), n_ins(ins), rng(seed)
{
}

Dictionary initial_dictionary(std::size_t n_har, std::size_t n_pat, std::mt19937_64& rng)
{
    Dictionary dict(n_har, n_pat);
    for (std::size_t eta = 0; eta < n_pat; ++eta)
    {
        const auto col = init_column(n_har, rng);
        std::copy(col.begin(), col.end(), dict.column(eta).begin());
    }
    return dict;
}

std::vector<std::size_t> rank_columns(const TrainState& state)
{
    const std::size_t n_pat = state.amp_acc.size();
    std::vector<double> ratio(n_pat);
    for (std::size_t eta = 0; eta < n_pat; ++eta)
    {
        const double age = static_cast<double>(state.adam.tau[eta]) - state.head_start;
        ratio[eta] = age > 0.0 ? state.amp_acc[eta] / age : std::numeric_limits<double>::infinity();
    }
    std::vector<std::size_t> order(n_pat);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return ratio[a] > ratio[b]; });
    return order;
}

std::vector<std::size_t> prune_columns(Dictionary& dict, TrainState& state)
{
    const auto order = rank_columns(state);
    const std::size_t keep = std::min(state.n_ins, order.size());
    std::vector<std::size_t> kept(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep));
    std::vector<std::size_t> dropped(order.begin() + static_cast<std::ptrdiff_t>(keep), order.end());
    std::sort(kept.begin(), kept.end());
    std::sort(dropped.begin(), dropped.end());
    for (std::size_t eta : dropped)
    {
        state.adam.reset_column(eta);
        state.amp_acc[eta] = 0.0;
        const auto col = init_column(dict.n_har, state.rng);
        std::copy(col.begin(), col.end(), dict.column(eta).begin());
    }
    return kept;
}

StepOutcome train_step(std::span<const double> frame, Dictionary& dict, TrainState& state,
                       const TrainConfig& cfg, std::vector<std::size_t>& kept)
{
    StepOutcome out;
    const PursuitConfig pcfg = cfg.pursuit_config();
    const HarmonicFamily family(dict, cfg.axis, cfg.tone);
    const PursuitResult res = pursue(frame, family, pcfg);
    out.atoms = res.atoms.size();
    if (res.atoms.empty())
        return out;

    for (std::size_t eta = 0; eta < dict.n_pat; ++eta)
        state.amp_acc[eta] += res.amplitude_sums[eta];
    const LossGradient lg = loss_gradient(frame, res.atoms, family, pcfg.q, pcfg.delta, true);

    std::vector<std::size_t> all(dict.n_pat);
    std::iota(all.begin(), all.end(), 0);
    adam_step(dict, state.adam, lg.d_weights, all);
    out.updated = true;

    const long min_tau = *std::min_element(state.adam.tau.begin(), state.adam.tau.end());
    if (min_tau > 0 && min_tau % static_cast<long>(state.prune_interval) == 0)
    {
        kept = prune_columns(dict, state);
        out.pruned = true;
    }
    return out;
}

TrainResult train(const SpectrogramGrid& log_spectrogram, const TrainConfig& cfg)
{
    cfg.validate();
    if (log_spectrogram.frames == 0 || log_spectrogram.bins == 0)
        throw DomainError("cannot train on an empty spectrogram");
    if (!std::holds_alternative<LogAxis>(log_spectrogram.axis))
        throw DomainError("training expects a log-frequency spectrogram");
    if (log_spectrogram.bins != cfg.axis.n_bins)
        throw DomainError("log spectrogram height does not match the axis configuration");

    TrainState state(cfg.n_har, cfg.n_pat(), cfg.n_ins, cfg.prune_interval, cfg.seed);
    TrainResult result;
    result.dictionary = initial_dictionary(cfg.n_har, cfg.n_pat(), state.rng);

    std::uniform_int_distribution<std::size_t> pick(0, log_spectrogram.frames - 1);
    bool pruned = false;
    for (std::size_t step = 0; step < cfg.n_trn; ++step)
    {
        const std::size_t t = pick(state.rng);
        const StepOutcome o = train_step(log_spectrogram.frame(t), result.dictionary, state, cfg, result.kept);
        result.updates += o.updated ? 1 : 0;
        pruned = pruned || o.pruned;
    }
    if (!pruned)
    {
        const auto order = rank_columns(state);
        result.kept.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(std::min(cfg.n_ins, order.size())));
        std::sort(result.kept.begin(), result.kept.end());
    }
    return result;
}

}  // namespace sparsep
