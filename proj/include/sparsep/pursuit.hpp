#pragma once

#include "sparsep/optim.hpp"
#include "sparsep/pattern.hpp"

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace sparsep
{

enum class Selector
{
    /// Cross-correlation of the lifted residual with the default patterns.
    xcorr,
    /// Dominant local maxima of the residual (single-pattern families).
    peaks,
};

struct PursuitConfig
{
    /// Exponent of the lifted loss, in (0, 1].
    double q = 0.5;
    /// Offset keeping the lifted loss differentiable at zero.
    double delta = 1e-10;
    /// Iterations must shrink the loss below lambda times its previous value.
    double lambda = 0.9;
    /// Candidates added per iteration.
    std::size_t n_pre = 1;
    /// Maximum number of atoms per pattern.
    std::size_t n_spr = 1;
    /// Iteration limit; 0 selects 2 * n_spr * pattern_count.
    std::size_t n_itr = 0;
    Selector selector = Selector::xcorr;
    /// Half-width of the neighborhood a peak must dominate.
    std::size_t n_dom = 3;
    /// Peak candidates must be strictly higher than this.
    double min_height = 0.0;
    MinimizeOptions optimizer{};

    void validate() const;
    std::size_t iteration_limit(std::size_t pattern_count) const;
};

struct PursuitAtom
{
    double amplitude = 0.0;
    /// Shift in bins.
    double shift = 0.0;
    std::size_t pattern = 0;
    std::vector<double> params;
};

struct LossGradient
{
    double value = 0.0;
    std::vector<double> d_amplitude;
    std::vector<double> d_shift;
    std::vector<std::vector<double>> d_params;
    /// Gradient with respect to the family's learnable weights (only filled
    /// when requested).
    std::vector<double> d_weights;
};

/// sum_s ((Y[s] + delta)^q - (delta + sum_j a_j y_j(s - mu_j))^q)^2
double loss_value(std::span<const double> y, std::span<const PursuitAtom> atoms,
                  const PatternFamily& family, double q, double delta);

/// Loss value and analytic gradient with respect to every atom parameter
/// and, optionally, the family's learnable weights.
LossGradient loss_gradient(std::span<const double> y, std::span<const PursuitAtom> atoms,
                           const PatternFamily& family, double q, double delta,
                           bool with_weights = false);

/// sum_j a_j y_j(s - mu_j) sampled at s = 0..n-1.
std::vector<double> render(std::span<const PursuitAtom> atoms, const PatternFamily& family,
                           std::size_t n);

/// Lifted residual Y^q - (model)^q.
std::vector<double> lifted_residual(std::span<const double> y, std::span<const PursuitAtom> atoms,
                                    const PatternFamily& family, double q);

/// Cross-correlation selector. Precomputes the sampled default patterns
/// once and evaluates rho[mu, eta] for mu = 0..n-1 via FFT correlation.
class XcorrSelector
{
public:
    XcorrSelector(const PatternFamily& family, std::size_t n, double q);
    ~XcorrSelector();
    XcorrSelector(XcorrSelector&&) noexcept;
    XcorrSelector& operator=(XcorrSelector&&) noexcept;

    /// rho[eta * n + mu].
    std::vector<double> correlate(std::span<const double> residual) const;
    std::vector<PursuitAtom> select(std::span<const double> residual, std::size_t n_pick) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Up to n_pick (mu, eta) pairs with the largest rho, amplitudes
/// (rho / ||y^q||)^(1/q), default params; non-positive amplitudes dropped.
std::vector<PursuitAtom> select_xcorr(std::span<const double> residual, const PatternFamily& family,
                                      double q, std::size_t n_pick);

/// Direct O(n * support) evaluation of the same selection, used as a test oracle.
std::vector<PursuitAtom> select_xcorr_reference(std::span<const double> residual,
                                                const PatternFamily& family, double q,
                                                std::size_t n_pick);
std::vector<double> xcorr_reference(std::span<const double> residual, const PatternFamily& family,
                                    double q);

/// Up to n_pick local maxima of the residual that dominate their +-n_dom
/// neighborhood (strictly on the left, non-strictly on the right so a
/// plateau yields its lowest index), sorted by height. Heights must exceed
/// `min_height` and zero.
std::vector<PursuitAtom> select_peaks(std::span<const double> residual, const PatternFamily& family,
                                      std::size_t n_pick, std::size_t n_dom, double min_height = 0.0);

struct PursuitResult
{
    std::vector<PursuitAtom> atoms;
    double loss = 0.0;
    /// Sum of atom amplitudes per pattern.
    std::vector<double> amplitude_sums;
    std::size_t iterations = 0;
    /// Objective evaluations spent in refinement.
    std::size_t evaluations = 0;
};

/// Greedy sparse pursuit: select candidates from the lifted residual, refine
/// all atoms jointly under a >= 0 and params in the family box, keep the
/// n_spr strongest atoms per pattern, refine again, and stop when the loss
/// fails to shrink by the factor lambda (restoring the previous atoms) or
/// the iteration limit is reached.
PursuitResult pursue(std::span<const double> y, const PatternFamily& family, const PursuitConfig& cfg);

}  // namespace sparsep
