#pragma once

#include "sparsep/optim.hpp"

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace sparsep
{

/// One Gaussian component of a pattern, positioned relative to the shift.
struct PatternPeak
{
    double weight = 1.0;
    double offset = 0.0;
    /// d offset / d params[1]; zero for single-parameter families.
    double d_offset = 0.0;
    /// Index of the learnable weight behind `weight`, or -1 when fixed.
    std::ptrdiff_t weight_index = -1;
};

/// A set of nonnegative continuous patterns y_{eta,theta}(s), each a weighted
/// sum of Gaussians that share the width theta[0] (in bins). A family may
/// have a second parameter that moves the component offsets.
class PatternFamily
{
public:
    /// Components further than this many widths from their center are zero.
    static constexpr double kCutoff = 10.0;

    virtual ~PatternFamily() = default;

    virtual std::size_t pattern_count() const = 0;
    virtual std::size_t param_count() const = 0;
    virtual std::vector<double> default_params() const = 0;
    virtual BoxSpec param_box() const = 0;
    virtual void peaks(std::size_t pattern, std::span<const double> params,
                       std::vector<PatternPeak>& out) const = 0;
    /// Number of learnable weights (dictionary entries) behind the patterns.
    virtual std::size_t weight_count() const { return 0; }

    double evaluate(std::size_t pattern, std::span<const double> params, double s) const;

    /// Smallest and largest offset reached by the pattern's truncated support.
    std::pair<double, double> support(std::size_t pattern, std::span<const double> params) const;
};

/// Single Gaussian peak exp(-s^2 / (2 sigma^2)), with sigma boxed to
/// [0.25, 4] times its default.
class GaussianFamily final : public PatternFamily
{
public:
    explicit GaussianFamily(double sigma_nil);

    std::size_t pattern_count() const override { return 1; }
    std::size_t param_count() const override { return 1; }
    std::vector<double> default_params() const override { return {sigma_nil_}; }
    BoxSpec param_box() const override;
    void peaks(std::size_t pattern, std::span<const double> params,
               std::vector<PatternPeak>& out) const override;

private:
    double sigma_nil_;
};

/// Patterns made of fixed (offset, weight) Gaussian components sharing one
/// width parameter. Mostly useful for exercising the pursuit on synthetic
/// spectra.
class TemplateFamily final : public PatternFamily
{
public:
    using Component = std::pair<double, double>;  // offset, weight

    TemplateFamily(std::vector<std::vector<Component>> patterns, double sigma_nil,
                   double sigma_lower, double sigma_upper);

    std::size_t pattern_count() const override { return patterns_.size(); }
    std::size_t param_count() const override { return 1; }
    std::vector<double> default_params() const override { return {sigma_nil_}; }
    BoxSpec param_box() const override { return {{lower_}, {upper_}}; }
    void peaks(std::size_t pattern, std::span<const double> params,
               std::vector<PatternPeak>& out) const override;

private:
    std::vector<std::vector<Component>> patterns_;
    double sigma_nil_;
    double lower_;
    double upper_;
};

}  // namespace sparsep
