#include "sparsep/pattern.hpp"

#include "sparsep/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sparsep
{

double PatternFamily::evaluate(std::size_t pattern, std::span<const double> params, double s) const
{
    std::vector<PatternPeak> pk;
    peaks(pattern, params, pk);
    const double sigma = params[0];
    double v = 0.0;
    for (const auto& p : pk)
    {
        const double x = (s - p.offset) / sigma;
        if (std::abs(x) <= kCutoff)
            v += p.weight * std::exp(-0.5 * x * x);
    }
    return v;
}

std::pair<double, double> PatternFamily::support(std::size_t pattern,
                                                 std::span<const double> params) const
{
    std::vector<PatternPeak> pk;
    peaks(pattern, params, pk);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& p : pk)
    {
        lo = std::min(lo, p.offset);
        hi = std::max(hi, p.offset);
    }
    const double r = kCutoff * params[0];
    return {lo - r, hi + r};
}

GaussianFamily::GaussianFamily(double sigma_nil) : sigma_nil_(sigma_nil)
{
    if (!(sigma_nil > 0.0))
        throw DomainError("Gaussian width must be positive");
}

BoxSpec GaussianFamily::param_box() const
{
    return {{0.25 * sigma_nil_}, {4.0 * sigma_nil_}};
}

void GaussianFamily::peaks(std::size_t, std::span<const double>, std::vector<PatternPeak>& out) const
{
    out.assign(1, PatternPeak{});
}

TemplateFamily::TemplateFamily(std::vector<std::vector<Component>> patterns, double sigma_nil,
                               double sigma_lower, double sigma_upper)
    : patterns_(std::move(patterns)), sigma_nil_(sigma_nil), lower_(sigma_lower), upper_(sigma_upper)
{
    if (patterns_.empty())
        throw DomainError("template family needs at least one pattern");
    if (!(sigma_lower > 0.0) || !(sigma_lower <= sigma_nil) || !(sigma_nil <= sigma_upper))
        throw DomainError("template family width box must be positive and contain the default");
    for (const auto& p : patterns_)
        for (const auto& [offset, weight] : p)
            if (!(weight >= 0.0))
                throw DomainError("template weights must be nonnegative");
}

void TemplateFamily::peaks(std::size_t pattern, std::span<const double>,
                           std::vector<PatternPeak>& out) const
{
    out.clear();
    for (const auto& [offset, weight] : patterns_.at(pattern))
        out.push_back(PatternPeak{weight, offset, 0.0, -1});
}

}  // namespace sparsep
