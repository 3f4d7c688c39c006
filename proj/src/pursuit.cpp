#include "sparsep/pursuit.hpp"

#include "sparsep/error.hpp"
#include "sparsep/fft.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>

namespace sparsep
{

void PursuitConfig::validate() const
{
    if (!(q > 0.0 && q <= 1.0))
        throw ConfigError("q must lie in (0, 1]");
    if (!(delta > 0.0))
        throw ConfigError("delta must be positive");
    if (!(lambda > 0.0 && lambda <= 1.0))
        throw ConfigError("lambda must lie in (0, 1]");
    if (n_pre == 0 || n_spr == 0)
        throw ConfigError("n_pre and n_spr must be at least 1");
    if (selector == Selector::peaks && n_dom == 0)
        throw ConfigError("peak dominance must be at least 1");
}

std::size_t PursuitConfig::iteration_limit(std::size_t pattern_count) const
{
    return n_itr > 0 ? n_itr : 2 * n_spr * pattern_count;
}

namespace
{

double lift(double v, double q)
{
    if (q == 1.0)
        return v;
    if (q == 0.5)
        return std::sqrt(v);
    return std::pow(v, q);
}

// Evaluates the lifted loss for atoms packed as [a, mu, theta...] per atom.
class LossEvaluator
{
public:
    LossEvaluator(std::span<const double> y, const PatternFamily& family, double q, double delta)
        : y_(y), family_(family), q_(q), delta_(delta), n_par_(family.param_count()),
          target_(y.size()), empty_(y.size()), model_(y.size(), 0.0), g_(y.size(), 0.0), stamp_(y.size(), 0)
    {
        const double floor = lift(delta, q);
        for (std::size_t s = 0; s < y.size(); ++s)
        {
            if (!(y[s] >= 0.0))
                throw DomainError("pursuit input must be nonnegative");
            target_[s] = lift(y[s] + delta, q);
            const double diff = target_[s] - floor;
            empty_[s] = diff * diff;
        }
    }

    std::size_t stride() const noexcept { return 2 + n_par_; }

    // Samples outside every atom's support contribute a precomputed constant.
    double eval(std::span<const double> x, std::span<const std::size_t> patterns,
                std::span<double> grad, std::span<double> wgrad)
    {
        const std::size_t n = y_.size();
        const std::size_t stride = this->stride();
        for (std::size_t s : touched_)
            model_[s] = 0.0;
        touched_.clear();
        records_.clear();
        exps_.clear();
        ++epoch_;

        for (std::size_t j = 0; j < patterns.size(); ++j)
        {
            const double a = x[j * stride];
            const double mu = x[j * stride + 1];
            const auto theta = x.subspan(j * stride + 2, n_par_);
            const double sigma = theta[0];
            const double inv2 = 1.0 / (2.0 * sigma * sigma);
            const double radius = PatternFamily::kCutoff * sigma;
            family_.peaks(patterns[j], theta, peaks_);
            for (const auto& p : peaks_)
            {
                const double c = mu + p.offset;
                const double lo_f = std::max(0.0, std::ceil(c - radius));
                const double hi_f = std::min(static_cast<double>(n) - 1.0, std::floor(c + radius));
                if (lo_f > hi_f)
                    continue;
                Record rec{j, p.weight, p.d_offset, p.weight_index, c,
                           static_cast<std::size_t>(lo_f), static_cast<std::size_t>(hi_f), exps_.size()};
                const double aw = a * p.weight;
                // exp(-(d+1)^2 k) = exp(-d^2 k) * exp(-(2d+1) k), with the
                // second factor advancing by exp(-2k) per sample.
                const double d0 = lo_f - c;
                double e = std::exp(-d0 * d0 * inv2);
                double r = std::exp(-(2.0 * d0 + 1.0) * inv2);
                const double rr = std::exp(-2.0 * inv2);
                for (std::size_t s = rec.lo; s <= rec.hi; ++s)
                {
                    exps_.push_back(e);
                    if (stamp_[s] != epoch_)
                    {
                        stamp_[s] = epoch_;
                        touched_.push_back(s);
                    }
                    model_[s] += aw * e;
                    e *= r;
                    r *= rr;
                }
                records_.push_back(rec);
            }
        }

        double value = 0.0;
        for (std::size_t s = 0; s < n; ++s)
        {
            if (stamp_[s] != epoch_)
            {
                value += empty_[s];
                continue;
            }
            const double base = delta_ + model_[s];
            const double lifted = lift(base, q_);
            const double diff = target_[s] - lifted;
            value += diff * diff;
            g_[s] = -2.0 * diff * q_ * lifted / base;
        }

        if (grad.empty() && wgrad.empty())
            return value;

        std::fill(grad.begin(), grad.end(), 0.0);
        for (const Record& rec : records_)
        {
            double s0 = 0.0, s1 = 0.0, s2 = 0.0;
            const double* e = exps_.data() + rec.start;
            for (std::size_t s = rec.lo; s <= rec.hi; ++s, ++e)
            {
                const double d = static_cast<double>(s) - rec.center;
                const double ge = g_[s] * *e;
                s0 += ge;
                s1 += ge * d;
                s2 += ge * d * d;
            }
            const std::size_t base = rec.atom * stride;
            const double a = x[base];
            const double sigma = x[base + 2];
            const double sig2 = sigma * sigma;
            if (!grad.empty())
            {
                grad[base] += rec.weight * s0;
                grad[base + 1] += a * rec.weight * s1 / sig2;
                grad[base + 2] += a * rec.weight * s2 / (sig2 * sigma);
                if (n_par_ > 1)
                    grad[base + 3] += a * rec.weight * rec.d_offset * s1 / sig2;
            }
            if (!wgrad.empty() && rec.weight_index >= 0)
                wgrad[static_cast<std::size_t>(rec.weight_index)] += a * s0;
        }
        return value;
    }

    /// Diagonal of the Gauss-Newton approximation of the Hessian at x,
    /// ignoring overlaps between an atom's own components.
    std::vector<double> gauss_newton_diagonal(std::span<const double> x, std::span<const std::size_t> patterns)
    {
        eval(x, patterns, {}, {});
        const std::size_t stride = this->stride();
        std::vector<double> diag(x.size(), 0.0);
        for (const Record& rec : records_)
        {
            double s0 = 0.0, s2 = 0.0, s4 = 0.0;
            const double* e = exps_.data() + rec.start;
            for (std::size_t s = rec.lo; s <= rec.hi; ++s, ++e)
            {
                const double base = delta_ + model_[s];
                const double dl = q_ * lift(base, q_) / base;
                const double w = dl * dl * *e * *e;
                const double d = static_cast<double>(s) - rec.center;
                const double d2 = d * d;
                s0 += w;
                s2 += w * d2;
                s4 += w * d2 * d2;
            }
            const std::size_t base = rec.atom * stride;
            const double a = x[base];
            const double sigma = x[base + 2];
            const double sig2 = sigma * sigma;
            const double w2 = rec.weight * rec.weight;
            diag[base] += 2.0 * w2 * s0;
            diag[base + 1] += 2.0 * a * a * w2 * s2 / (sig2 * sig2);
            diag[base + 2] += 2.0 * a * a * w2 * s4 / (sig2 * sig2 * sig2);
            if (n_par_ > 1)
                diag[base + 3] += 2.0 * a * a * w2 * rec.d_offset * rec.d_offset * s2 / (sig2 * sig2);
        }
        return diag;
    }

    double value(std::span<const PursuitAtom> atoms)
    {
        pack(atoms);
        return eval(packed_, patterns_, {}, {});
    }

    void pack(std::span<const PursuitAtom> atoms)
    {
        const std::size_t stride = this->stride();
        packed_.assign(atoms.size() * stride, 0.0);
        patterns_.resize(atoms.size());
        for (std::size_t j = 0; j < atoms.size(); ++j)
        {
            const PursuitAtom& at = atoms[j];
            if (at.params.size() != n_par_)
                throw DomainError("atom parameter count does not match the pattern family");
            if (at.pattern >= family_.pattern_count())
                throw DomainError("atom pattern index out of range");
            packed_[j * stride] = at.amplitude;
            packed_[j * stride + 1] = at.shift;
            std::copy(at.params.begin(), at.params.end(), packed_.begin() + static_cast<std::ptrdiff_t>(j * stride + 2));
            patterns_[j] = at.pattern;
        }
    }

    std::vector<double>& packed() { return packed_; }
    const std::vector<std::size_t>& patterns() const { return patterns_; }

private:
    struct Record
    {
        std::size_t atom;
        double weight;
        double d_offset;
        std::ptrdiff_t weight_index;
        double center;
        std::size_t lo;
        std::size_t hi;
        std::size_t start;
    };

    std::span<const double> y_;
    const PatternFamily& family_;
    double q_;
    double delta_;
    std::size_t n_par_;
    std::vector<double> target_;
    std::vector<double> empty_;
    std::vector<double> model_;
    std::vector<double> g_;
    std::vector<std::uint64_t> stamp_;
    std::vector<std::size_t> touched_;
    std::uint64_t epoch_ = 0;
    std::vector<Record> records_;
    std::vector<double> exps_;
    std::vector<PatternPeak> peaks_;
    std::vector<double> packed_;
    std::vector<std::size_t> patterns_;
};

RealFft& cached_fft(std::size_t size)
{
    thread_local std::map<std::size_t, RealFft> cache;
    auto it = cache.find(size);
    if (it == cache.end())
        it = cache.emplace(size, RealFft(size)).first;
    return it->second;
}

struct SampledPattern
{
    long first = 0;                // integer offset of lifted[0]
    std::vector<double> lifted;    // y(k)^q
    double norm = 0.0;             // || y^q ||_2
};

SampledPattern sample_pattern(const PatternFamily& family, std::size_t pattern,
                              std::span<const double> params, double q)
{
    const auto [lo, hi] = family.support(pattern, params);
    SampledPattern sp;
    sp.first = static_cast<long>(std::ceil(lo));
    const long last = static_cast<long>(std::floor(hi));
    for (long k = sp.first; k <= last; ++k)
    {
        const double v = family.evaluate(pattern, params, static_cast<double>(k));
        const double l = v > 0.0 ? lift(v, q) : 0.0;
        sp.lifted.push_back(l);
        sp.norm += l * l;
    }
    sp.norm = std::sqrt(sp.norm);
    return sp;
}

double l2(std::span<const double> r)
{
    double s = 0.0;
    for (double v : r)
        s += v * v;
    return std::sqrt(s);
}

// Picks the n_pick largest entries of rho (layout [eta * n + mu]).
std::vector<PursuitAtom> pick_candidates(std::span<const double> rho, std::size_t n,
                                         const std::vector<double>& norms, double q,
                                         double noise_floor, std::size_t n_pick,
                                         const std::vector<double>& default_params)
{
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < rho.size(); ++i)
        if (rho[i] > noise_floor)
            idx.push_back(i);
    const std::size_t keep = std::min(n_pick, idx.size());
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(keep), idx.end(),
                      [&](std::size_t a, std::size_t b) {
                          return rho[a] > rho[b] || (rho[a] == rho[b] && a < b);
                      });
    std::vector<PursuitAtom> out;
    for (std::size_t k = 0; k < keep; ++k)
    {
        const std::size_t i = idx[k];
        const std::size_t eta = i / n;
        const double a = std::pow(rho[i] / norms[eta], 1.0 / q);
        if (!(a > 0.0))
            continue;
        out.push_back(PursuitAtom{a, static_cast<double>(i % n), eta, default_params});
    }
    return out;
}

}  // namespace

double loss_value(std::span<const double> y, std::span<const PursuitAtom> atoms,
                  const PatternFamily& family, double q, double delta)
{
    LossEvaluator ev(y, family, q, delta);
    return ev.value(atoms);
}

LossGradient loss_gradient(std::span<const double> y, std::span<const PursuitAtom> atoms,
                           const PatternFamily& family, double q, double delta, bool with_weights)
{
    LossEvaluator ev(y, family, q, delta);
    ev.pack(atoms);
    const std::size_t stride = ev.stride();
    std::vector<double> grad(atoms.size() * stride);
    LossGradient out;
    if (with_weights)
        out.d_weights.assign(family.weight_count(), 0.0);
    out.value = ev.eval(ev.packed(), ev.patterns(), grad, out.d_weights);
    for (std::size_t j = 0; j < atoms.size(); ++j)
    {
        out.d_amplitude.push_back(grad[j * stride]);
        out.d_shift.push_back(grad[j * stride + 1]);
        out.d_params.emplace_back(grad.begin() + static_cast<std::ptrdiff_t>(j * stride + 2),
                                  grad.begin() + static_cast<std::ptrdiff_t>((j + 1) * stride));
    }
    return out;
}

std::vector<double> render(std::span<const PursuitAtom> atoms, const PatternFamily& family,
                           std::size_t n)
{
    std::vector<double> model(n, 0.0);
    std::vector<PatternPeak> pk;
    for (const auto& at : atoms)
    {
        const double sigma = at.params.at(0);
        const double inv2 = 1.0 / (2.0 * sigma * sigma);
        const double radius = PatternFamily::kCutoff * sigma;
        family.peaks(at.pattern, at.params, pk);
        for (const auto& p : pk)
        {
            const double c = at.shift + p.offset;
            const double lo = std::max(0.0, std::ceil(c - radius));
            const double hi = std::min(static_cast<double>(n) - 1.0, std::floor(c + radius));
            for (double s = lo; s <= hi; s += 1.0)
                model[static_cast<std::size_t>(s)] +=
                    at.amplitude * p.weight * std::exp(-(s - c) * (s - c) * inv2);
        }
    }
    return model;
}

std::vector<double> lifted_residual(std::span<const double> y, std::span<const PursuitAtom> atoms,
                                    const PatternFamily& family, double q)
{
    std::vector<double> r = render(atoms, family, y.size());
    for (std::size_t s = 0; s < y.size(); ++s)
        r[s] = lift(y[s], q) - lift(r[s], q);
    return r;
}

struct XcorrSelector::Impl
{
    std::size_t n = 0;
    double q = 1.0;
    std::size_t fft_size = 0;
    std::vector<double> default_params;
    std::vector<SampledPattern> patterns;
    std::vector<double> norms;
    std::vector<std::vector<std::complex<double>>> spectra;
};

XcorrSelector::XcorrSelector(const PatternFamily& family, std::size_t n, double q)
    : impl_(std::make_unique<Impl>())
{
    Impl& im = *impl_;
    im.n = n;
    im.q = q;
    im.default_params = family.default_params();
    long max_hi = 0;
    long min_lo = 0;
    for (std::size_t eta = 0; eta < family.pattern_count(); ++eta)
    {
        SampledPattern sp = sample_pattern(family, eta, im.default_params, q);
        min_lo = std::min(min_lo, sp.first);
        max_hi = std::max(max_hi, sp.first + static_cast<long>(sp.lifted.size()));
        im.norms.push_back(sp.norm);
        im.patterns.push_back(std::move(sp));
    }
    const std::size_t needed = n + static_cast<std::size_t>(max_hi - min_lo) + 1;
    im.fft_size = 2;
    while (im.fft_size < needed)
        im.fft_size *= 2;

    RealFft& fft = cached_fft(im.fft_size);
    std::vector<double> buf(im.fft_size);
    for (const auto& sp : im.patterns)
    {
        std::fill(buf.begin(), buf.end(), 0.0);
        std::copy(sp.lifted.begin(), sp.lifted.end(), buf.begin());
        std::vector<std::complex<double>> spec(fft.spectrum_size());
        fft.forward(buf, spec);
        for (auto& c : spec)
            c = std::conj(c);
        im.spectra.push_back(std::move(spec));
    }
}

XcorrSelector::~XcorrSelector() = default;
XcorrSelector::XcorrSelector(XcorrSelector&&) noexcept = default;
XcorrSelector& XcorrSelector::operator=(XcorrSelector&&) noexcept = default;

std::vector<double> XcorrSelector::correlate(std::span<const double> residual) const
{
    const Impl& im = *impl_;
    if (residual.size() != im.n)
        throw DomainError("residual length does not match selector");
    RealFft& fft = cached_fft(im.fft_size);
    const std::size_t N = im.fft_size;
    std::vector<double> buf(N, 0.0);
    std::copy(residual.begin(), residual.end(), buf.begin());
    std::vector<std::complex<double>> rspec(fft.spectrum_size()), prod(fft.spectrum_size());
    fft.forward(buf, rspec);

    std::vector<double> rho(im.patterns.size() * im.n);
    for (std::size_t eta = 0; eta < im.patterns.size(); ++eta)
    {
        for (std::size_t k = 0; k < prod.size(); ++k)
            prod[k] = rspec[k] * im.spectra[eta][k];
        fft.inverse(prod, buf);
        const SampledPattern& sp = im.patterns[eta];
        const double scale = 1.0 / (static_cast<double>(N) * sp.norm);
        for (std::size_t mu = 0; mu < im.n; ++mu)
        {
            // c[tau] with tau = mu + first, taken modulo N.
            const long tau = static_cast<long>(mu) + sp.first;
            const auto wrapped = static_cast<std::size_t>((tau % static_cast<long>(N) + static_cast<long>(N)) %
                                                          static_cast<long>(N));
            rho[eta * im.n + mu] = sp.norm > 0.0 ? buf[wrapped] * scale : 0.0;
        }
    }
    return rho;
}

std::vector<PursuitAtom> XcorrSelector::select(std::span<const double> residual,
                                               std::size_t n_pick) const
{
    const auto rho = correlate(residual);
    // rho is bounded by ||r||_2; anything this small is FFT round-off.
    const double floor = 1e-12 * l2(residual);
    return pick_candidates(rho, impl_->n, impl_->norms, impl_->q, floor, n_pick,
                           impl_->default_params);
}

std::vector<PursuitAtom> select_xcorr(std::span<const double> residual, const PatternFamily& family,
                                      double q, std::size_t n_pick)
{
    return XcorrSelector(family, residual.size(), q).select(residual, n_pick);
}

std::vector<double> xcorr_reference(std::span<const double> residual, const PatternFamily& family,
                                    double q)
{
    const std::size_t n = residual.size();
    const auto params = family.default_params();
    std::vector<double> rho(family.pattern_count() * n, 0.0);
    for (std::size_t eta = 0; eta < family.pattern_count(); ++eta)
    {
        const SampledPattern sp = sample_pattern(family, eta, params, q);
        for (std::size_t mu = 0; mu < n; ++mu)
        {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i)
            {
                const long k = static_cast<long>(i) - static_cast<long>(mu) - sp.first;
                if (k >= 0 && k < static_cast<long>(sp.lifted.size()))
                    acc += residual[i] * sp.lifted[static_cast<std::size_t>(k)];
            }
            rho[eta * n + mu] = sp.norm > 0.0 ? acc / sp.norm : 0.0;
        }
    }
    return rho;
}

std::vector<PursuitAtom> select_xcorr_reference(std::span<const double> residual,
                                                const PatternFamily& family, double q,
                                                std::size_t n_pick)
{
    const auto rho = xcorr_reference(residual, family, q);
    const auto params = family.default_params();
    std::vector<double> norms;
    for (std::size_t eta = 0; eta < family.pattern_count(); ++eta)
        norms.push_back(sample_pattern(family, eta, params, q).norm);
    return pick_candidates(rho, residual.size(), norms, q, 0.0, n_pick, params);
}

std::vector<PursuitAtom> select_peaks(std::span<const double> residual, const PatternFamily& family,
                                      std::size_t n_pick, std::size_t n_dom, double min_height)
{
    const std::size_t n = residual.size();
    std::vector<std::size_t> found;
    for (std::size_t i = 0; i < n; ++i)
    {
        const double v = residual[i];
        if (!(v > 0.0) || !(v > min_height))
            continue;
        bool dominant = true;
        for (std::size_t k = 1; k <= n_dom && dominant; ++k)
        {
            if (i >= k && !(v > residual[i - k]))
                dominant = false;
            if (i + k < n && !(v >= residual[i + k]))
                dominant = false;
        }
        if (dominant)
            found.push_back(i);
    }
    const std::size_t keep = std::min(n_pick, found.size());
    std::partial_sort(found.begin(), found.begin() + static_cast<std::ptrdiff_t>(keep), found.end(),
                      [&](std::size_t a, std::size_t b) {
                          return residual[a] > residual[b] || (residual[a] == residual[b] && a < b);
                      });
    const auto params = family.default_params();
    std::vector<PursuitAtom> out;
    for (std::size_t k = 0; k < keep; ++k)
        out.push_back(PursuitAtom{residual[found[k]], static_cast<double>(found[k]), 0, params});
    return out;
}

namespace
{

std::size_t refine(LossEvaluator& ev, std::vector<PursuitAtom>& atoms, const PatternFamily& family,
                   const MinimizeOptions& options)
{
    if (atoms.empty())
        return 0;
    ev.pack(atoms);
    const std::size_t stride = ev.stride();
    const BoxSpec theta_box = family.param_box();
    BoxSpec box = BoxSpec::unbounded(atoms.size() * stride);
    for (std::size_t j = 0; j < atoms.size(); ++j)
    {
        box.lower[j * stride] = 0.0;
        for (std::size_t p = 0; p < theta_box.size(); ++p)
        {
            box.lower[j * stride + 2 + p] = theta_box.lower[p];
            box.upper[j * stride + 2 + p] = theta_box.upper[p];
        }
    }
    const std::vector<std::size_t> patterns = ev.patterns();
    const std::vector<double> x0 = ev.packed();

    // Optimize in variables scaled by the square root of the Gauss-Newton
    // diagonal at the start; this equalizes the curvature of strong and weak
    // atoms and leaves the minimizer unchanged.
    std::vector<double> scale = ev.gauss_newton_diagonal(x0, patterns);
    for (std::size_t j = 0; j < atoms.size(); ++j)
    {
        double top = 0.0;
        for (std::size_t k = 0; k < stride; ++k)
            top = std::max(top, scale[j * stride + k]);
        for (std::size_t k = 0; k < stride; ++k)
        {
            double& v = scale[j * stride + k];
            v = std::sqrt(std::max(v, 1e-8 * top));
            if (!(v > 0.0) || !std::isfinite(v))
                v = 1.0;
        }
    }
    std::vector<double> z0(x0.size());
    BoxSpec zbox = box;
    for (std::size_t i = 0; i < x0.size(); ++i)
    {
        z0[i] = x0[i] * scale[i];
        zbox.lower[i] *= scale[i];
        zbox.upper[i] *= scale[i];
    }
    std::vector<double> xs(x0.size());
    const Objective objective = [&](std::span<const double> z, std::span<double> grad) {
        for (std::size_t i = 0; i < z.size(); ++i)
            xs[i] = std::clamp(z[i] / scale[i], box.lower[i], box.upper[i]);
        const double f = ev.eval(xs, patterns, grad, {});
        for (std::size_t i = 0; i < grad.size(); ++i)
            grad[i] /= scale[i];
        return f;
    };
    const MinimizeResult res = minimize_box(objective, z0, zbox, options);
    for (std::size_t j = 0; j < atoms.size(); ++j)
    {
        atoms[j].amplitude = std::clamp(res.x[j * stride] / scale[j * stride], box.lower[j * stride],
                                        box.upper[j * stride]);
        atoms[j].shift = res.x[j * stride + 1] / scale[j * stride + 1];
        for (std::size_t p = 0; p < atoms[j].params.size(); ++p)
        {
            const std::size_t i = j * stride + 2 + p;
            atoms[j].params[p] = std::clamp(res.x[i] / scale[i], box.lower[i], box.upper[i]);
        }
    }
    return res.evals;
}

bool enforce_sparsity(std::vector<PursuitAtom>& atoms, std::size_t n_spr, std::size_t n_pat)
{
    std::vector<std::vector<std::size_t>> by_pattern(n_pat);
    for (std::size_t j = 0; j < atoms.size(); ++j)
        by_pattern[atoms[j].pattern].push_back(j);
    std::vector<char> keep(atoms.size(), 1);
    bool removed = false;
    for (auto& group : by_pattern)
    {
        if (group.size() <= n_spr)
            continue;
        std::stable_sort(group.begin(), group.end(), [&](std::size_t a, std::size_t b) {
            return atoms[a].amplitude > atoms[b].amplitude;
        });
        for (std::size_t k = n_spr; k < group.size(); ++k)
            keep[group[k]] = 0;
        removed = true;
    }
    if (removed)
    {
        std::vector<PursuitAtom> kept;
        for (std::size_t j = 0; j < atoms.size(); ++j)
            if (keep[j])
                kept.push_back(std::move(atoms[j]));
        atoms = std::move(kept);
    }
    return removed;
}

// Removes atoms that contribute nothing on the sampled grid.
void drop_inactive(std::vector<PursuitAtom>& atoms, const PatternFamily& family, std::size_t n)
{
    std::erase_if(atoms, [&](const PursuitAtom& at) {
        if (!(at.amplitude > 0.0))
            return true;
        const auto [lo, hi] = family.support(at.pattern, at.params);
        return at.shift + hi < 0.0 || at.shift + lo > static_cast<double>(n) - 1.0;
    });
}

}  // namespace

PursuitResult pursue(std::span<const double> y, const PatternFamily& family, const PursuitConfig& cfg)
{
    cfg.validate();
    const std::size_t n_pat = family.pattern_count();
    if (cfg.selector == Selector::peaks && n_pat != 1)
        throw ConfigError("the peak selector needs a single-pattern family");

    PursuitResult result;
    result.amplitude_sums.assign(n_pat, 0.0);
    LossEvaluator ev(y, family, cfg.q, cfg.delta);
    double loss = ev.value({});
    result.loss = loss;
    if (std::none_of(y.begin(), y.end(), [](double v) { return v > 0.0; }))
        return result;

    std::unique_ptr<XcorrSelector> xcorr;
    if (cfg.selector == Selector::xcorr)
        xcorr = std::make_unique<XcorrSelector>(family, y.size(), cfg.q);

    std::vector<PursuitAtom> atoms;
    const std::size_t limit = cfg.iteration_limit(n_pat);
    for (std::size_t it = 0; it < limit; ++it)
    {
        const auto residual = lifted_residual(y, atoms, family, cfg.q);
        auto candidates = xcorr ? xcorr->select(residual, cfg.n_pre)
                                : select_peaks(residual, family, cfg.n_pre, cfg.n_dom, cfg.min_height);
        if (candidates.empty())
            break;

        std::vector<PursuitAtom> trial = atoms;
        trial.insert(trial.end(), std::make_move_iterator(candidates.begin()),
                     std::make_move_iterator(candidates.end()));
        result.evaluations += refine(ev, trial, family, cfg.optimizer);
        if (enforce_sparsity(trial, cfg.n_spr, n_pat))
            result.evaluations += refine(ev, trial, family, cfg.optimizer);
        drop_inactive(trial, family, y.size());

        const double trial_loss = ev.value(trial);
        ++result.iterations;
        if (!(trial_loss < cfg.lambda * loss))
            break;
        atoms = std::move(trial);
        loss = trial_loss;
    }

    result.atoms = std::move(atoms);
    result.loss = loss;
    for (const auto& at : result.atoms)
        result.amplitude_sums[at.pattern] += at.amplitude;
    return result;
}

}  // namespace sparsep
