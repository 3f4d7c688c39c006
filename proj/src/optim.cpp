#include "sparsep/optim.hpp"

#include "sparsep/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

namespace sparsep
{

BoxSpec BoxSpec::unbounded(std::size_t n)
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    return BoxSpec{std::vector<double>(n, -inf), std::vector<double>(n, inf)};
}

bool BoxSpec::contains(std::span<const double> x) const noexcept
{
    if (x.size() != lower.size())
        return false;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] < lower[i] || x[i] > upper[i])
            return false;
    return true;
}

void BoxSpec::project(std::span<double> x) const noexcept
{
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = std::clamp(x[i], lower[i], upper[i]);
}

void BoxSpec::validate() const
{
    if (lower.size() != upper.size())
        throw DomainError("box bound vectors differ in length");
    for (std::size_t i = 0; i < lower.size(); ++i)
        if (!(lower[i] <= upper[i]))
            throw DomainError("box lower bound exceeds upper bound at index " + std::to_string(i));
}

namespace
{

double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

struct Pair
{
    std::vector<double> s;
    std::vector<double> y;
    double rho;
};

// r <- H g using the two-loop recursion over the stored pairs.
void two_loop(const std::deque<Pair>& memory, std::vector<double>& r)
{
    std::vector<double> alpha(memory.size());
    for (std::size_t k = memory.size(); k-- > 0;)
    {
        const Pair& p = memory[k];
        alpha[k] = p.rho * dot(p.s, r);
        for (std::size_t i = 0; i < r.size(); ++i)
            r[i] -= alpha[k] * p.y[i];
    }
    if (!memory.empty())
    {
        const Pair& last = memory.back();
        const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
        for (double& v : r)
            v *= gamma;
    }
    for (std::size_t k = 0; k < memory.size(); ++k)
    {
        const Pair& p = memory[k];
        const double beta = p.rho * dot(p.y, r);
        for (std::size_t i = 0; i < r.size(); ++i)
            r[i] += (alpha[k] - beta) * p.s[i];
    }
}

}  // namespace

MinimizeResult minimize_box(const Objective& objective, std::span<const double> x0,
                            const BoxSpec& box, const MinimizeOptions& options)
{
    box.validate();
    const std::size_t n = x0.size();
    if (box.size() != n)
        throw DomainError("box dimension does not match starting point");

    MinimizeResult res;
    res.x.assign(x0.begin(), x0.end());
    box.project(res.x);

    std::vector<double> g(n);
    res.f = objective(res.x, g);
    res.evals = 1;
    if (!std::isfinite(res.f))
        throw OptimizationError("objective is not finite at the starting point", res.x);
    if (n == 0)
    {
        res.converged = true;
        return res;
    }

    std::deque<Pair> memory;
    std::vector<double> d(n), xt(n), gt(n);
    std::vector<char> frozen(n);

    while (true)
    {
        double pg = 0.0;
        for (std::size_t i = 0; i < n; ++i)
        {
            const double moved = std::clamp(res.x[i] - g[i], box.lower[i], box.upper[i]);
            pg = std::max(pg, std::abs(moved - res.x[i]));
            frozen[i] = (res.x[i] <= box.lower[i] && g[i] > 0.0) ||
                        (res.x[i] >= box.upper[i] && g[i] < 0.0);
        }
        if (pg <= options.pg_tolerance)
        {
            res.converged = true;
            break;
        }
        if (res.evals >= options.max_evals)
            break;

        for (std::size_t i = 0; i < n; ++i)
            d[i] = frozen[i] ? 0.0 : g[i];
        two_loop(memory, d);
        for (std::size_t i = 0; i < n; ++i)
            d[i] = frozen[i] ? 0.0 : -d[i];
        double slope = dot(d, g);
        if (!(slope < 0.0))
        {
            memory.clear();
            for (std::size_t i = 0; i < n; ++i)
                d[i] = frozen[i] ? 0.0 : -g[i];
            slope = dot(d, g);
        }

        double alpha = 1.0;
        if (memory.empty())
        {
            double dmax = 0.0;
            for (double v : d)
                dmax = std::max(dmax, std::abs(v));
            alpha = std::min(1.0, 1.0 / dmax);
        }

        bool accepted = false;
        double ft = 0.0;
        for (int trial = 0; trial < 50 && res.evals < options.max_evals; ++trial)
        {
            bool moved = false;
            for (std::size_t i = 0; i < n; ++i)
            {
                xt[i] = std::clamp(res.x[i] + alpha * d[i], box.lower[i], box.upper[i]);
                moved = moved || xt[i] != res.x[i];
            }
            if (!moved)
                break;
            ft = objective(xt, gt);
            ++res.evals;
            if (std::isnan(ft))
                throw OptimizationError("objective returned NaN", res.x);
            double decrease = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                decrease += g[i] * (xt[i] - res.x[i]);
            if (std::isfinite(ft) && ft <= res.f + 1e-4 * decrease)
            {
                accepted = true;
                break;
            }
            // Safeguarded quadratic interpolation of the step length.
            double next = 0.5 * alpha;
            if (std::isfinite(ft))
            {
                const double denom = 2.0 * (ft - res.f - slope * alpha);
                if (denom > 0.0)
                    next = std::clamp(-slope * alpha * alpha / denom, 0.1 * alpha, 0.5 * alpha);
            }
            alpha = next;
        }

        if (!accepted)
        {
            if (memory.empty())
                break;
            memory.clear();
            continue;
        }

        Pair p{std::vector<double>(n), std::vector<double>(n), 0.0};
        for (std::size_t i = 0; i < n; ++i)
        {
            p.s[i] = xt[i] - res.x[i];
            p.y[i] = gt[i] - g[i];
        }
        const double sy = dot(p.s, p.y);
        if (sy > 1e-12 * std::sqrt(dot(p.s, p.s) * dot(p.y, p.y)) && sy > 0.0)
        {
            p.rho = 1.0 / sy;
            memory.push_back(std::move(p));
            if (memory.size() > options.memory)
                memory.pop_front();
        }

        const double previous = res.f;
        res.x.swap(xt);
        g.swap(gt);
        res.f = ft;
        ++res.iterations;

        const double scale = std::max({std::abs(previous), std::abs(ft),
                                       std::numeric_limits<double>::min()});
        if (previous - ft <= options.f_tolerance * scale)
        {
            res.converged = true;
            break;
        }
    }
    return res;
}

AdamState::AdamState(std::size_t n_rows, std::size_t n_cols)
    : rows(n_rows), cols(n_cols), v1(n_rows * n_cols, 0.0), v2(n_cols, 0.0), tau(n_cols, 0)
{
}

void AdamState::reset_column(std::size_t col)
{
    std::fill_n(v1.begin() + static_cast<std::ptrdiff_t>(col * rows), rows, 0.0);
    v2[col] = 0.0;
    tau[col] = 0;
}

void adam_step(std::span<double> values, AdamState& state, std::span<const double> gradient,
               std::span<const std::size_t> active)
{
    const std::size_t rows = state.rows;
    if (values.size() != rows * state.cols || gradient.size() != values.size())
        throw DomainError("Adam step: matrix sizes do not match optimizer state");

    for (std::size_t col : active)
    {
        if (col >= state.cols)
            throw DomainError("Adam step: column index out of range");
        const std::size_t off = col * rows;
        state.tau[col] += 1;

        double mean_sq = 0.0;
        for (std::size_t h = 0; h < rows; ++h)
        {
            const double gh = gradient[off + h];
            state.v1[off + h] = state.beta1 * state.v1[off + h] + (1.0 - state.beta1) * gh;
            mean_sq += gh * gh;
        }
        mean_sq /= static_cast<double>(rows);
        state.v2[col] = state.beta2 * state.v2[col] + (1.0 - state.beta2) * mean_sq;

        const double t = static_cast<double>(state.tau[col]);
        const double c1 = 1.0 - std::pow(state.beta1, t);
        const double c2 = 1.0 - std::pow(state.beta2, t);
        const double denom = std::sqrt(state.v2[col] / c2 + state.epsilon);
        for (std::size_t h = 0; h < rows; ++h)
        {
            const double v1_hat = state.v1[off + h] / c1;
            values[off + h] = std::clamp(values[off + h] - state.kappa * v1_hat / denom, 0.0, 1.0);
        }
    }
}

}  // namespace sparsep
