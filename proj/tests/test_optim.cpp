#include "doctest.h"

#include "sparsep/error.hpp"
#include "sparsep/optim.hpp"

#include <cmath>
#include <random>

using namespace sparsep;

namespace
{

double rosenbrock(std::span<const double> x, std::span<double> g)
{
    double f = 0.0;
    std::fill(g.begin(), g.end(), 0.0);
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
    {
        const double a = x[i + 1] - x[i] * x[i];
        const double b = 1.0 - x[i];
        f += 100.0 * a * a + b * b;
        g[i] += -400.0 * a * x[i] - 2.0 * b;
        g[i + 1] += 200.0 * a;
    }
    return f;
}

}  // namespace

TEST_CASE("box projection and containment")
{
    BoxSpec box{{0.0, -1.0}, {1.0, 1.0}};
    std::vector<double> x{2.0, -3.0};
    CHECK_FALSE(box.contains(x));
    box.project(x);
    CHECK(x == std::vector<double>{1.0, -1.0});
    CHECK(box.contains(x));
    CHECK(BoxSpec::unbounded(3).contains(std::vector<double>{1e300, -1e300, 0.0}));
    BoxSpec bad{{1.0}, {0.0}};
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("unconstrained Rosenbrock converges")
{
    const std::vector<double> x0{-1.2, 1.0, -0.5, 0.3};
    MinimizeOptions opt;
    opt.max_evals = 5000;
    const auto res = minimize_box(rosenbrock, x0, BoxSpec::unbounded(4), opt);
    CHECK(res.f < 1e-12);
    for (double v : res.x)
        CHECK(v == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("bound-constrained quadratic lands on the projected minimizer")
{
    // f = sum (x_i - c_i)^2 with c outside the box: the solution is clamp(c).
    const std::vector<double> c{2.0, -0.5, 0.3, -4.0};
    auto f = [&](std::span<const double> x, std::span<double> g) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
        {
            s += (x[i] - c[i]) * (x[i] - c[i]);
            g[i] = 2.0 * (x[i] - c[i]);
        }
        return s;
    };
    const BoxSpec box{{0.0, 0.0, 0.0, -1.0}, {1.0, 1.0, 1.0, 1.0}};
    const auto res = minimize_box(f, std::vector<double>{0.5, 0.5, 0.5, 0.5}, box);
    CHECK(res.x[0] == doctest::Approx(1.0));
    CHECK(res.x[1] == doctest::Approx(0.0));
    CHECK(res.x[2] == doctest::Approx(0.3));
    CHECK(res.x[3] == doctest::Approx(-1.0));
    CHECK(box.contains(res.x));
}

TEST_CASE("bounded Rosenbrock stays feasible and never increases f")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    const BoxSpec box{{-1.5, 0.2, -1.5}, {0.8, 1.5, 0.9}};
    for (int trial = 0; trial < 20; ++trial)
    {
        std::vector<double> x0{u(rng), u(rng), u(rng)};
        box.project(x0);
        std::vector<double> g(3);
        const double f0 = rosenbrock(x0, g);
        const auto res = minimize_box(rosenbrock, x0, box);
        CHECK(box.contains(res.x));
        CHECK(res.f <= f0);
    }
}

TEST_CASE("infeasible start is projected")
{
    const auto res = minimize_box(rosenbrock, std::vector<double>{5.0, 5.0}, BoxSpec{{-2, -2}, {2, 2}});
    CHECK(res.x[0] <= 2.0);
    CHECK(res.x[1] <= 2.0);
}

TEST_CASE("non-finite objective raises")
{
    auto f = [](std::span<const double> x, std::span<double> g) {
        g[0] = 1.0;
        return x[0] < 0.5 ? std::nan("") : x[0];
    };
    CHECK_THROWS_AS(minimize_box(f, std::vector<double>{1.0}, BoxSpec::unbounded(1)),
                    OptimizationError);
}

TEST_CASE("Adam with one row matches per-entry Adam")
{
    std::mt19937_64 rng(9);
    std::normal_distribution<double> n(0.0, 0.01);
    const std::size_t cols = 4;
    AdamState st(1, cols);
    std::vector<double> d{0.2, 0.5, 0.7, 0.9};
    std::vector<double> ref = d, m(cols, 0.0), v(cols, 0.0);
    std::vector<std::size_t> all{0, 1, 2, 3};
    for (int t = 1; t <= 200; ++t)
    {
        std::vector<double> g(cols);
        for (double& x : g)
            x = n(rng);
        adam_step(d, st, g, all);
        for (std::size_t i = 0; i < cols; ++i)
        {
            m[i] = 0.9 * m[i] + 0.1 * g[i];
            v[i] = 0.999 * v[i] + 0.001 * g[i] * g[i];
            const double mh = m[i] / (1.0 - std::pow(0.9, t));
            const double vh = v[i] / (1.0 - std::pow(0.999, t));
            ref[i] = std::clamp(ref[i] - 1e-3 * mh / std::sqrt(vh + 1e-8), 0.0, 1.0);
        }
    }
    for (std::size_t i = 0; i < cols; ++i)
        CHECK(std::abs(d[i] - ref[i]) < 1e-12);
}

TEST_CASE("Adam second moment is shared across a column")
{
    AdamState st(3, 1);
    st.epsilon = 0.0;
    std::vector<double> d{0.5, 0.5, 0.5};
    const std::vector<double> g{3.0, -4.0, 0.0};
    const std::vector<std::size_t> all{0};
    adam_step(d, st, g, all);
    // Constant gradient: v1_hat = g, v2_hat = mean(g^2) = 25/3.
    const double rms = std::sqrt(25.0 / 3.0);
    CHECK(d[0] == doctest::Approx(0.5 - 1e-3 * 3.0 / rms).epsilon(1e-14));
    CHECK(d[1] == doctest::Approx(0.5 + 1e-3 * 4.0 / rms).epsilon(1e-14));
    CHECK(d[2] == 0.5);
    CHECK(st.tau[0] == 1);
}

TEST_CASE("Adam touches only active columns and clamps")
{
    AdamState st(2, 2);
    std::vector<double> d{1.0, 0.0, 0.4, 0.4};
    const std::vector<double> g{-1.0, 1.0, 1.0, 1.0};
    const std::vector<std::size_t> first{0};
    adam_step(d, st, g, first);
    CHECK(d[0] == 1.0);
    CHECK(d[1] == 0.0);
    CHECK(d[2] == 0.4);
    CHECK(st.tau[1] == 0);
    st.reset_column(0);
    CHECK(st.tau[0] == 0);
    CHECK(st.v1[0] == 0.0);
    CHECK(st.v2[0] == 0.0);
}
