#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace sparsep
{

/// Per-coordinate bounds; infinite entries are allowed.
struct BoxSpec
{
    std::vector<double> lower;
    std::vector<double> upper;

    static BoxSpec unbounded(std::size_t n);
    std::size_t size() const noexcept { return lower.size(); }
    bool contains(std::span<const double> x) const noexcept;
    void project(std::span<double> x) const noexcept;
    /// Throws DomainError if the sizes differ or some lower > upper.
    void validate() const;
};

/// Objective callback: returns f(x) and writes the gradient into `grad`.
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct MinimizeOptions
{
    std::size_t max_evals = 1000;
    std::size_t memory = 10;
    /// Stop when the projected gradient's max-norm falls below this.
    double pg_tolerance = 1e-10;
    /// Stop when an accepted step reduces f by less than this fraction.
    double f_tolerance = 1e-13;
};

struct MinimizeResult
{
    std::vector<double> x;
    double f = 0.0;
    std::size_t evals = 0;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Limited-memory quasi-Newton minimization subject to box bounds. Bound
/// constraints are handled by gradient projection: coordinates held at a
/// bound by the gradient are frozen for the step, the two-loop recursion
/// acts on the rest, and the step follows the projected path with an Armijo
/// backtracking search. The returned point is the best iterate seen, is
/// inside the box, and never has a larger objective than x0 (which must be
/// feasible; it is projected otherwise). Throws OptimizationError if the
/// objective is not finite.
MinimizeResult minimize_box(const Objective& objective, std::span<const double> x0,
                            const BoxSpec& box, const MinimizeOptions& options = {});

/// Modified Adam state for a dictionary with `rows` harmonics and `cols`
/// columns: one first moment per entry, one second moment per column.
struct AdamState
{
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> v1;   // rows x cols, column-major like the dictionary
    std::vector<double> v2;   // cols
    std::vector<long> tau;    // cols
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double kappa = 1e-3;

    AdamState() = default;
    AdamState(std::size_t n_rows, std::size_t n_cols);

    /// Zeroes moments and step count of one column.
    void reset_column(std::size_t col);
};

/// One modified-Adam step on the columns listed in `active`. `values` and
/// `gradient` are column-major rows x cols matrices. Per active column:
/// tau += 1; v1 <- b1 v1 + (1-b1) g; v2 <- b2 v2 + (1-b2) mean(g^2);
/// values -= kappa * v1_hat / sqrt(v2_hat + eps), then clamp to [0, 1].
void adam_step(std::span<double> values, AdamState& state, std::span<const double> gradient,
               std::span<const std::size_t> active);

}  // namespace sparsep
