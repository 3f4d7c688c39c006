#include "sparsep/fft.hpp"

#include "sparsep/error.hpp"

#include <fftw3.h>

#include <mutex>
#include <vector>

namespace sparsep
{
namespace
{
// FFTW's planner is not thread-safe.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}
}  // namespace

struct RealFft::Plans
{
    fftw_plan forward = nullptr;
    fftw_plan inverse = nullptr;

    ~Plans()
    {
        std::lock_guard lock(planner_mutex());
        if (forward)
            fftw_destroy_plan(forward);
        if (inverse)
            fftw_destroy_plan(inverse);
    }
};

RealFft::RealFft(std::size_t size) : size_(size), plans_(std::make_unique<Plans>())
{
    if (size < 2)
        throw DomainError("FFT size must be at least 2");
    std::vector<double> real(size);
    std::vector<std::complex<double>> spec(size / 2 + 1);
    auto* c = reinterpret_cast<fftw_complex*>(spec.data());
    const int n = static_cast<int>(size);
    std::lock_guard lock(planner_mutex());
    plans_->forward = fftw_plan_dft_r2c_1d(n, real.data(), c, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_->inverse = fftw_plan_dft_c2r_1d(n, c, real.data(),
                                           FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_DESTROY_INPUT);
    if (!plans_->forward || !plans_->inverse)
        throw Error("FFTW planning failed");
}

RealFft::~RealFft() = default;
RealFft::RealFft(RealFft&&) noexcept = default;
RealFft& RealFft::operator=(RealFft&&) noexcept = default;

void RealFft::forward(std::span<const double> in, std::span<std::complex<double>> out) const
{
    if (in.size() != size_ || out.size() != spectrum_size())
        throw DomainError("FFT buffer size mismatch");
    // FFTW does not write to the input of an out-of-place r2c transform.
    fftw_execute_dft_r2c(plans_->forward, const_cast<double*>(in.data()),
                         reinterpret_cast<fftw_complex*>(out.data()));
}

void RealFft::inverse(std::span<std::complex<double>> in, std::span<double> out) const
{
    if (out.size() != size_ || in.size() != spectrum_size())
        throw DomainError("FFT buffer size mismatch");
    fftw_execute_dft_c2r(plans_->inverse, reinterpret_cast<fftw_complex*>(in.data()), out.data());
}

}  // namespace sparsep
