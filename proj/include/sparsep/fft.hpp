#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace sparsep
{

/// Real-to-complex FFT of fixed size backed by FFTW. Plans are created once
/// per size; transforms may run concurrently from several threads on the
/// same object.
class RealFft
{
public:
    explicit RealFft(std::size_t size);
    ~RealFft();
    RealFft(RealFft&&) noexcept;
    RealFft& operator=(RealFft&&) noexcept;
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    std::size_t size() const noexcept { return size_; }
    std::size_t spectrum_size() const noexcept { return size_ / 2 + 1; }

    /// out[k] = sum_n in[n] exp(-2 pi i k n / N), k = 0..N/2.
    void forward(std::span<const double> in, std::span<std::complex<double>> out) const;

    /// Unnormalized inverse: out[n] = sum_k X[k] exp(2 pi i k n / N) over the
    /// full Hermitian spectrum. `in` is used as scratch and overwritten.
    void inverse(std::span<std::complex<double>> in, std::span<double> out) const;

private:
    struct Plans;
    std::size_t size_ = 0;
    std::unique_ptr<Plans> plans_;
};

}  // namespace sparsep
