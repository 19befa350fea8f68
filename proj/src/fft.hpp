// Thin FFTW wrapper. Plans are cached per (size, direction); execution is
// thread-safe.

#ifndef UWBRAKE_FFT_HPP
#define UWBRAKE_FFT_HPP

#include <complex>
#include <vector>

namespace uwbrake::detail
{

enum class FftDirection
{
    Forward,   // X_k = sum_n x_n e^{-2 pi i k n / N}
    Backward,  // x_n = sum_k X_k e^{+2 pi i k n / N}, unnormalized
};

// In-place transform of data (size must be nonzero).
void fft(std::vector<std::complex<double>> &data, FftDirection dir);

inline bool is_power_of_two(std::size_t n)
{
    return n != 0 && (n & (n - 1)) == 0;
}

inline std::size_t next_power_of_two(std::size_t n)
{
    std::size_t p = 1;
    while (p < n)
        p <<= 1;
    return p;
}

} // namespace uwbrake::detail

#endif
