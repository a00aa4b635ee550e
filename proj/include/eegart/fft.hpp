#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace eegart {

std::size_t next_pow2(std::size_t n);

/// In-place iterative radix-2 forward DFT (no scaling). Size must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& data);

/// |X_k| for k = 0..nfft/2 of `signal` zero-padded to nfft (a power of two
/// not smaller than the signal length).
std::vector<double> magnitude_spectrum(std::span<const double> signal, std::size_t nfft);

}  // namespace eegart
