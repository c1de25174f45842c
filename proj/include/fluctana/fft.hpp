#pragma once

#include <complex>
#include <vector>

namespace fluctana {

// In-place iterative radix-2 FFT. The length must be a power of two.
// The inverse transform includes the 1/N factor.
void fft_inplace(std::vector<std::complex<double>>& data, bool inverse);

}  // namespace fluctana
