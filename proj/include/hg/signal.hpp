#pragma once

#include <complex>
#include <vector>

namespace hg {

/// In-place iterative radix-2 FFT; size must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& data, bool inverse);

/// Analytic signal x + i H[x] of a real sequence, via the frequency-domain
/// Hilbert transform on a zero-padded power-of-two length.
std::vector<std::complex<double>> analytic_signal(const std::vector<double>& x);

}  // namespace hg
