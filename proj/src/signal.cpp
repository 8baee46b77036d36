#include "hg/signal.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hg {

void fft_radix2(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0) return;
  if (n & (n - 1)) throw std::invalid_argument("fft_radix2: size must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * std::numbers::pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse)
    for (auto& v : a) v /= static_cast<double>(n);
}

std::vector<std::complex<double>> analytic_signal(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  std::size_t p = 1;
  while (p < 2 * n) p <<= 1;  // pad to suppress circular wrap
  std::vector<std::complex<double>> buf(p, {0.0, 0.0});
  for (std::size_t i = 0; i < n; ++i) buf[i] = {x[i], 0.0};
  fft_radix2(buf, false);
  // Analytic-signal spectrum: double positive frequencies, zero negatives.
  for (std::size_t k = 1; k < p / 2; ++k) buf[k] *= 2.0;
  for (std::size_t k = p / 2 + 1; k < p; ++k) buf[k] = {0.0, 0.0};
  fft_radix2(buf, true);
  buf.resize(n);
  return buf;
}

}  // namespace hg
