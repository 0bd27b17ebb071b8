#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "bciwall/errors.hpp"
#include "bciwall/estimation.hpp"

// DFT used by the band-power estimate: iterative radix-2 FFT for
// power-of-two lengths, Bluestein's chirp-z algorithm otherwise.

namespace bciwall {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void fft_radix2(std::vector<cd>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = 2.0 * kPi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    const cd wlen(std::cos(angle), std::sin(angle));
    for (std::size_t i = 0; i < n; i += len) {
      cd w(1.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const cd u = a[i + k];
        const cd v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    for (auto& v : a) v /= static_cast<double>(n);
  }
}

// Arbitrary-length DFT as a convolution with a chirp, evaluated through a
// zero-padded power-of-two FFT.
std::vector<cd> fft_bluestein(const std::vector<cd>& input) {
  const std::size_t n = input.size();
  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;

  std::vector<cd> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    // angle = pi k^2 / n, k^2 reduced mod 2n to keep the argument small
    const auto k2 = static_cast<double>((k * k) % (2 * n));
    chirp[k] = std::polar(1.0, -kPi * k2 / static_cast<double>(n));
  }

  std::vector<cd> a(m, cd(0.0)), b(m, cd(0.0));
  for (std::size_t k = 0; k < n; ++k) a[k] = input[k] * chirp[k];
  b[0] = std::conj(chirp[0]);
  for (std::size_t k = 1; k < n; ++k) b[k] = b[m - k] = std::conj(chirp[k]);

  fft_radix2(a, false);
  fft_radix2(b, false);
  for (std::size_t i = 0; i < m; ++i) a[i] *= b[i];
  fft_radix2(a, true);

  std::vector<cd> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * chirp[k];
  return out;
}

}  // namespace

Spectrum spectrum(std::span<const double> x, double sample_rate_hz) {
  if (x.empty()) throw DataError("spectrum: empty input");
  if (!(sample_rate_hz > 0.0)) throw ConfigError("spectrum: invalid sample rate");

  std::vector<cd> a(x.begin(), x.end());
  Spectrum result;
  result.sample_rate_hz = sample_rate_hz;
  if (is_pow2(a.size())) {
    fft_radix2(a, false);
    result.coeffs = std::move(a);
  } else {
    result.coeffs = fft_bluestein(a);
  }
  return result;
}

double band_power(std::span<const double> x, double lo_hz, double hi_hz,
                  double sample_rate_hz) {
  if (!(lo_hz > 0.0) || !(lo_hz < hi_hz) || !(hi_hz < sample_rate_hz / 2.0)) {
    throw ConfigError("band_power requires 0 < lo < hi < fs/2");
  }
  const Spectrum spec = spectrum(x, sample_rate_hz);
  const auto n = static_cast<double>(spec.size());

  const auto k_lo = static_cast<std::size_t>(std::ceil(lo_hz * n / sample_rate_hz));
  const auto k_hi = static_cast<std::size_t>(std::floor(hi_hz * n / sample_rate_hz));

  double power = 0.0;
  for (std::size_t k = std::max<std::size_t>(k_lo, 1); k <= k_hi && k < spec.size(); ++k) {
    if (2 * k >= spec.size()) break;  // stay below Nyquist; mirror handled by the factor 2
    power += 2.0 * std::norm(spec.coeffs[k]) / (n * n);
  }
  return power;
}

}  // namespace bciwall
