#include "rcr/fft.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "rcr/errors.hpp"

namespace rcr {

Fft::Fft(std::size_t size) : size_(size) {
  if (!is_power_of_two(size)) throw UsageError("FFT length must be a power of two");
  bitrev_.resize(size);
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < size) ++bits;
  for (std::size_t i = 0; i < size; ++i) {
    std::size_t r = 0;
    for (std::size_t b = 0; b < bits; ++b) r |= ((i >> b) & 1u) << (bits - 1 - b);
    bitrev_[i] = r;
  }
  twiddle_.resize(size / 2);
  for (std::size_t k = 0; k < size / 2; ++k) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(size);
    twiddle_[k] = {std::cos(angle), std::sin(angle)};
  }
}

void Fft::transform(std::span<std::complex<double>> data, bool inverse) const {
  if (data.size() != size_) throw UsageError("FFT input has the wrong length");
  transform(data.data(), 1, inverse);
}

void Fft::transform(std::complex<double>* data, std::size_t stride, bool inverse) const {
  const std::size_t n = size_;
  auto at = [&](std::size_t i) -> std::complex<double>& { return data[i * stride]; };
  for (std::size_t i = 0; i < n; ++i) {
    if (i < bitrev_[i]) std::swap(at(i), at(bitrev_[i]));
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t step = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        std::complex<double> w = twiddle_[k * step];
        if (inverse) w = std::conj(w);
        std::complex<double>& even = at(start + k);
        std::complex<double>& odd = at(start + k + half);
        const std::complex<double> t{w.real() * odd.real() - w.imag() * odd.imag(),
                                     w.real() * odd.imag() + w.imag() * odd.real()};
        odd = even - t;
        even += t;
      }
    }
  }
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) at(i) *= scale;
  }
}

Fft2d::Fft2d(std::size_t side) : line_(side) {}

void Fft2d::transform(std::span<std::complex<double>> grid, bool inverse) const {
  const std::size_t m = line_.size();
  if (grid.size() != m * m) throw UsageError("2D FFT input has the wrong size");
  for (std::size_t r = 0; r < m; ++r) line_.transform(grid.data() + r * m, 1, inverse);
  for (std::size_t c = 0; c < m; ++c) line_.transform(grid.data() + c, m, inverse);
}

}  // namespace rcr
