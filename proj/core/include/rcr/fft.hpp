#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace rcr {

constexpr bool is_power_of_two(std::size_t x) noexcept { return x != 0 && (x & (x - 1)) == 0; }

// Iterative radix-2 transform of a fixed power-of-two length. The inverse
// transform includes the 1/N factor.
class Fft {
 public:
  explicit Fft(std::size_t size);

  std::size_t size() const noexcept { return size_; }

  void forward(std::span<std::complex<double>> data) const { transform(data, false); }
  void inverse(std::span<std::complex<double>> data) const { transform(data, true); }

  // Strided transform, used for the columns of a 2D array.
  void transform(std::complex<double>* data, std::size_t stride, bool inverse) const;

 private:
  void transform(std::span<std::complex<double>> data, bool inverse) const;

  std::size_t size_;
  std::vector<std::size_t> bitrev_;
  std::vector<std::complex<double>> twiddle_;  // exp(-2 pi i k / N), k < N/2
};

// Row-major m x m transform.
class Fft2d {
 public:
  explicit Fft2d(std::size_t side);

  std::size_t side() const noexcept { return line_.size(); }

  void forward(std::span<std::complex<double>> grid) const { transform(grid, false); }
  void inverse(std::span<std::complex<double>> grid) const { transform(grid, true); }

 private:
  void transform(std::span<std::complex<double>> grid, bool inverse) const;
  Fft line_;
};

}  // namespace rcr
