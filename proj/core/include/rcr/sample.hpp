#pragma once

#include <cstddef>
#include <istream>
#include <span>
#include <vector>

namespace rcr {

using MeanVector = std::vector<double>;

// K x n matrix of observations. Storage is column-major: the K coordinates of
// observation i are contiguous, since every resampling pass walks observations.
class Sample {
 public:
  // `data` holds n blocks of K values. Requires K >= 1, n >= 2, all finite.
  Sample(std::size_t dim, std::size_t size, std::vector<double> data);

  // One inner vector per coordinate, each of length n.
  static Sample from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return size_; }

  std::span<const double> observation(std::size_t i) const noexcept {
    return {data_.data() + i * dim_, dim_};
  }
  double operator()(std::size_t k, std::size_t i) const noexcept { return data_[i * dim_ + k]; }
  std::span<const double> data() const noexcept { return data_; }

 private:
  std::size_t dim_;
  std::size_t size_;
  std::vector<double> data_;
};

MeanVector empirical_mean(const Sample& sample);

// Column i becomes Y^i - Ybar.
Sample center_columns(const Sample& sample);

// Per-coordinate standard deviation with the unbiased (n - 1) normalisation.
std::vector<double> coordinate_std(const Sample& sample);

// K x V sample whose column j is the mean of Y over the j-th regular block
// {j n/V, ..., (j+1) n/V - 1}. Requires V | n and 2 <= V <= n.
Sample block_means(const Sample& sample, std::size_t folds);

// One CSV row per coordinate, n comma-separated values per row. A first row
// whose first cell is not numeric is treated as a header. Blank lines and
// lines starting with '#' are skipped. Throws CsvError with a 1-based line.
Sample read_sample_csv(std::istream& in);

}  // namespace rcr
