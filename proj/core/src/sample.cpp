#include "rcr/sample.hpp"

#include <cmath>
#include <string>

#include "rcr/errors.hpp"

namespace rcr {

Sample::Sample(std::size_t dim, std::size_t size, std::vector<double> data)
    : dim_(dim), size_(size), data_(std::move(data)) {
  if (dim_ < 1) throw UsageError("sample needs at least one coordinate");
  if (size_ < 2) throw UsageError("sample needs at least two observations");
  if (data_.size() != dim_ * size_) {
    throw UsageError("sample storage holds " + std::to_string(data_.size()) + " values, expected " +
                     std::to_string(dim_ * size_));
  }
  for (double v : data_) {
    if (!std::isfinite(v)) throw UsageError("sample contains a non-finite value");
  }
}

Sample Sample::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw UsageError("sample needs at least one coordinate");
  const std::size_t k = rows.size();
  const std::size_t n = rows.front().size();
  std::vector<double> data(k * n);
  for (std::size_t r = 0; r < k; ++r) {
    if (rows[r].size() != n) throw UsageError("ragged sample rows");
    for (std::size_t i = 0; i < n; ++i) data[i * k + r] = rows[r][i];
  }
  return Sample(k, n, std::move(data));
}

MeanVector empirical_mean(const Sample& sample) {
  const std::size_t k = sample.dim();
  MeanVector mean(k, 0.0);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto col = sample.observation(i);
    for (std::size_t c = 0; c < k; ++c) mean[c] += col[c];
  }
  const double inv_n = 1.0 / static_cast<double>(sample.size());
  for (double& m : mean) m *= inv_n;
  return mean;
}

Sample center_columns(const Sample& sample) {
  const std::size_t k = sample.dim();
  const MeanVector mean = empirical_mean(sample);
  std::vector<double> data(sample.data().begin(), sample.data().end());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    for (std::size_t c = 0; c < k; ++c) data[i * k + c] -= mean[c];
  }
  return Sample(k, sample.size(), std::move(data));
}

std::vector<double> coordinate_std(const Sample& sample) {
  const std::size_t k = sample.dim();
  const MeanVector mean = empirical_mean(sample);
  std::vector<double> ss(k, 0.0);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto col = sample.observation(i);
    for (std::size_t c = 0; c < k; ++c) {
      const double d = col[c] - mean[c];
      ss[c] += d * d;
    }
  }
  for (double& s : ss) s = std::sqrt(s / static_cast<double>(sample.size() - 1));
  return ss;
}

Sample block_means(const Sample& sample, std::size_t folds) {
  const std::size_t n = sample.size();
  if (folds < 2 || folds > n || n % folds != 0) {
    throw UsageError("block means need 2 <= V <= n with V dividing n (n=" + std::to_string(n) +
                     ", V=" + std::to_string(folds) + ")");
  }
  const std::size_t k = sample.dim();
  const std::size_t block = n / folds;
  std::vector<double> data(k * folds, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto col = sample.observation(i);
    double* out = data.data() + (i / block) * k;
    for (std::size_t c = 0; c < k; ++c) out[c] += col[c];
  }
  const double inv = 1.0 / static_cast<double>(block);
  for (double& v : data) v *= inv;
  return Sample(k, folds, std::move(data));
}

}  // namespace rcr
