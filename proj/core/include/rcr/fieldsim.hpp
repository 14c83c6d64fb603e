#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rcr/fft.hpp"
#include "rcr/random.hpp"
#include "rcr/sample.hpp"
#include "rcr/thresholds.hpp"

namespace rcr {

// Stationary Gaussian fields on the m x m discrete torus (K = m^2 pixels).
struct TorusFieldConfig {
  std::size_t side = 16;   // m, a power of two
  double bandwidth = 0.0;  // b in pixels; 0 is white noise
  std::size_t n = 100;     // fields per sample
  std::uint64_t seed = 0;

  std::size_t dim() const noexcept { return side * side; }
};

// Squared wrap-around distance from pixel (0, 0) to (row, col).
double torus_distance_sq(std::size_t side, std::size_t row, std::size_t col);

// F_b(t) = C_b exp(-d(0,t)^2 / b^2), row-major, with C_b such that
// sum_t F_b(t)^2 = 1. b = 0 gives the delta kernel.
std::vector<double> gaussian_filter(std::size_t side, double bandwidth);

// Convolves white noise with a fixed filter in the Fourier domain. Two real
// fields share one complex transform (real and imaginary parts).
class TorusFieldGenerator {
 public:
  TorusFieldGenerator(std::size_t side, double bandwidth);

  std::size_t side() const noexcept { return side_; }
  std::size_t dim() const noexcept { return side_ * side_; }
  std::span<const double> filter() const noexcept { return filter_; }

  // Writes `count` independent fields, each `dim()` values, into `out`.
  void generate(Rng& rng, std::size_t count, std::span<double> out) const;

 private:
  std::size_t side_;
  std::vector<double> filter_;
  std::vector<std::complex<double>> filter_hat_;
  Fft2d fft_;
};

// n fields plus mu, as a K x n sample.
Sample generate_sample(const TorusFieldConfig& config, const MeanVector& mu);
Sample generate_sample(const TorusFieldGenerator& generator, std::size_t n, const MeanVector& mu,
                       Rng& rng);

// {k : Ybar_k > t} one-sided, {k : |Ybar_k| > t} two-sided. 0-based indices.
std::vector<std::size_t> reject_set(std::span<const double> mean, double threshold, Sidedness sided);
std::vector<std::size_t> reject_set(const Sample& sample, double threshold, Sidedness sided);

enum class SimMethod { Bonferroni, SingleTest, Conc, Compound, QuantBonf, QuantConc, OracleQuantile };

const char* to_string(SimMethod m) noexcept;
SimMethod parse_sim_method(const std::string& text);
std::vector<SimMethod> all_sim_methods();
// Methods with a non-asymptotic level guarantee (excludes single_test and the oracle).
std::vector<SimMethod> guaranteed_sim_methods();

// How each method is configured. Defaults: alpha_0 = 0.9 alpha, delta = 0.1,
// f at level 0.1 alpha, compound reference = Bonferroni at 0.9 alpha.
struct ThresholdSettings {
  double alpha = 0.05;
  double delta = 0.1;
  double chain_share = 0.9;  // alpha_0 = chain_share * alpha, f gets the rest
  std::size_t draws = 1000;  // Rademacher Monte Carlo draws per sample
  Sidedness sided = Sidedness::Two;
};

struct MethodThreshold {
  SimMethod method;
  double value = 0.0;
  double engine_std_error = 0.0;  // Monte Carlo error of E/B for conc and compound, else 0
};

// Every requested threshold for one sample with known unit marginal variance.
// The oracle value is supplied by the caller.
std::vector<MethodThreshold> compute_sim_thresholds(const Sample& sample, const ThresholdSettings& settings,
                                                    std::span<const SimMethod> methods,
                                                    std::uint64_t engine_seed, double oracle_value);

// Empirical (1 - alpha) quantile of phi(Ybar - mu) from `samples` draws of
// Ybar - mu, which is distributed as G / sqrt(n) for one field G.
double oracle_quantile(const TorusFieldGenerator& generator, std::size_t n, double alpha,
                       Sidedness sided, std::size_t samples, std::uint64_t seed);

struct ExperimentGrid {
  std::vector<double> bandwidths;
  std::size_t replications = 50;
  std::size_t oracle_samples = 1000;
  ThresholdSettings settings;
  std::vector<SimMethod> methods = all_sim_methods();
  unsigned workers = 0;
};

struct ComparisonRow {
  double bandwidth = 0.0;
  SimMethod method;
  double mean = 0.0;
  double sd = 0.0;
  double engine_std_error = 0.0;
  std::size_t engine_draws = 0;
  std::uint64_t seed = 0;
};

// For each b and replication: simulate one sample, compute every method's
// threshold, then report mean and sd over replications. Rows are ordered by
// b, then method.
std::vector<ComparisonRow> run_threshold_comparison(const ExperimentGrid& grid,
                                                    const TorusFieldConfig& config);

struct FwerEstimate {
  SimMethod method;
  double rate = 0.0;        // P(reject_set meets the null set)
  double std_error = 0.0;
  double exceedance = 0.0;  // P(phi(Ybar - mu) > t)
  double exceedance_std_error = 0.0;
  std::size_t trials = 0;
};

// Null set is {k : mu_k <= 0} one-sided and {k : mu_k = 0} two-sided.
std::vector<FwerEstimate> estimate_fwer(const TorusFieldConfig& config, const MeanVector& mu,
                                        std::span<const SimMethod> methods,
                                        const ThresholdSettings& settings, std::size_t trials,
                                        unsigned workers = 0, std::size_t oracle_samples = 1000);

FwerEstimate estimate_fwer(const TorusFieldConfig& config, const MeanVector& mu, SimMethod method,
                           const ThresholdSettings& settings, std::size_t trials, unsigned workers = 0);

}  // namespace rcr
