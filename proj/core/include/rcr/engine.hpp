#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rcr/phi.hpp"
#include "rcr/sample.hpp"
#include "rcr/weights.hpp"

namespace rcr {

enum class EngineMode { Exact, MonteCarlo };

struct EngineConfig {
  EngineMode mode = EngineMode::MonteCarlo;
  std::size_t draws = 1000;
  std::uint64_t seed = 0;
  // Largest support enumerated in Exact mode. LeaveOneOut and VFold are
  // always enumerable (support n and V).
  std::uint64_t exact_cap = 4096;
  // 0 = one worker per hardware thread. Results do not depend on this.
  unsigned workers = 0;

  static EngineConfig exact(std::uint64_t cap = 4096) {
    EngineConfig c;
    c.mode = EngineMode::Exact;
    c.exact_cap = cap;
    return c;
  }
  static EngineConfig monte_carlo(std::size_t draws, std::uint64_t seed) {
    EngineConfig c;
    c.mode = EngineMode::MonteCarlo;
    c.draws = draws;
    c.seed = seed;
    return c;
  }
};

// How the weights multiply the observations.
//   ByWeightMean: (1/n) sum_i (W_i - Wbar) Y^i
//   None:         (1/n) sum_i W_i Y^i
enum class Centering { ByWeightMean, None };

// phi evaluated at every resampled mean. Atoms (Exact) or draws (MonteCarlo)
// all carry equal probability mass.
struct ResampledValues {
  std::vector<std::vector<double>> values;  // one vector per requested phi
  EngineMode mode = EngineMode::MonteCarlo;
  std::size_t evaluations = 0;
};

struct EngineResult {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t evaluations = 0;
};

// Throws UsageError when Exact mode is requested for a law that may not be
// enumerated (Efron, or support larger than the cap).
void check_exact_allowed(const WeightScheme& scheme, const EngineConfig& cfg);

ResampledValues resampled_values(const Sample& sample, const WeightScheme& scheme,
                                 std::span<const Phi> phis, const EngineConfig& cfg,
                                 Centering centering = Centering::ByWeightMean);

// Mean and standard error of equally weighted values. The error is reported as
// zero for Exact mode.
EngineResult summarize_mean(std::span<const double> values, EngineMode mode);

// Smallest value x among `values` with #{v > x} / N <= alpha.
double upper_quantile(std::span<const double> values, double alpha);

// E[ phi( (1/n) sum (W_i - Wbar) Y^i ) | Y ].
EngineResult resampled_expectation(const Sample& sample, const WeightScheme& scheme, const Phi& phi,
                                   const EngineConfig& cfg);

// inf{ x : P_W( phi( (1/n) sum W_i Y^i ) > x ) <= alpha } for Rademacher W.
// The sample is used as given; callers pass Y - Ybar. Requires nonnegative phi.
double resampled_quantile(const Sample& sample, const Phi& phi, double alpha,
                          const EngineConfig& cfg);

// Same, rejecting any scheme other than Rademacher.
double resampled_quantile(const Sample& sample, const WeightScheme& scheme, const Phi& phi,
                          double alpha, const EngineConfig& cfg);

}  // namespace rcr
