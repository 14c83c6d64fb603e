#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rcr/engine.hpp"
#include "rcr/phi.hpp"
#include "rcr/sample.hpp"
#include "rcr/weights.hpp"

namespace rcr {

enum class Method { Bonferroni, SingleTest, ConcGaussian, ConcBounded, Compound, QuantileChain };

const char* to_string(Method m) noexcept;
Method parse_method(const std::string& text);

enum class Sidedness { One, Two };
enum class Deviation { Upper, Lower };

// Level bookkeeping. `alphas` is only used by the quantile chain.
struct LevelSpec {
  double alpha = 0.05;
  double delta = 0.1;
  std::vector<double> alphas;
};

// A threshold value together with everything needed to audit it.
struct ThresholdReport {
  double value = 0.0;
  Method method = Method::Bonferroni;
  LevelSpec level;
  // Overall level the value is guaranteed at (for the chain, sum alpha_i plus the level of f).
  double guaranteed_level = 0.0;
  std::size_t n = 0;
  std::size_t dim = 0;
  double sigma_norm = 0.0;
  bool sigma_plugin = false;
  std::string scheme;
  std::optional<ResamplingConstants> constants;
  // Engine value feeding the threshold, and its Monte Carlo error.
  double engine_value = 0.0;
  double engine_std_error = 0.0;
  std::size_t engine_draws = 0;
  std::uint64_t engine_seed = 0;
  // Which side of a min() won, or the chain's term breakdown.
  std::string detail;
};

// sigma_inf / sqrt(n) * inv_normal_upper(alpha / K), or alpha / (2K) two-sided.
ThresholdReport bonferroni_threshold(double sigma_inf, std::size_t n, std::size_t dim, double alpha,
                                     Sidedness sided);

// The uncorrected single-coordinate test: Bonferroni with K = 1.
ThresholdReport single_test_threshold(double sigma_inf, std::size_t n, double alpha, Sidedness sided);

// E / B +- ||sigma||_p inv_normal_upper(alpha / 2) (C / (n B) + 1 / sqrt(n)).
ThresholdReport conc_gaussian_threshold(const EngineResult& resampled,
                                        const ResamplingConstants& constants, double sigma_p,
                                        std::size_t n, double alpha, Deviation direction);

struct BoundedAssumption {
  double bound = 1.0;  // M with ||Y^i - mu||_p <= M
  Exponent p = Exponent::infinity();
};

struct BoundedThresholds {
  ThresholdReport upper;
  std::optional<ThresholdReport> lower;  // only when the scheme has D
};

// upper = E / A + 2M / sqrt(n) sqrt(log(1/alpha))
// lower = E / D - M / sqrt(n) sqrt(1 + A^2 / D^2) sqrt(2 log(1/alpha))
BoundedThresholds conc_bounded_thresholds(const EngineResult& resampled,
                                          const ResamplingConstants& constants,
                                          const BoundedAssumption& ba, std::size_t n, double alpha);

// min(t_det, E / B + ||sigma||_p / sqrt(n) z(alpha (1 - delta) / 2)
//                 + ||sigma||_p C / (n B) z(alpha delta / 2)).
// t_det must be a deterministic threshold of level alpha (1 - delta).
ThresholdReport compound_threshold(const EngineResult& resampled,
                                   const ResamplingConstants& constants, double sigma_p,
                                   std::size_t n, double alpha, double delta,
                                   double t_det = std::numeric_limits<double>::infinity());

// q_{(1-delta) alpha_0}(phi, Y - Ybar) + sum_{i=1}^{J-1} gamma_i q_{(1-delta) alpha_i}(phi~, Y - Ybar)
//   + gamma_J f_value,
// where f_value bounds phi~(Ybar - mu) at level f_level. For phi = sup the
// leading quantile is taken of max(sup, 0). Quantile i uses the engine seed
// derived from (cfg.seed, i).
ThresholdReport quantile_chain_threshold(const Sample& sample, const Phi& phi,
                                         const LevelSpec& levels, double f_value, double f_level,
                                         const EngineConfig& cfg);

// Same chain from precomputed quantiles q_0..q_{J-1}.
double quantile_chain_value(std::span<const double> quantiles, std::span<const double> gammas,
                            double f_value);

struct RiskInterval {
  double lower = 0.0;
  double upper = 0.0;
};

// E||Ybar - mu||_p lies in E_p / B -+ ||sigma||_p C / (n B) inv_normal_upper(alpha / 2).
RiskInterval lp_risk_interval(double resampled_pnorm, const ResamplingConstants& constants,
                              double sigma_p, std::size_t n, double alpha);

}  // namespace rcr
