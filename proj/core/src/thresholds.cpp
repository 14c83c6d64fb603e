#include "rcr/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rcr/errors.hpp"
#include "rcr/special.hpp"

namespace rcr {
namespace {

void check_level(double x, const char* what) {
  if (!(x > 0.0 && x < 1.0)) throw UsageError(std::string(what) + " must lie in (0, 1)");
}

void check_n(std::size_t n) {
  if (n < 2) throw UsageError("thresholds need n >= 2");
}

void check_sigma(double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw UsageError("sigma norm must be finite and >= 0");
}

void check_positive(const ConstantEstimate& c, const char* name) {
  if (!(c.value > 0.0) || !std::isfinite(c.value)) {
    throw UsageError(std::string("resampling constant ") + name + " must be positive and finite");
  }
}

ThresholdReport base_report(Method method, double value, double alpha, std::size_t n) {
  ThresholdReport r;
  r.method = method;
  r.value = value;
  r.level.alpha = alpha;
  r.guaranteed_level = alpha;
  r.n = n;
  return r;
}

void attach_engine(ThresholdReport& r, const EngineResult& e, const ResamplingConstants& c) {
  r.constants = c;
  r.engine_value = e.value;
  r.engine_std_error = e.std_error;
  r.engine_draws = e.evaluations;
}

}  // namespace

const char* to_string(Method m) noexcept {
  switch (m) {
    case Method::Bonferroni:
      return "bonferroni";
    case Method::SingleTest:
      return "single_test";
    case Method::ConcGaussian:
      return "conc_gaussian";
    case Method::ConcBounded:
      return "conc_bounded";
    case Method::Compound:
      return "compound";
    case Method::QuantileChain:
      return "quantile_chain";
  }
  return "?";
}

Method parse_method(const std::string& text) {
  for (Method m : {Method::Bonferroni, Method::SingleTest, Method::ConcGaussian, Method::ConcBounded,
                   Method::Compound, Method::QuantileChain}) {
    if (text == to_string(m)) return m;
  }
  throw UsageError("unknown method '" + text + "'");
}

ThresholdReport bonferroni_threshold(double sigma_inf, std::size_t n, std::size_t dim, double alpha,
                                     Sidedness sided) {
  check_sigma(sigma_inf);
  check_n(n);
  check_level(alpha, "alpha");
  if (dim < 1) throw UsageError("Bonferroni needs K >= 1");
  const double per_test = alpha / static_cast<double>(dim) / (sided == Sidedness::Two ? 2.0 : 1.0);
  const double value = sigma_inf / std::sqrt(static_cast<double>(n)) * inv_normal_upper(per_test);
  ThresholdReport r = base_report(Method::Bonferroni, value, alpha, n);
  r.dim = dim;
  r.sigma_norm = sigma_inf;
  r.detail = sided == Sidedness::Two ? "two_sided" : "one_sided";
  return r;
}

ThresholdReport single_test_threshold(double sigma_inf, std::size_t n, double alpha, Sidedness sided) {
  ThresholdReport r = bonferroni_threshold(sigma_inf, n, 1, alpha, sided);
  r.method = Method::SingleTest;
  return r;
}

ThresholdReport conc_gaussian_threshold(const EngineResult& resampled,
                                        const ResamplingConstants& constants, double sigma_p,
                                        std::size_t n, double alpha, Deviation direction) {
  check_sigma(sigma_p);
  check_n(n);
  check_level(alpha, "alpha");
  check_positive(constants.b, "B");
  check_positive(constants.c, "C");
  const double dn = static_cast<double>(n);
  const double b = constants.b.value;
  const double c = constants.c.value;
  const double spread = sigma_p * inv_normal_upper(alpha / 2.0) * (c / (dn * b) + 1.0 / std::sqrt(dn));
  const double centre = resampled.value / b;
  const double value = direction == Deviation::Upper ? centre + spread : centre - spread;
  ThresholdReport r = base_report(Method::ConcGaussian, value, alpha, n);
  r.sigma_norm = sigma_p;
  r.detail = direction == Deviation::Upper ? "upper" : "lower";
  attach_engine(r, resampled, constants);
  return r;
}

BoundedThresholds conc_bounded_thresholds(const EngineResult& resampled,
                                          const ResamplingConstants& constants,
                                          const BoundedAssumption& ba, std::size_t n, double alpha) {
  check_n(n);
  check_level(alpha, "alpha");
  check_positive(constants.a, "A");
  if (!(ba.bound > 0.0) || !std::isfinite(ba.bound)) throw UsageError("bound M must be positive and finite");
  const double root_n = std::sqrt(static_cast<double>(n));
  const double log_inv = std::log(1.0 / alpha);
  const double a = constants.a.value;

  BoundedThresholds out;
  out.upper = base_report(Method::ConcBounded,
                          resampled.value / a + 2.0 * ba.bound / root_n * std::sqrt(log_inv), alpha, n);
  out.upper.sigma_norm = ba.bound;
  out.upper.detail = "upper";
  attach_engine(out.upper, resampled, constants);

  if (constants.d) {
    check_positive(*constants.d, "D");
    const double d = constants.d->value;
    const double value = resampled.value / d -
                         ba.bound / root_n * std::sqrt(1.0 + a * a / (d * d)) * std::sqrt(2.0 * log_inv);
    ThresholdReport lower = base_report(Method::ConcBounded, value, alpha, n);
    lower.sigma_norm = ba.bound;
    lower.detail = "lower";
    attach_engine(lower, resampled, constants);
    out.lower = std::move(lower);
  }
  return out;
}

ThresholdReport compound_threshold(const EngineResult& resampled,
                                   const ResamplingConstants& constants, double sigma_p,
                                   std::size_t n, double alpha, double delta, double t_det) {
  check_sigma(sigma_p);
  check_n(n);
  check_level(alpha, "alpha");
  check_level(delta, "delta");
  check_positive(constants.b, "B");
  check_positive(constants.c, "C");
  if (std::isnan(t_det)) throw UsageError("deterministic threshold is NaN");
  const double dn = static_cast<double>(n);
  const double b = constants.b.value;
  const double c = constants.c.value;
  const double resampled_branch = resampled.value / b +
                                  sigma_p / std::sqrt(dn) * inv_normal_upper(alpha * (1.0 - delta) / 2.0) +
                                  sigma_p * c / (dn * b) * inv_normal_upper(alpha * delta / 2.0);
  const bool det_wins = t_det < resampled_branch;
  ThresholdReport r = base_report(Method::Compound, det_wins ? t_det : resampled_branch, alpha, n);
  r.level.delta = delta;
  r.sigma_norm = sigma_p;
  r.detail = det_wins ? "deterministic" : "resampled";
  attach_engine(r, resampled, constants);
  return r;
}

double quantile_chain_value(std::span<const double> quantiles, std::span<const double> gammas,
                            double f_value) {
  if (quantiles.empty() || gammas.size() != quantiles.size()) {
    throw UsageError("quantile chain needs J >= 1 quantiles and J coefficients");
  }
  double value = quantiles[0];
  for (std::size_t i = 1; i < quantiles.size(); ++i) value += gammas[i - 1] * quantiles[i];
  return value + gammas.back() * f_value;
}

ThresholdReport quantile_chain_threshold(const Sample& sample, const Phi& phi,
                                         const LevelSpec& levels, double f_value, double f_level,
                                         const EngineConfig& cfg) {
  const std::size_t j = levels.alphas.size();
  if (j == 0) throw UsageError("quantile chain needs J >= 1 (alphas is empty)");
  check_level(levels.delta, "delta");
  if (!std::isfinite(f_value) || f_value < 0.0) throw UsageError("f must be finite and nonnegative");
  if (!(f_level >= 0.0 && f_level < 1.0)) throw UsageError("level of f must lie in [0, 1)");
  const double used = std::accumulate(levels.alphas.begin(), levels.alphas.end(), 0.0) + f_level;
  if (used > levels.alpha * (1.0 + 1e-12)) {
    throw UsageError("level split sums to " + std::to_string(used) + ", above alpha = " +
                     std::to_string(levels.alpha));
  }

  const std::size_t n = sample.size();
  const std::vector<double> gammas = gamma_coeffs(n, levels.alphas, levels.delta);
  const Sample centred = center_columns(sample);
  const WeightScheme rademacher = WeightScheme::rademacher(n);
  const Phi tilde = phi.symmetrized();

  std::vector<double> quantiles(j);
  for (std::size_t i = 0; i < j; ++i) {
    EngineConfig c = cfg;
    if (i > 0) c.seed = derive_seed(cfg.seed, {i});
    const Phi& used_phi = i == 0 ? phi : tilde;
    const ResampledValues v =
        resampled_values(centred, rademacher, std::span(&used_phi, 1), c, Centering::None);
    double q = upper_quantile(v.values.front(), (1.0 - levels.delta) * levels.alphas[i]);
    if (i == 0 && !phi.nonnegative()) q = std::max(q, 0.0);
    quantiles[i] = q;
  }

  ThresholdReport r = base_report(Method::QuantileChain, quantile_chain_value(quantiles, gammas, f_value),
                                  levels.alpha, n);
  r.level = levels;
  r.guaranteed_level = used;
  r.dim = sample.dim();
  r.scheme = rademacher.name();
  r.engine_value = quantiles[0];
  r.engine_draws = cfg.mode == EngineMode::Exact ? static_cast<std::size_t>(*rademacher.support_size())
                                                  : cfg.draws;
  r.engine_seed = cfg.seed;
  r.detail = "gamma_J=" + std::to_string(gammas.back()) + ";f=" + std::to_string(f_value);
  return r;
}

RiskInterval lp_risk_interval(double resampled_pnorm, const ResamplingConstants& constants,
                              double sigma_p, std::size_t n, double alpha) {
  check_sigma(sigma_p);
  check_n(n);
  check_level(alpha, "alpha");
  check_positive(constants.b, "B");
  check_positive(constants.c, "C");
  const double b = constants.b.value;
  const double centre = resampled_pnorm / b;
  const double half = sigma_p * constants.c.value / (static_cast<double>(n) * b) *
                      inv_normal_upper(alpha / 2.0);
  return {centre - half, centre + half};
}

}  // namespace rcr
