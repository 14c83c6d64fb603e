#include "rcr/fieldsim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rcr/engine.hpp"
#include "rcr/errors.hpp"
#include "rcr/parallel.hpp"
#include "rcr/special.hpp"

namespace rcr {
namespace {

// Stream tags keep simulate and fwer seeds apart.
constexpr std::uint64_t kCompareTag = 0x51;
constexpr std::uint64_t kFwerTag = 0xF1;
constexpr std::uint64_t kOracleTag = 0x0C;

std::uint64_t bandwidth_key(double b) { return static_cast<std::uint64_t>(std::llround(b * 1000.0)); }

void check_side(std::size_t side) {
  if (side < 2 || !is_power_of_two(side)) {
    throw UsageError("torus side m must be a power of two >= 2 (got " + std::to_string(side) + ")");
  }
}

Phi phi_for(Sidedness sided) { return sided == Sidedness::Two ? Phi::sup_abs() : Phi::sup(); }

}  // namespace

double torus_distance_sq(std::size_t side, std::size_t row, std::size_t col) {
  const double dr = static_cast<double>(std::min(row, side - row));
  const double dc = static_cast<double>(std::min(col, side - col));
  return dr * dr + dc * dc;
}

std::vector<double> gaussian_filter(std::size_t side, double bandwidth) {
  if (side < 2) throw UsageError("torus side must be at least 2");
  if (!(bandwidth >= 0.0) || !std::isfinite(bandwidth)) throw UsageError("bandwidth must be finite and >= 0");
  std::vector<double> f(side * side, 0.0);
  if (bandwidth == 0.0) {
    f[0] = 1.0;
    return f;
  }
  const double b2 = bandwidth * bandwidth;
  double norm = 0.0;
  for (std::size_t r = 0; r < side; ++r) {
    for (std::size_t c = 0; c < side; ++c) {
      const double v = std::exp(-torus_distance_sq(side, r, c) / b2);
      f[r * side + c] = v;
      norm += v * v;
    }
  }
  const double scale = 1.0 / std::sqrt(norm);
  for (double& v : f) v *= scale;
  return f;
}

TorusFieldGenerator::TorusFieldGenerator(std::size_t side, double bandwidth)
    : side_((check_side(side), side)), filter_(gaussian_filter(side, bandwidth)), fft_(side) {
  filter_hat_.assign(filter_.begin(), filter_.end());
  fft_.forward(filter_hat_);
}

void TorusFieldGenerator::generate(Rng& rng, std::size_t count, std::span<double> out) const {
  const std::size_t k = dim();
  if (out.size() != count * k) throw UsageError("field buffer has the wrong size");
  std::normal_distribution<double> normal;
  std::vector<std::complex<double>> grid(k);
  for (std::size_t f = 0; f < count; f += 2) {
    for (auto& z : grid) {
      const double re = normal(rng);
      const double im = normal(rng);
      z = {re, im};
    }
    fft_.forward(grid);
    for (std::size_t t = 0; t < k; ++t) {
      const std::complex<double> h = filter_hat_[t];
      const std::complex<double> z = grid[t];
      grid[t] = {h.real() * z.real() - h.imag() * z.imag(), h.real() * z.imag() + h.imag() * z.real()};
    }
    fft_.inverse(grid);
    double* first = out.data() + f * k;
    for (std::size_t t = 0; t < k; ++t) first[t] = grid[t].real();
    if (f + 1 < count) {
      double* second = first + k;
      for (std::size_t t = 0; t < k; ++t) second[t] = grid[t].imag();
    }
  }
}

Sample generate_sample(const TorusFieldGenerator& generator, std::size_t n, const MeanVector& mu,
                       Rng& rng) {
  const std::size_t k = generator.dim();
  if (mu.size() != k) {
    throw UsageError("mean vector has length " + std::to_string(mu.size()) + ", expected K = " +
                     std::to_string(k));
  }
  std::vector<double> data(n * k);
  generator.generate(rng, n, data);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < k; ++t) data[i * k + t] += mu[t];
  }
  return Sample(k, n, std::move(data));
}

Sample generate_sample(const TorusFieldConfig& config, const MeanVector& mu) {
  const TorusFieldGenerator generator(config.side, config.bandwidth);
  Rng rng(derive_seed(config.seed, {}));
  return generate_sample(generator, config.n, mu, rng);
}

std::vector<std::size_t> reject_set(std::span<const double> mean, double threshold, Sidedness sided) {
  if (std::isnan(threshold)) throw UsageError("threshold is NaN");
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < mean.size(); ++k) {
    const double stat = sided == Sidedness::Two ? std::abs(mean[k]) : mean[k];
    if (stat > threshold) out.push_back(k);
  }
  return out;
}

std::vector<std::size_t> reject_set(const Sample& sample, double threshold, Sidedness sided) {
  const MeanVector mean = empirical_mean(sample);
  return reject_set(mean, threshold, sided);
}

const char* to_string(SimMethod m) noexcept {
  switch (m) {
    case SimMethod::Bonferroni:
      return "bonferroni";
    case SimMethod::SingleTest:
      return "single_test";
    case SimMethod::Conc:
      return "conc";
    case SimMethod::Compound:
      return "compound";
    case SimMethod::QuantBonf:
      return "quant_bonf";
    case SimMethod::QuantConc:
      return "quant_conc";
    case SimMethod::OracleQuantile:
      return "oracle_quantile";
  }
  return "?";
}

std::vector<SimMethod> all_sim_methods() {
  return {SimMethod::Bonferroni, SimMethod::SingleTest, SimMethod::Conc,          SimMethod::Compound,
          SimMethod::QuantBonf,  SimMethod::QuantConc,  SimMethod::OracleQuantile};
}

std::vector<SimMethod> guaranteed_sim_methods() {
  return {SimMethod::Bonferroni, SimMethod::Conc, SimMethod::Compound, SimMethod::QuantBonf,
          SimMethod::QuantConc};
}

SimMethod parse_sim_method(const std::string& text) {
  for (SimMethod m : all_sim_methods()) {
    if (text == to_string(m)) return m;
  }
  throw UsageError("unknown simulation method '" + text + "'");
}

std::vector<MethodThreshold> compute_sim_thresholds(const Sample& sample, const ThresholdSettings& s,
                                                    std::span<const SimMethod> methods,
                                                    std::uint64_t engine_seed, double oracle_value) {
  const std::size_t n = sample.size();
  const std::size_t k = sample.dim();
  constexpr double sigma = 1.0;  // known marginal standard deviation, ||sigma||_inf = 1
  const double alpha0 = s.chain_share * s.alpha;
  const double f_level = s.alpha - alpha0;

  auto needs = [&](std::initializer_list<SimMethod> any) {
    return std::any_of(methods.begin(), methods.end(), [&](SimMethod m) {
      return std::find(any.begin(), any.end(), m) != any.end();
    });
  };

  // One Rademacher pass over the centred sample serves both the expectation
  // (on centred data W and W - Wbar give the same resampled mean) and the quantiles.
  const Phi phi = phi_for(s.sided);
  const Phi tilde = phi.symmetrized();
  const bool resampling = needs({SimMethod::Conc, SimMethod::Compound, SimMethod::QuantBonf, SimMethod::QuantConc});
  EngineResult e_phi;
  EngineResult e_tilde;
  double q0 = 0.0;
  const WeightScheme rademacher = WeightScheme::rademacher(n);
  const ResamplingConstants constants = scheme_constants(rademacher);
  if (resampling) {
    std::vector<Phi> phis{phi};
    if (!(tilde == phi)) phis.push_back(tilde);
    EngineConfig cfg = EngineConfig::monte_carlo(s.draws, engine_seed);
    cfg.workers = 1;
    const ResampledValues v = resampled_values(center_columns(sample), rademacher, phis, cfg, Centering::None);
    e_phi = summarize_mean(v.values[0], v.mode);
    e_tilde = summarize_mean(v.values.back(), v.mode);
    q0 = upper_quantile(v.values[0], (1.0 - s.delta) * alpha0);
    if (!phi.nonnegative()) q0 = std::max(q0, 0.0);
  }
  const double gamma1 = gamma_coeffs(n, std::span(&alpha0, 1), s.delta).front();

  std::vector<MethodThreshold> out;
  out.reserve(methods.size());
  for (SimMethod m : methods) {
    MethodThreshold t{m};
    switch (m) {
      case SimMethod::Bonferroni:
        t.value = bonferroni_threshold(sigma, n, k, s.alpha, s.sided).value;
        break;
      case SimMethod::SingleTest:
        t.value = single_test_threshold(sigma, n, s.alpha, s.sided).value;
        break;
      case SimMethod::Conc:
        t.value = conc_gaussian_threshold(e_phi, constants, sigma, n, s.alpha, Deviation::Upper).value;
        t.engine_std_error = e_phi.std_error / constants.b.value;
        break;
      case SimMethod::Compound: {
        const double t_det = bonferroni_threshold(sigma, n, k, s.alpha * (1.0 - s.delta), s.sided).value;
        t.value = compound_threshold(e_phi, constants, sigma, n, s.alpha, s.delta, t_det).value;
        t.engine_std_error = e_phi.std_error / constants.b.value;
        break;
      }
      case SimMethod::QuantBonf: {
        // f bounds phi~(Ybar - mu), a two-sided statistic.
        const double f = bonferroni_threshold(sigma, n, k, f_level, Sidedness::Two).value;
        t.value = q0 + gamma1 * f;
        break;
      }
      case SimMethod::QuantConc: {
        const double f = conc_gaussian_threshold(e_tilde, constants, sigma, n, f_level, Deviation::Upper).value;
        t.value = q0 + gamma1 * std::max(f, 0.0);
        break;
      }
      case SimMethod::OracleQuantile:
        t.value = oracle_value;
        break;
    }
    out.push_back(t);
  }
  return out;
}

double oracle_quantile(const TorusFieldGenerator& generator, std::size_t n, double alpha,
                       Sidedness sided, std::size_t samples, std::uint64_t seed) {
  if (samples < 1) throw UsageError("oracle quantile needs at least one sample");
  const Phi phi = phi_for(sided);
  const std::size_t k = generator.dim();
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  Rng rng(seed);
  std::vector<double> fields(2 * k);
  std::vector<double> values;
  values.reserve(samples);
  for (std::size_t s = 0; s < samples; s += 2) {
    generator.generate(rng, 2, fields);
    for (std::size_t j = 0; j < 2 && s + j < samples; ++j) {
      values.push_back(scale * phi(std::span<const double>(fields.data() + j * k, k)));
    }
  }
  return upper_quantile(values, alpha);
}

std::vector<ComparisonRow> run_threshold_comparison(const ExperimentGrid& grid,
                                                    const TorusFieldConfig& config) {
  if (grid.replications < 1) throw UsageError("experiment grid needs at least one replication");
  if (grid.methods.empty()) throw UsageError("experiment grid needs at least one method");
  if (grid.bandwidths.empty()) throw UsageError("experiment grid needs at least one bandwidth");
  check_side(config.side);
  const std::size_t methods = grid.methods.size();
  const MeanVector mu(config.dim(), 0.0);
  const bool want_oracle = std::find(grid.methods.begin(), grid.methods.end(), SimMethod::OracleQuantile) !=
                           grid.methods.end();

  std::vector<ComparisonRow> rows;
  for (double b : grid.bandwidths) {
    const TorusFieldGenerator generator(config.side, b);
    const std::uint64_t key = bandwidth_key(b);
    double oracle = 0.0;
    if (want_oracle) {
      oracle = oracle_quantile(generator, config.n, grid.settings.alpha, grid.settings.sided, grid.oracle_samples,
                               derive_seed(config.seed, {kCompareTag, key, kOracleTag}));
    }
    std::vector<MethodThreshold> per_rep(grid.replications * methods);
    parallel_for(grid.replications, grid.workers, [&](std::size_t rep, unsigned) {
      Rng rng(derive_seed(config.seed, {kCompareTag, key, rep, 0}));
      const Sample sample = generate_sample(generator, config.n, mu, rng);
      auto t = compute_sim_thresholds(sample, grid.settings, grid.methods,
                                      derive_seed(config.seed, {kCompareTag, key, rep, 1}), oracle);
      std::copy(t.begin(), t.end(), per_rep.begin() + static_cast<std::ptrdiff_t>(rep * methods));
    });
    for (std::size_t m = 0; m < methods; ++m) {
      double sum = 0.0;
      double se_sum = 0.0;
      for (std::size_t r = 0; r < grid.replications; ++r) {
        sum += per_rep[r * methods + m].value;
        se_sum += per_rep[r * methods + m].engine_std_error;
      }
      const double reps = static_cast<double>(grid.replications);
      const double mean = sum / reps;
      double ss = 0.0;
      for (std::size_t r = 0; r < grid.replications; ++r) {
        const double d = per_rep[r * methods + m].value - mean;
        ss += d * d;
      }
      ComparisonRow row{b, grid.methods[m]};
      row.mean = mean;
      row.sd = grid.replications > 1 ? std::sqrt(ss / (reps - 1.0)) : 0.0;
      row.engine_std_error = se_sum / reps;
      row.engine_draws = grid.settings.draws;
      row.seed = config.seed;
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<FwerEstimate> estimate_fwer(const TorusFieldConfig& config, const MeanVector& mu,
                                        std::span<const SimMethod> methods,
                                        const ThresholdSettings& settings, std::size_t trials,
                                        unsigned workers, std::size_t oracle_samples) {
  if (trials < 100) throw UsageError("FWER estimation needs at least 100 trials");
  if (methods.empty()) throw UsageError("FWER estimation needs at least one method");
  check_side(config.side);
  const TorusFieldGenerator generator(config.side, config.bandwidth);
  const std::size_t k = generator.dim();
  if (mu.size() != k) throw UsageError("mean vector length does not match K = m^2");

  std::vector<char> is_null(k);
  for (std::size_t t = 0; t < k; ++t) {
    is_null[t] = settings.sided == Sidedness::Two ? (mu[t] == 0.0) : (mu[t] <= 0.0);
  }
  const Phi phi = phi_for(settings.sided);
  const std::uint64_t key = bandwidth_key(config.bandwidth);
  double oracle = 0.0;
  if (std::find(methods.begin(), methods.end(), SimMethod::OracleQuantile) != methods.end()) {
    oracle = oracle_quantile(generator, config.n, settings.alpha, settings.sided, oracle_samples,
                             derive_seed(config.seed, {kFwerTag, key, kOracleTag}));
  }

  const std::size_t nm = methods.size();
  std::vector<char> false_reject(trials * nm, 0);
  std::vector<char> exceeded(trials * nm, 0);
  parallel_for(trials, workers, [&](std::size_t trial, unsigned) {
    Rng rng(derive_seed(config.seed, {kFwerTag, key, trial, 0}));
    const Sample sample = generate_sample(generator, config.n, mu, rng);
    const auto thresholds =
        compute_sim_thresholds(sample, settings, methods, derive_seed(config.seed, {kFwerTag, key, trial, 1}), oracle);
    const MeanVector mean = empirical_mean(sample);
    std::vector<double> deviation(k);
    for (std::size_t t = 0; t < k; ++t) deviation[t] = mean[t] - mu[t];
    const double stat = phi(deviation);
    for (std::size_t m = 0; m < nm; ++m) {
      const double th = thresholds[m].value;
      const auto rejected = reject_set(mean, th, settings.sided);
      false_reject[trial * nm + m] =
          std::any_of(rejected.begin(), rejected.end(), [&](std::size_t r) { return is_null[r] != 0; });
      exceeded[trial * nm + m] = stat > th;
    }
  });

  std::vector<FwerEstimate> out;
  const double dt = static_cast<double>(trials);
  for (std::size_t m = 0; m < nm; ++m) {
    std::size_t fr = 0;
    std::size_t ex = 0;
    for (std::size_t t = 0; t < trials; ++t) {
      fr += static_cast<std::size_t>(false_reject[t * nm + m]);
      ex += static_cast<std::size_t>(exceeded[t * nm + m]);
    }
    FwerEstimate e{methods[m]};
    e.trials = trials;
    e.rate = static_cast<double>(fr) / dt;
    e.std_error = std::sqrt(e.rate * (1.0 - e.rate) / dt);
    e.exceedance = static_cast<double>(ex) / dt;
    e.exceedance_std_error = std::sqrt(e.exceedance * (1.0 - e.exceedance) / dt);
    out.push_back(e);
  }
  return out;
}

FwerEstimate estimate_fwer(const TorusFieldConfig& config, const MeanVector& mu, SimMethod method,
                           const ThresholdSettings& settings, std::size_t trials, unsigned workers) {
  return estimate_fwer(config, mu, std::span(&method, 1), settings, trials, workers).front();
}

}  // namespace rcr
