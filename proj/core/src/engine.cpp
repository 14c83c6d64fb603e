#include "rcr/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "rcr/errors.hpp"
#include "rcr/parallel.hpp"

namespace rcr {
namespace {

// Draws are grouped into fixed-size blocks, each with its own RNG stream, so
// the values do not depend on how blocks are spread over workers.
constexpr std::size_t kBlock = 64;

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("alpha must lie in (0, 1)");
}

}  // namespace

void check_exact_allowed(const WeightScheme& scheme, const EngineConfig& cfg) {
  if (scheme.kind() == SchemeKind::Efron) {
    throw UsageError("exact enumeration is not available for Efron weights (support n^n = " +
                     scheme.complexity_label() + ")");
  }
  if (scheme.kind() == SchemeKind::LeaveOneOut || scheme.kind() == SchemeKind::VFold) return;
  const auto size = scheme.support_size();
  if (!size || *size > cfg.exact_cap) {
    throw UsageError("exact enumeration of " + scheme.name() + " needs " +
                     scheme.complexity_label() + " atoms" +
                     (size ? " (" + std::to_string(*size) + ")" : std::string(" (> 2^64)")) +
                     ", above the cap of " + std::to_string(cfg.exact_cap));
  }
}

ResampledValues resampled_values(const Sample& sample, const WeightScheme& scheme,
                                 std::span<const Phi> phis, const EngineConfig& cfg,
                                 Centering centering) {
  if (scheme.n() != sample.size()) {
    throw UsageError("scheme is defined for n=" + std::to_string(scheme.n()) +
                     " but the sample has n=" + std::to_string(sample.size()));
  }
  if (phis.empty()) throw UsageError("no contrast function requested");

  std::size_t count = 0;
  if (cfg.mode == EngineMode::Exact) {
    check_exact_allowed(scheme, cfg);
    count = static_cast<std::size_t>(*scheme.support_size());
  } else {
    if (cfg.draws == 0) throw UsageError("Monte Carlo mode needs at least one draw");
    count = cfg.draws;
  }

  const std::size_t n = sample.size();
  const std::size_t k = sample.dim();
  const double inv_n = 1.0 / static_cast<double>(n);
  const double* data = sample.data().data();

  ResampledValues out;
  out.mode = cfg.mode;
  out.evaluations = count;
  out.values.assign(phis.size(), std::vector<double>(count));

  const std::size_t blocks = (count + kBlock - 1) / kBlock;
  parallel_for(blocks, cfg.workers, [&](std::size_t block, unsigned) {
    std::vector<double> w(n);
    std::vector<double> acc(k);
    Rng rng;
    if (cfg.mode == EngineMode::MonteCarlo) rng.seed(derive_seed(cfg.seed, {block}));
    const std::size_t end = std::min(count, (block + 1) * kBlock);
    for (std::size_t t = block * kBlock; t < end; ++t) {
      if (cfg.mode == EngineMode::Exact) {
        support_atom(scheme, t, w);
      } else {
        draw_weights(scheme, rng, w);
      }
      double shift = 0.0;
      if (centering == Centering::ByWeightMean) shift = std::accumulate(w.begin(), w.end(), 0.0) * inv_n;
      std::fill(acc.begin(), acc.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const double c = (w[i] - shift) * inv_n;
        if (c == 0.0) continue;
        const double* col = data + i * k;
        for (std::size_t j = 0; j < k; ++j) acc[j] += c * col[j];
      }
      for (std::size_t p = 0; p < phis.size(); ++p) out.values[p][t] = phis[p](acc);
    }
  });
  return out;
}

EngineResult summarize_mean(std::span<const double> values, EngineMode mode) {
  if (values.empty()) throw UsageError("no resampled values");
  const double m = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / m;
  double se = 0.0;
  if (mode == EngineMode::MonteCarlo && values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    se = std::sqrt(ss / (m - 1.0) / m);
  }
  return {mean, se, values.size()};
}

double upper_quantile(std::span<const double> values, double alpha) {
  check_alpha(alpha);
  if (values.empty()) throw UsageError("no resampled values");
  const std::size_t total = values.size();
  const double dt = static_cast<double>(total);
  // Largest number of exceedances m with m / N <= alpha.
  std::size_t allowed = static_cast<std::size_t>(std::floor(alpha * dt));
  while (allowed > 0 && static_cast<double>(allowed) / dt > alpha) --allowed;
  while (allowed + 1 < total && static_cast<double>(allowed + 1) / dt <= alpha) ++allowed;
  // The answer is the order statistic v_(N - 1 - m): at most m values exceed
  // it, while every smaller value is exceeded by at least m + 1.
  std::vector<double> sorted(values.begin(), values.end());
  const auto pos = sorted.begin() + static_cast<std::ptrdiff_t>(total - 1 - allowed);
  std::nth_element(sorted.begin(), pos, sorted.end());
  return *pos;
}

EngineResult resampled_expectation(const Sample& sample, const WeightScheme& scheme, const Phi& phi,
                                   const EngineConfig& cfg) {
  const ResampledValues v = resampled_values(sample, scheme, std::span(&phi, 1), cfg);
  return summarize_mean(v.values.front(), v.mode);
}

double resampled_quantile(const Sample& sample, const Phi& phi, double alpha,
                          const EngineConfig& cfg) {
  check_alpha(alpha);
  if (!phi.nonnegative()) {
    throw UsageError("resampled quantile needs a nonnegative phi (got " + phi.name() + ")");
  }
  const WeightScheme scheme = WeightScheme::rademacher(sample.size());
  const ResampledValues v = resampled_values(sample, scheme, std::span(&phi, 1), cfg, Centering::None);
  return upper_quantile(v.values.front(), alpha);
}

double resampled_quantile(const Sample& sample, const WeightScheme& scheme, const Phi& phi,
                          double alpha, const EngineConfig& cfg) {
  if (scheme.kind() != SchemeKind::Rademacher) {
    throw UsageError("the resampled quantile is defined for Rademacher weights only (got " +
                     scheme.name() + ")");
  }
  return resampled_quantile(sample, phi, alpha, cfg);
}

}  // namespace rcr
