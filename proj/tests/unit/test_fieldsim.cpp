#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rcr/errors.hpp"
#include "rcr/fieldsim.hpp"
#include "rcr/random.hpp"
#include "rcr/special.hpp"

using namespace rcr;
using Catch::Approx;

namespace {

// Covariance of the filtered field at displacement (dr, dc), summed directly.
double direct_autocorrelation(const std::vector<double>& f, std::size_t m, std::size_t dr, std::size_t dc) {
  double s = 0;
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < m; ++c) s += f[r * m + c] * f[((r + dr) % m) * m + (c + dc) % m];
  }
  return s;
}

// Direct circular convolution of noise with the filter.
std::vector<double> direct_convolution(const std::vector<double>& f, const std::vector<double>& z, std::size_t m) {
  std::vector<double> out(m * m, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < m; ++c) {
      for (std::size_t u = 0; u < m; ++u) {
        for (std::size_t v = 0; v < m; ++v) out[r * m + c] += f[u * m + v] * z[((r + m - u) % m) * m + (c + m - v) % m];
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("torus distance", "[fieldsim]") {
  CHECK(torus_distance_sq(8, 0, 0) == 0.0);
  CHECK(torus_distance_sq(8, 1, 0) == 1.0);
  CHECK(torus_distance_sq(8, 7, 0) == 1.0);
  CHECK(torus_distance_sq(8, 4, 4) == 32.0);
  CHECK(torus_distance_sq(8, 5, 6) == 9.0 + 4.0);
}

TEST_CASE("Gaussian filter", "[fieldsim]") {
  const auto delta = gaussian_filter(8, 0.0);
  CHECK(delta[0] == 1.0);
  for (std::size_t t = 1; t < delta.size(); ++t) CHECK(delta[t] == 0.0);

  for (std::size_t m : {2u, 8u, 32u}) {
    for (double b : {0.3, 1.0, 4.0, 12.5, 40.0}) {
      const auto f = gaussian_filter(m, b);
      double ss = 0;
      for (double v : f) ss += v * v;
      CHECK(std::abs(ss - 1.0) < 1e-12);
      for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < m; ++c) {
          CHECK(f[r * m + c] == f[((m - r) % m) * m + (m - c) % m]);
          CHECK(f[r * m + c] >= 0.0);
        }
      }
      const double ratio = f[1] / f[0];
      CHECK(ratio == Approx(std::exp(-1.0 / (b * b))).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(gaussian_filter(8, -1.0), UsageError);
  CHECK_THROWS_AS(gaussian_filter(1, 1.0), UsageError);
}

TEST_CASE("FFT convolution matches direct convolution", "[fieldsim][oracle]") {
  // The generator turns two white-noise fields into two filtered ones; reproduce
  // it from the same normal stream with a direct O(K^2) convolution.
  const std::size_t m = 8, k = 64;
  const TorusFieldGenerator gen(m, 2.5);
  const auto f = gaussian_filter(m, 2.5);
  Rng rng(77);
  std::vector<double> fields(2 * k);
  gen.generate(rng, 2, fields);

  Rng replay(77);
  std::normal_distribution<double> normal;
  std::vector<double> re(k), im(k);
  for (std::size_t t = 0; t < k; ++t) {
    re[t] = normal(replay);
    im[t] = normal(replay);
  }
  const auto a = direct_convolution(f, re, m);
  const auto b = direct_convolution(f, im, m);
  for (std::size_t t = 0; t < k; ++t) {
    CHECK(fields[t] == Approx(a[t]).margin(1e-12));
    CHECK(fields[k + t] == Approx(b[t]).margin(1e-12));
  }
}

TEST_CASE("field covariance and stationarity", "[fieldsim][statistical]") {
  const std::size_t m = 8, k = 64, count = 10000;
  const double b = 2.0;
  const TorusFieldGenerator gen(m, b);
  Rng rng(78);
  std::vector<double> fields(count * k);
  gen.generate(rng, count, fields);
  const auto f = gaussian_filter(m, b);

  for (auto [dr, dc] : {std::pair<std::size_t, std::size_t>{0, 0}, {0, 1}, {1, 1}, {2, 0}, {3, 5}, {4, 4}}) {
    const double rho = direct_autocorrelation(f, m, dr, dc);
    // Average over translates for stationarity, then compare one fixed pair too.
    double pooled = 0;
    for (std::size_t i = 0; i < count; ++i) {
      const double* g = fields.data() + i * k;
      for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < m; ++c) pooled += g[r * m + c] * g[((r + dr) % m) * m + (c + dc) % m];
      }
    }
    pooled /= double(count * k);
    double single = 0;
    for (std::size_t i = 0; i < count; ++i) single += fields[i * k + 9] * fields[i * k + ((1 + dr) % m) * m + (1 + dc) % m];
    single /= double(count);
    const double se = std::sqrt((1 + rho * rho) / double(count));
    INFO("displacement " << dr << "," << dc << " rho=" << rho);
    CHECK(std::abs(single - rho) <= 5 * se);
    CHECK(std::abs(pooled - rho) <= 5 * se);
  }
}

TEST_CASE("white noise at b = 0", "[fieldsim][statistical]") {
  const std::size_t m = 4, k = 16, count = 10000;
  const TorusFieldGenerator gen(m, 0.0);
  Rng rng(79);
  std::vector<double> fields(count * k);
  gen.generate(rng, count, fields);
  const double se = 1.0 / std::sqrt(double(count));
  for (std::size_t s = 0; s < k; ++s) {
    for (std::size_t t = s; t < k; ++t) {
      double c = 0;
      for (std::size_t i = 0; i < count; ++i) c += fields[i * k + s] * fields[i * k + t];
      c /= double(count);
      if (s == t) {
        CHECK(std::abs(c - 1.0) <= 5 * std::sqrt(2.0) * se);
      } else {
        CHECK(std::abs(c) <= 5 * se);
      }
    }
  }
}

TEST_CASE("generate_sample adds the mean and is reproducible", "[fieldsim]") {
  TorusFieldConfig config;
  config.side = 4;
  config.n = 6;
  config.bandwidth = 1.5;
  config.seed = 3;
  MeanVector mu(16, 0.0);
  mu[5] = 100.0;
  const auto a = generate_sample(config, mu);
  const auto b = generate_sample(config, mu);
  CHECK(a.dim() == 16);
  CHECK(a.size() == 6);
  CHECK(std::equal(a.data().begin(), a.data().end(), b.data().begin()));
  for (std::size_t i = 0; i < 6; ++i) CHECK(a(5, i) > 90.0);
  CHECK_THROWS_AS(generate_sample(config, MeanVector(15, 0.0)), UsageError);
  config.side = 6;
  CHECK_THROWS_AS(generate_sample(config, MeanVector(36, 0.0)), UsageError);
}

TEST_CASE("rejection sets", "[fieldsim]") {
  const std::vector<double> mean{0.5, -0.5};
  CHECK(reject_set(mean, 0.4, Sidedness::Two) == std::vector<std::size_t>{0, 1});
  CHECK(reject_set(mean, 0.4, Sidedness::One) == std::vector<std::size_t>{0});
  CHECK(reject_set(mean, INFINITY, Sidedness::Two).empty());
  CHECK(reject_set(mean, -INFINITY, Sidedness::One).size() == 2);
  CHECK(reject_set(mean, 0.5, Sidedness::Two).empty());
  const auto s = Sample::from_rows({{1.0, 0.0}, {-3.0, -1.0}});
  CHECK(reject_set(s, 1.0, Sidedness::Two) == std::vector<std::size_t>{1});
}

TEST_CASE("simulation method names", "[fieldsim]") {
  for (SimMethod m : all_sim_methods()) CHECK(parse_sim_method(to_string(m)) == m);
  CHECK(all_sim_methods().size() == 7);
  for (SimMethod m : guaranteed_sim_methods()) {
    CHECK(m != SimMethod::SingleTest);
    CHECK(m != SimMethod::OracleQuantile);
  }
  CHECK_THROWS_AS(parse_sim_method("holm"), UsageError);
}

TEST_CASE("per-sample thresholds", "[fieldsim]") {
  TorusFieldConfig config;
  config.side = 8;
  config.n = 50;
  config.bandwidth = 3.0;
  config.seed = 5;
  const auto y = generate_sample(config, MeanVector(64, 0.0));
  ThresholdSettings settings;
  settings.draws = 400;
  const auto methods = all_sim_methods();
  const auto t = compute_sim_thresholds(y, settings, methods, 17, 0.25);
  REQUIRE(t.size() == methods.size());
  const double bonf = bonferroni_threshold(1, 50, 64, 0.05, Sidedness::Two).value;
  const double bonf_det = bonferroni_threshold(1, 50, 64, 0.045, Sidedness::Two).value;
  for (const auto& m : t) {
    CHECK(std::isfinite(m.value));
    if (m.method == SimMethod::Bonferroni) CHECK(m.value == bonf);
    if (m.method == SimMethod::SingleTest) CHECK(m.value == Approx(inv_normal_upper(0.025) / std::sqrt(50.0)));
    if (m.method == SimMethod::Compound) CHECK(m.value <= bonf_det);
    if (m.method == SimMethod::OracleQuantile) CHECK(m.value == 0.25);
  }
  const auto again = compute_sim_thresholds(y, settings, methods, 17, 0.25);
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(t[i].value == again[i].value);
}

TEST_CASE("oracle quantile of the white-noise maximum", "[fieldsim][statistical]") {
  // For b = 0 the K coordinates of Ybar - mu are independent N(0, 1/n), so the
  // quantile of max |.| is known in closed form.
  const TorusFieldGenerator gen(8, 0.0);
  const double q = oracle_quantile(gen, 25, 0.1, Sidedness::Two, 20000, 1);
  const double per = 1 - std::pow(0.9, 1.0 / 64);
  const double exact = inv_normal_upper(per / 2) / 5;
  CHECK(q == Approx(exact).epsilon(0.02));
}

TEST_CASE("comparison rows have the documented shape", "[fieldsim]") {
  ExperimentGrid grid;
  grid.bandwidths = {0.0, 3.0};
  grid.replications = 3;
  grid.oracle_samples = 200;
  grid.settings.draws = 200;
  TorusFieldConfig config;
  config.side = 8;
  config.n = 30;
  config.seed = 9;
  grid.workers = 1;
  const auto rows = run_threshold_comparison(grid, config);
  CHECK(rows.size() == 2 * grid.methods.size());
  grid.workers = 3;
  const auto rows3 = run_threshold_comparison(grid, config);
  REQUIRE(rows3.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].mean == rows3[i].mean);
    CHECK(rows[i].sd == rows3[i].sd);
    CHECK(rows[i].bandwidth == rows3[i].bandwidth);
  }
  // At b = 0 the multiplicity cost keeps every multiple-testing threshold above the single test.
  double single = 0;
  for (const auto& r : rows) {
    if (r.bandwidth == 0.0 && r.method == SimMethod::SingleTest) single = r.mean;
  }
  for (const auto& r : rows) {
    if (r.bandwidth == 0.0 && r.method != SimMethod::SingleTest) CHECK(r.mean >= single);
  }
}

TEST_CASE("FWER estimation", "[fieldsim][statistical]") {
  TorusFieldConfig config;
  config.side = 8;
  config.n = 30;
  config.seed = 11;
  ThresholdSettings settings;
  settings.draws = 100;
  const MeanVector zero(64, 0.0);

  const auto bonf = estimate_fwer(config, zero, SimMethod::Bonferroni, settings, 1000, 0);
  CHECK(bonf.trials == 1000);
  CHECK(bonf.rate <= 0.05 + 3 * bonf.std_error);
  CHECK(bonf.rate >= 0.0);

  // Uncorrected testing of 64 independent coordinates fails badly.
  const auto single = estimate_fwer(config, zero, SimMethod::SingleTest, settings, 1000, 0);
  const double expected = 1 - std::pow(0.95, 64);
  CHECK(std::abs(single.rate - expected) <= 4 * std::sqrt(expected * (1 - expected) / 1000));

  // Coordinates far outside the null set never produce false rejections.
  MeanVector shifted(64, 0.0);
  for (std::size_t t = 0; t < 32; ++t) shifted[t] = 5.0;
  const auto mixed = estimate_fwer(config, shifted, SimMethod::Bonferroni, settings, 500, 0);
  CHECK(mixed.rate <= 0.05 + 3 * mixed.std_error);
  CHECK_THROWS_AS(estimate_fwer(config, zero, SimMethod::Bonferroni, settings, 99, 0), UsageError);

  // One-sided null {mu_k <= 0}: very negative means never count.
  settings.sided = Sidedness::One;
  const auto neg = estimate_fwer(config, MeanVector(64, -5.0), SimMethod::SingleTest, settings, 200, 0);
  CHECK(neg.rate == 0.0);
}
