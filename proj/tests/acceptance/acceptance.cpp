// Acceptance checks. `rcr_acceptance N` runs check N and prints one
// "criterion N: PASS|FAIL ..." line; without an argument every check runs.

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "rcr/engine.hpp"
#include "rcr/fieldsim.hpp"
#include "rcr/special.hpp"
#include "rcr/weights.hpp"
#include "test_support.hpp"

using namespace rcr;
namespace mp = boost::multiprecision;

namespace {

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Collects sub-checks; the criterion passes when all of them do.
struct Verdict {
  bool ok = true;
  std::vector<std::string> notes;

  void check(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      notes.push_back("failed: " + what);
    }
  }
  void note(const std::string& s) { notes.push_back(s); }
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

bool near_rel(double x, double y, double rel = 1e-14) {
  return std::abs(x - y) <= rel * std::max({1.0, std::abs(x), std::abs(y)});
}

// ---------------------------------------------------------------- 1

Verdict constants_table() {
  Verdict v;
  Timer t;
  std::size_t closed = 0;
  auto expect = [&](const std::string& name, double got, double want) {
    ++closed;
    v.check(near_rel(got, want), name + " = " + fmt("%.17g", got) + ", expected " + fmt("%.17g", want));
  };

  for (std::size_t n = 2; n <= 200; ++n) {
    const double dn = static_cast<double>(n);
    const auto loo = scheme_constants(WeightScheme::leave_one_out(n));
    expect("loo A n=" + std::to_string(n), loo.a.value, 2 / dn);
    expect("loo B n=" + std::to_string(n), loo.b.value, 1 / std::sqrt(dn - 1));
    expect("loo C n=" + std::to_string(n), loo.c.value, std::sqrt(dn) / (dn - 1));
    expect("loo D n=" + std::to_string(n), loo.d->value, 1.0);

    for (std::size_t q = 1; q < n; q += std::max<std::size_t>(1, n / 7)) {
      const double dq = static_cast<double>(q);
      const auto rho = scheme_constants(WeightScheme::random_hold_out(n, q));
      const std::string tag = " rho n=" + std::to_string(n) + " q=" + std::to_string(q);
      expect("A" + tag, rho.a.value, 2 * (1 - dq / dn));
      expect("B" + tag, rho.b.value, std::sqrt(dn / dq - 1));
      expect("C" + tag, rho.c.value, std::sqrt(dn / (dn - 1)) * std::sqrt(dn / dq - 1));
      expect("D" + tag, rho.d->value, dn / (2 * dq) + std::abs(1 - dn / (2 * dq)));
    }
    if (n % 2 == 0) {
      const auto half = scheme_constants(WeightScheme::random_hold_out(n, n / 2));
      expect("rho(n/2) A", half.a.value, 1.0);
      expect("rho(n/2) B", half.b.value, 1.0);
      expect("rho(n/2) D", half.d->value, 1.0);
      expect("rho(n/2) C", half.c.value, std::sqrt(dn / (dn - 1)));
    }
    for (std::size_t folds = 2; folds <= n; ++folds) {
      if (n % folds) continue;
      const double dv = static_cast<double>(folds);
      const auto vf = scheme_constants(WeightScheme::v_fold(n, folds));
      const std::string tag = " vfold n=" + std::to_string(n) + " V=" + std::to_string(folds);
      expect("A" + tag, vf.a.value, 2 / dv);
      expect("B" + tag, vf.b.value, 1 / std::sqrt(dv - 1));
      expect("C" + tag, vf.c.value, std::sqrt(dn) / (dv - 1));
      expect("D" + tag, vf.d->value, 1.0);
    }
    const auto ef = scheme_constants(WeightScheme::efron(n));
    expect("efron A n=" + std::to_string(n), ef.a.value, 2 * std::pow(1 - 1 / dn, dn));
    expect("efron C n=" + std::to_string(n), ef.c.value, 1.0);
    v.check(!ef.d.has_value(), "efron D should be absent");
    v.check(ef.b.lower == ef.a.value && near_rel(ef.b.upper, std::sqrt((dn - 1) / dn)), "efron B bounds");
    const auto rad = scheme_constants(WeightScheme::rademacher(n));
    expect("rademacher C n=" + std::to_string(n), rad.c.value, 1.0);
  }
  expect("loo n=10 B", scheme_constants(WeightScheme::leave_one_out(10)).b.value, 1.0 / 3);
  expect("loo n=10 C", scheme_constants(WeightScheme::leave_one_out(10)).c.value, std::sqrt(10.0) / 9);

  // Rademacher exact A, B, D against a brute-force enumeration of all sign vectors.
  for (std::size_t n : {2u, 3u, 5u, 8u, 12u}) {
    const auto atoms = testing::enumerate_law(WeightScheme::rademacher(n));
    // Integer sums keep the oracle exact: with T = sum w_i, n^2 sum (w_i - Wbar)^2 = sum (n w_i - T)^2.
    const double dn = static_cast<double>(n);
    long double a = 0, b = 0, d = 0;
    for (const auto& at : atoms) {
      long long total = 0, ss = 0;
      for (double w : at.w) total += static_cast<long long>(w);
      for (double w : at.w) {
        const long long dev = static_cast<long long>(n) * static_cast<long long>(w) - total;
        ss += dev * dev;
      }
      a += at.prob * std::abs(static_cast<double>(static_cast<long long>(n) * static_cast<long long>(at.w[0]) - total)) / dn;
      b += at.prob * std::sqrt(static_cast<long double>(ss) / (dn * dn * dn));
      d += at.prob * std::abs(static_cast<double>(total)) / dn;
    }
    const auto rad = scheme_constants(WeightScheme::rademacher(n));
    expect("rademacher A n=" + std::to_string(n), rad.a.value, static_cast<double>(a));
    expect("rademacher B n=" + std::to_string(n), rad.b.value, static_cast<double>(b));
    expect("rademacher D n=" + std::to_string(n), rad.d->value, static_cast<double>(1 + d));
  }
  v.note(std::to_string(closed) + " closed forms");

  // Monte Carlo with 1e5 draws against the bounds.
  const std::size_t draws = 100000;
  double worst_z = 0;
  for (std::size_t n : {4u, 10u, 20u, 50u, 100u}) {
    const double dn = static_cast<double>(n);
    const double lo = 1 - 1 / std::sqrt(dn), hi = std::sqrt(1 - 1 / dn);
    const auto rad = WeightScheme::rademacher(n);
    const auto exact = scheme_constants(rad);
    const auto a = estimate_constant_mc(rad, ConstantName::A, draws, 11 + n);
    const auto b = estimate_constant_mc(rad, ConstantName::B, draws, 12 + n);
    const auto d = estimate_constant_mc(rad, ConstantName::D, draws, 13 + n);
    const auto c = estimate_constant_mc(rad, ConstantName::C, draws, 14 + n);
    const std::string tag = " rademacher n=" + std::to_string(n);
    v.check(a.value >= lo && a.value <= hi, "MC A" + tag + " = " + fmt("%.6f", a.value) + " outside bounds");
    v.check(b.value >= lo && b.value <= hi, "MC B" + tag + " = " + fmt("%.6f", b.value) + " outside bounds");
    v.check(d.value >= 1 && d.value <= 1 + 1 / std::sqrt(dn), "MC D" + tag + " outside [1, 1+1/sqrt n]");
    worst_z = std::max({worst_z, std::abs(a.value - exact.a.value) / a.std_error,
                        std::abs(b.value - exact.b.value) / b.std_error,
                        std::abs(d.value - exact.d->value) / d.std_error});
    v.check(std::abs(c.value - 1) <= 4 * c.std_error + 1e-12, "MC C" + tag);

    const auto ef = WeightScheme::efron(n);
    const auto efc = scheme_constants(ef);
    const auto ea = estimate_constant_mc(ef, ConstantName::A, draws, 21 + n);
    const auto eb = estimate_constant_mc(ef, ConstantName::B, draws, 22 + n);
    const auto ec = estimate_constant_mc(ef, ConstantName::C, draws, 23 + n);
    const std::string etag = " efron n=" + std::to_string(n);
    v.check(eb.value >= efc.b.lower && eb.value <= efc.b.upper, "MC B" + etag + " = " + fmt("%.6f", eb.value) +
                                                                    " outside [A, sqrt((n-1)/n)]");
    v.check(std::abs(ea.value - efc.a.value) <= 4 * ea.std_error, "MC A" + etag + " vs 2(1-1/n)^n");
    v.check(std::abs(ec.value - 1) <= 4 * ec.std_error, "MC C" + etag + " vs 1");
  }
  v.check(worst_z <= 4, "rademacher MC vs exact sums, worst z = " + fmt("%.2f", worst_z));
  v.note("MC vs exact worst z " + fmt("%.2f", worst_z));
  const double secs = t.seconds();
  v.check(secs < 10, "runtime " + fmt("%.1f", secs) + " s >= 10 s");
  v.note(fmt("%.1f s", secs));
  return v;
}

// ---------------------------------------------------------------- 2

// Distinct values of `values` around `q`: the largest below and smallest above.
std::pair<double, double> neighbours(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  auto it = std::lower_bound(values.begin(), values.end(), q);
  const double below = it == values.begin() ? q : *std::prev(it);
  auto up = std::upper_bound(values.begin(), values.end(), q);
  const double above = up == values.end() ? q : *up;
  return {below, above};
}

Verdict engine_oracle() {
  Verdict v;
  Timer t;
  std::mt19937_64 rng(2024);
  const std::vector<Phi> phis{Phi::sup_abs(), Phi::pnorm(Exponent::finite(1)), Phi::pnorm(Exponent::finite(2)),
                              Phi::sup()};
  const std::vector<double> alphas{0.05, 0.1, 0.25};
  const std::size_t cases = 60, draws = 100000;
  double worst_z = 0;
  std::size_t quantile_cases = 0;
  for (std::size_t c = 0; c < cases; ++c) {
    const std::size_t n = 2 + rng() % 9;  // 2..10
    const std::size_t k = 1 + rng() % 3;
    const Phi& phi = phis[rng() % phis.size()];
    const auto y = testing::gaussian_sample(k, n, rng(), 0.5);
    const auto scheme = WeightScheme::rademacher(n);
    const std::string tag = "case " + std::to_string(c) + " (n=" + std::to_string(n) + ", K=" + std::to_string(k) +
                            ", " + phi.name() + ")";

    const auto exact = resampled_expectation(y, scheme, phi, EngineConfig::exact());
    const auto mc = resampled_expectation(y, scheme, phi, EngineConfig::monte_carlo(draws, c));
    if (mc.std_error > 0) {
      const double z = std::abs(mc.value - exact.value) / mc.std_error;
      worst_z = std::max(worst_z, z);
      v.check(z <= 4, "expectation " + tag + " z = " + fmt("%.2f", z));
    } else {
      v.check(mc.value == exact.value, "expectation " + tag + " with zero spread");
    }

    // The quantile needs a nonnegative phi; sup is replaced by sup_abs.
    const Phi qphi = phi.nonnegative() ? phi : phi.symmetrized();
    ++quantile_cases;
    const double alpha = alphas[rng() % alphas.size()];
    const auto centred = center_columns(y);
    const double qe = resampled_quantile(centred, qphi, alpha, EngineConfig::exact());
    const double qm = resampled_quantile(centred, qphi, alpha, EngineConfig::monte_carlo(draws, 1000 + c));
    const auto values = resampled_values(centred, scheme, std::span(&qphi, 1), EngineConfig::exact(), Centering::None)
                            .values.front();
    const auto [below, above] = neighbours(values, qe);
    v.check(qm >= below && qm <= above, "quantile " + tag + " alpha=" + fmt("%g", alpha) + ": MC " +
                                            fmt("%.6g", qm) + " vs exact " + fmt("%.6g", qe) + " beyond one atom");
  }
  v.note(std::to_string(cases) + " expectation cases, " + std::to_string(quantile_cases) + " quantile cases");
  v.note("worst z " + fmt("%.2f", worst_z));
  const double secs = t.seconds();
  v.check(secs < 60, "runtime " + fmt("%.1f", secs) + " s >= 60 s");
  v.note(fmt("%.1f s", secs));
  return v;
}

// ---------------------------------------------------------------- 3

Verdict ratio_test() {
  Verdict v;
  Timer t;
  const std::size_t k = 4, n = 20, reps = 20000;
  // Fixed correlated covariance Sigma = L L^T.
  const double l[4][4] = {{1.0, 0, 0, 0}, {0.6, 0.8, 0, 0}, {0.3, -0.2, 0.9, 0}, {0.5, 0.5, 0.5, 0.5}};
  const Phi phi = Phi::sup_abs();
  struct Case {
    std::string name;
    WeightScheme scheme;
    EngineConfig cfg;
  };
  std::vector<Case> cases{{"loo", WeightScheme::leave_one_out(n), EngineConfig::exact()},
                          {"rho:10", WeightScheme::random_hold_out(n, 10), EngineConfig::monte_carlo(200, 0)},
                          {"vfold:4", WeightScheme::v_fold(n, 4), EngineConfig::exact()}};
  for (auto& c : cases) {
    c.cfg.workers = 1;
    double sx = 0, sz = 0, sxx = 0, szz = 0, sxz = 0;
    std::mt19937_64 rng(77);
    std::normal_distribution<double> gauss;
    std::vector<double> data(k * n), e(k);
    for (std::size_t r = 0; r < reps; ++r) {
      for (std::size_t i = 0; i < n; ++i) {
        for (auto& x : e) x = gauss(rng);
        for (std::size_t a = 0; a < k; ++a) {
          double s = 0;
          for (std::size_t b = 0; b <= a; ++b) s += l[a][b] * e[b];
          data[i * k + a] = s;
        }
      }
      const Sample y(k, n, data);
      c.cfg.seed = r;
      const double x = resampled_expectation(y, c.scheme, phi, c.cfg).value;
      const auto mean = empirical_mean(y);
      const double z = phi(mean);
      sx += x, sz += z, sxx += x * x, szz += z * z, sxz += x * z;
    }
    const double dn = static_cast<double>(reps);
    const double mx = sx / dn, mz = sz / dn;
    const double vx = sxx / dn - mx * mx, vz = szz / dn - mz * mz, cxz = sxz / dn - mx * mz;
    const double ratio = mx / mz;
    // Delta method for a ratio of correlated means.
    const double se = std::sqrt(std::max(0.0, vx - 2 * ratio * cxz + ratio * ratio * vz) / dn) / mz;
    const double b = scheme_constants(c.scheme).b.value;
    const double z = std::abs(ratio - b) / se;
    v.check(z <= 3, c.name + " ratio " + fmt("%.5f", ratio) + " vs B " + fmt("%.5f", b) + " (z " + fmt("%.2f", z) +
                        ")");
    v.note(c.name + ": ratio " + fmt("%.5f", ratio) + " B " + fmt("%.5f", b) + " se " + fmt("%.5f", se));
  }
  const double secs = t.seconds();
  v.check(secs < 120, "runtime " + fmt("%.1f", secs) + " s >= 120 s");
  v.note(fmt("%.1f s", secs));
  return v;
}

// ---------------------------------------------------------------- 4

std::map<SimMethod, double> mean_thresholds(std::size_t side, std::size_t n, double b, std::size_t reps) {
  ExperimentGrid grid;
  grid.bandwidths = {b};
  grid.replications = reps;
  grid.oracle_samples = 1000;
  TorusFieldConfig config;
  config.side = side;
  config.n = n;
  config.seed = 4;
  std::map<SimMethod, double> out;
  for (const auto& row : run_threshold_comparison(grid, config)) out[row.method] = row.mean;
  return out;
}

// Literal orderings at one grid point; returns the failures.
std::vector<std::string> orderings(const std::map<SimMethod, double>& t, const std::string& where) {
  std::vector<std::string> bad;
  const double bonf = t.at(SimMethod::Bonferroni), conc = t.at(SimMethod::Conc);
  for (SimMethod m : {SimMethod::Conc, SimMethod::QuantBonf, SimMethod::QuantConc}) {
    if (!(t.at(m) < bonf)) {
      bad.push_back(std::string(to_string(m)) + " " + fmt("%.4f", t.at(m)) + " >= bonferroni " + fmt("%.4f", bonf) +
                    " " + where);
    }
  }
  for (SimMethod m : {SimMethod::QuantBonf, SimMethod::QuantConc}) {
    if (!(t.at(m) < conc)) {
      bad.push_back(std::string(to_string(m)) + " " + fmt("%.4f", t.at(m)) + " >= conc " + fmt("%.4f", conc) + " " +
                    where);
    }
  }
  return bad;
}

std::string summary(const std::map<SimMethod, double>& t) {
  std::string s;
  for (const auto& [m, x] : t) s += std::string(s.empty() ? "" : " ") + to_string(m) + "=" + fmt("%.4f", x);
  return s;
}

Verdict coverage() {
  Verdict v;
  Timer t;
  ThresholdSettings settings;
  settings.alpha = 0.05;
  settings.sided = Sidedness::Two;
  const std::size_t trials = 2000;
  std::vector<SimMethod> methods = guaranteed_sim_methods();
  for (double b : {0.0, 4.0}) {
    TorusFieldConfig config;
    config.side = 16;
    config.n = 100;
    config.bandwidth = b;
    config.seed = 1;
    const MeanVector mu(config.dim(), 0.0);
    const auto est = estimate_fwer(config, mu, methods, settings, trials);
    for (const auto& e : est) {
      const std::string tag = std::string(to_string(e.method)) + " b=" + fmt("%g", b);
      v.check(e.exceedance <= 0.05 + 3 * e.exceedance_std_error,
              tag + " exceedance " + fmt("%.4f", e.exceedance) + " > 0.05 + 3 se");
      v.note(tag + " exceedance " + fmt("%.4f", e.exceedance));
      if (e.method == SimMethod::Bonferroni && b == 0.0) {
        v.check(e.exceedance >= 0.01, "bonferroni b=0 exceedance " + fmt("%.4f", e.exceedance) + " < 0.01");
      }
    }
  }

  const auto desk = mean_thresholds(16, 100, 4.0, 50);
  v.note("mean thresholds K=256 n=100 b=4: " + summary(desk));
  for (const auto& bad : orderings(desk, "at K=256 n=100 b=4")) v.check(false, bad);

  // Not part of the verdict: the same orderings where the sample is larger.
  const auto larger = mean_thresholds(16, 1000, 12.0, 5);
  const auto bad_larger = orderings(larger, "");
  v.note(std::string("info K=256 n=1000 b=12: orderings ") + (bad_larger.empty() ? "hold" : "fail") + "; " +
         summary(larger));

  const double secs = t.seconds();
  v.check(secs < 900, "runtime " + fmt("%.1f", secs) + " s >= 900 s");
  v.note(fmt("%.1f s", secs));
  return v;
}

// ---------------------------------------------------------------- 5

long double mills_ratio(long double z) {
  const long double h = 1e-3L;
  const int steps = 14000;
  auto f = [z](long double t) { return std::exp(-z * t - t * t / 2); };
  long double s = f(0) + f(h * steps);
  for (int i = 1; i < steps; ++i) s += f(h * i) * (i % 2 ? 4 : 2);
  return s * h / 3;
}

long double density(long double z) {
  return std::exp(-z * z / 2) / std::sqrt(2 * 3.14159265358979323846264338327950288L);
}

double inverse_error(double alpha) {
  const long double z = inv_normal_upper(alpha);
  if (z >= 0) return static_cast<double>(std::abs(density(z) * mills_ratio(z) - alpha) / density(z));
  return static_cast<double>(std::abs(density(z) * mills_ratio(-z) - (1.0L - alpha)) / density(z));
}

std::size_t exact_binom_quantile(std::size_t n, double eta) {
  const mp::cpp_rational target = mp::cpp_rational(eta) * mp::cpp_rational(mp::cpp_int(1) << n);
  std::vector<mp::cpp_int> c(n + 1);
  mp::cpp_int coeff = 1;
  for (std::size_t k = 0; k <= n; ++k) {
    c[k] = coeff;
    coeff = coeff * (n - k) / (k + 1);
  }
  mp::cpp_int tail = 0;
  for (std::size_t k = n + 1; k-- > 0;) {
    if (mp::cpp_rational(tail) >= target) return k + 1;
    tail += c[k];
  }
  return 0;
}

Verdict special_functions() {
  Verdict v;
  Timer t;
  double worst = 0;
  const int points = 1000;
  for (int i = 0; i < points; ++i) {
    // Log-spaced over both tails.
    const double a = std::pow(10.0, -12.0 + 11.7 * i / (points / 2 - 1.0));
    const double alpha = i < points / 2 ? a : 1 - std::pow(10.0, -12.0 + 11.7 * (i - points / 2) / (points / 2 - 1.0));
    worst = std::max(worst, inverse_error(alpha));
  }
  v.check(worst <= 1e-9, "inverse normal worst error " + fmt("%.3g", worst));
  v.note("inverse normal worst " + fmt("%.2g", worst) + " over " + std::to_string(points) + " points");

  const std::vector<double> etas{1e-4, 2.5e-4, 1e-3, 2.25e-3, 0.005, 0.01, 0.025, 0.05, 0.1, 0.2, 0.25, 0.3, 0.4};
  std::size_t mismatches = 0;
  for (std::size_t n = 1; n <= 64; ++n) {
    for (double eta : etas) {
      if (binom_upper_quantile(n, eta) != exact_binom_quantile(n, eta)) {
        ++mismatches;
        v.check(false, "binomial quantile n=" + std::to_string(n) + " eta=" + fmt("%g", eta));
      }
    }
  }
  v.note("binomial quantile: " + std::to_string(64 * etas.size() - mismatches) + "/" +
         std::to_string(64 * etas.size()) + " exact");

  std::size_t grid = 0;
  for (std::size_t n = 10; n <= 2000; n += (n < 100 ? 1 : 37)) {
    for (double ad : {1e-4, 1e-3, 0.005, 0.01, 0.05, 0.1}) {
      ++grid;
      const auto q = binom_upper_quantile(n, ad / 2);
      const double dn = static_cast<double>(n);
      const bool ok = 2 * q > n && dn / (2.0 * static_cast<double>(q) - dn) >= std::sqrt(dn / (2 * std::log(2 / ad)));
      v.check(ok, "Hoeffding comparison n=" + std::to_string(n) + " alpha*delta=" + fmt("%g", ad));
    }
  }
  v.note("Hoeffding grid " + std::to_string(grid) + " points");
  const double secs = t.seconds();
  v.check(secs < 30, "runtime " + fmt("%.1f", secs) + " s >= 30 s");
  v.note(fmt("%.1f s", secs));
  return v;
}

// ---------------------------------------------------------------- 6

std::string simulate(const std::vector<std::string>& extra) {
  std::vector<std::string> args{"rcr", "simulate", "--profile", "desk", "--seed", "17"};
  args.insert(args.end(), extra.begin(), extra.end());
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (code != 0) return "exit " + std::to_string(code) + ": " + err.str();
  return out.str();
}

Verdict determinism() {
  Verdict v;
  Timer t;
  const auto first = simulate({});
  const auto second = simulate({});
  const auto one = simulate({"--workers", "1"});
  const auto four = simulate({"--workers", "4"});
  v.check(first.rfind("# rcr simulate", 0) == 0, "simulate did not produce CSV: " + first.substr(0, 80));
  v.check(first == second, "two runs differ");
  v.check(one == first, "--workers 1 differs from the default");
  v.check(four == one, "--workers 4 differs from --workers 1");
  v.check(simulate({"--seed", "18"}) != first, "output does not depend on the seed");
  v.note(std::to_string(std::count(first.begin(), first.end(), '\n')) + " lines, " + std::to_string(first.size()) +
         " bytes");
  v.note(fmt("%.1f s", t.seconds()));
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"constants table", constants_table}, {"engine oracle equivalence", engine_oracle},
      {"expectation ratio", ratio_test},     {"coverage and orderings", coverage},
      {"special functions", special_functions}, {"determinism", determinism}};
  std::vector<int> which;
  if (argc > 1) {
    const int k = std::atoi(argv[1]);
    if (k < 1 || k > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "usage: rcr_acceptance [1-%zu]\n", criteria.size());
      return 2;
    }
    which.push_back(k);
  } else {
    for (int k = 1; k <= static_cast<int>(criteria.size()); ++k) which.push_back(k);
  }
  bool all = true;
  for (int k : which) {
    Verdict v;
    try {
      v = criteria[k - 1].second();
    } catch (const std::exception& e) {
      v.check(false, std::string("exception: ") + e.what());
    }
    all = all && v.ok;
    std::printf("criterion %d: %s %s\n", k, v.ok ? "PASS" : "FAIL", criteria[k - 1].first);
    for (const auto& n : v.notes) std::printf("  %s\n", n.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
