#include "rcr/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rcr/errors.hpp"

namespace rcr {
namespace {

__extension__ typedef unsigned __int128 u128;

std::optional<std::uint64_t> choose(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  u128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
  }
  return static_cast<std::uint64_t>(r);
}

std::optional<std::uint64_t> checked_pow(std::uint64_t base, std::uint64_t exp) {
  u128 r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    r *= base;
    if (r > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
  }
  return static_cast<std::uint64_t>(r);
}

// P(S = s), s = 0..n, for S ~ Binomial(n, 1/2). The long double recurrence
// stays within the exponent range up to n = 16000 and is accurate to a few ulp
// of double; beyond that the pmf comes from lgamma.
std::vector<double> half_binomial_pmf(std::size_t n) {
  std::vector<double> pmf(n + 1);
  const double dn = static_cast<double>(n);
  if (n <= 16000) {
    long double p = std::ldexp(1.0L, -static_cast<int>(n));
    for (std::size_t s = 0; s <= n; ++s) {
      pmf[s] = static_cast<double>(p);
      p = p * static_cast<long double>(n - s) / static_cast<long double>(s + 1);
    }
    return pmf;
  }
  for (std::size_t s = 0; s <= n; ++s) {
    const double ds = static_cast<double>(s);
    pmf[s] = std::exp(std::lgamma(dn + 1.0) - std::lgamma(ds + 1.0) - std::lgamma(dn - ds + 1.0) - dn * std::log(2.0));
  }
  return pmf;
}

// Rademacher constants depend on W only through the count S of +1 signs:
// Wbar = (2S - n)/n, (1/n) sum (W_i - Wbar)^2 = 1 - Wbar^2, and a coordinate
// equals +1 with conditional probability S/n.
struct RademacherSums {
  double a = 0.0;
  double b = 0.0;
  double d = 0.0;
};

RademacherSums rademacher_sums(std::size_t n) {
  RademacherSums out;
  const double dn = static_cast<double>(n);
  const auto pmf = half_binomial_pmf(n);
  for (std::size_t s = 0; s <= n; ++s) {
    const double p = pmf[s];
    const double wbar = (2.0 * static_cast<double>(s) - dn) / dn;
    const double frac = static_cast<double>(s) / dn;
    out.a += p * (frac * (1.0 - wbar) + (1.0 - frac) * (1.0 + wbar));
    out.b += p * std::sqrt(std::max(0.0, 1.0 - wbar * wbar));
    out.d += p * std::abs(wbar);
  }
  out.d += 1.0;
  return out;
}

ConstantEstimate bounded(double value, double lower, double upper) {
  return {value, Exactness::Bounds, lower, upper, 0, 0.0};
}

std::size_t parse_count(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw UsageError("bad " + what + " '" + text + "'");
  return static_cast<std::size_t>(v);
}

}  // namespace

WeightScheme WeightScheme::rademacher(std::size_t n) {
  if (n < 2) throw UsageError("weight schemes need n >= 2");
  return {SchemeKind::Rademacher, n, 0};
}

WeightScheme WeightScheme::efron(std::size_t n) {
  if (n < 2) throw UsageError("weight schemes need n >= 2");
  return {SchemeKind::Efron, n, 0};
}

WeightScheme WeightScheme::random_hold_out(std::size_t n, std::size_t q) {
  if (n < 2) throw UsageError("weight schemes need n >= 2");
  if (q < 1 || q >= n) {
    throw UsageError("random hold-out needs 1 <= q < n (q = n gives constant weights)");
  }
  return {SchemeKind::RandomHoldOut, n, q};
}

WeightScheme WeightScheme::leave_one_out(std::size_t n) {
  if (n < 2) throw UsageError("weight schemes need n >= 2");
  return {SchemeKind::LeaveOneOut, n, n - 1};
}

WeightScheme WeightScheme::v_fold(std::size_t n, std::size_t folds) {
  if (n < 2) throw UsageError("weight schemes need n >= 2");
  if (folds < 2 || folds > n || n % folds != 0) {
    throw UsageError("V-fold needs 2 <= V <= n and V | n (irregular blocks are not supported)");
  }
  return {SchemeKind::VFold, n, folds};
}

WeightScheme WeightScheme::parse(const std::string& text, std::size_t n) {
  if (text == "rademacher" || text == "rad") return rademacher(n);
  if (text == "efron") return efron(n);
  if (text == "loo" || text == "leave_one_out") return leave_one_out(n);
  if (text.rfind("rho:", 0) == 0) return random_hold_out(n, parse_count(text.substr(4), "q"));
  if (text == "rho") {
    if (n % 2 != 0) throw UsageError("'rho' without q means q = n/2 and needs even n");
    return random_hold_out(n, n / 2);
  }
  if (text.rfind("vfold:", 0) == 0) return v_fold(n, parse_count(text.substr(6), "V"));
  throw UsageError("unknown scheme '" + text + "' (expected rademacher, efron, rho:<q>, loo, vfold:<V>)");
}

std::optional<std::uint64_t> WeightScheme::support_size() const noexcept {
  switch (kind_) {
    case SchemeKind::Rademacher:
      if (n_ >= 64) return std::nullopt;
      return std::uint64_t{1} << n_;
    case SchemeKind::Efron:
      return checked_pow(n_, n_);
    case SchemeKind::RandomHoldOut:
    case SchemeKind::LeaveOneOut:
      return choose(n_, param_);
    case SchemeKind::VFold:
      return param_;
  }
  return std::nullopt;
}

std::string WeightScheme::complexity_label() const {
  const std::string n = std::to_string(n_);
  switch (kind_) {
    case SchemeKind::Rademacher:
      return "2^" + n;
    case SchemeKind::Efron:
      return n + "^" + n;
    case SchemeKind::RandomHoldOut: {
      std::string label = "C(" + n + "," + std::to_string(param_) + ")";
      if (auto s = support_size()) label += "=" + std::to_string(*s);
      return label;
    }
    case SchemeKind::LeaveOneOut:
      return n;
    case SchemeKind::VFold:
      return std::to_string(param_);
  }
  return "?";
}

std::optional<std::pair<double, double>> WeightScheme::constant_deviation() const noexcept {
  const double dn = static_cast<double>(n_);
  switch (kind_) {
    case SchemeKind::Rademacher:
      return std::pair{0.0, 1.0};
    case SchemeKind::Efron:
      return std::nullopt;
    case SchemeKind::RandomHoldOut:
    case SchemeKind::LeaveOneOut: {
      const double half = dn / (2.0 * static_cast<double>(param_));
      return std::pair{half, half};
    }
    case SchemeKind::VFold: {
      const double v = static_cast<double>(param_);
      const double half = v / (2.0 * (v - 1.0));
      return std::pair{half, half};
    }
  }
  return std::nullopt;
}

std::string WeightScheme::name() const {
  switch (kind_) {
    case SchemeKind::Rademacher:
      return "rademacher";
    case SchemeKind::Efron:
      return "efron";
    case SchemeKind::RandomHoldOut:
      return "rho:" + std::to_string(param_);
    case SchemeKind::LeaveOneOut:
      return "loo";
    case SchemeKind::VFold:
      return "vfold:" + std::to_string(param_);
  }
  return "?";
}

const char* to_string(Exactness e) noexcept {
  switch (e) {
    case Exactness::Exact:
      return "exact";
    case Exactness::Bounds:
      return "bounds";
    case Exactness::MonteCarlo:
      return "monte_carlo";
  }
  return "?";
}

ResamplingConstants scheme_constants(const WeightScheme& scheme) {
  const double n = static_cast<double>(scheme.n());
  ResamplingConstants out;
  switch (scheme.kind()) {
    case SchemeKind::Rademacher: {
      const RademacherSums s = rademacher_sums(scheme.n());
      const double lo = 1.0 - 1.0 / std::sqrt(n);
      const double hi = std::sqrt(1.0 - 1.0 / n);
      out.a = {s.a, Exactness::Exact, lo, hi, 0, 0.0};
      out.b = {s.b, Exactness::Exact, lo, hi, 0, 0.0};
      out.c = ConstantEstimate::exact(1.0);
      out.d = ConstantEstimate{s.d, Exactness::Exact, 1.0, 1.0 + 1.0 / std::sqrt(n), 0, 0.0};
      break;
    }
    case SchemeKind::Efron: {
      const double a = 2.0 * std::pow(1.0 - 1.0 / n, n);
      out.a = ConstantEstimate::exact(a);
      out.b = bounded(a, a, std::sqrt((n - 1.0) / n));
      out.c = ConstantEstimate::exact(1.0);
      break;
    }
    case SchemeKind::RandomHoldOut:
    case SchemeKind::LeaveOneOut: {
      const double q = static_cast<double>(scheme.parameter());
      if (scheme.kind() == SchemeKind::LeaveOneOut) {
        out.a = ConstantEstimate::exact(2.0 / n);
        out.b = ConstantEstimate::exact(1.0 / std::sqrt(n - 1.0));
        out.c = ConstantEstimate::exact(std::sqrt(n) / (n - 1.0));
        out.d = ConstantEstimate::exact(1.0);
      } else {
        out.a = ConstantEstimate::exact(2.0 * (1.0 - q / n));
        out.b = ConstantEstimate::exact(std::sqrt(n / q - 1.0));
        out.c = ConstantEstimate::exact(std::sqrt(n / (n - 1.0)) * std::sqrt(n / q - 1.0));
        out.d = ConstantEstimate::exact(n / (2.0 * q) + std::abs(1.0 - n / (2.0 * q)));
      }
      break;
    }
    case SchemeKind::VFold: {
      const double v = static_cast<double>(scheme.parameter());
      out.a = ConstantEstimate::exact(2.0 / v);
      out.b = ConstantEstimate::exact(1.0 / std::sqrt(v - 1.0));
      out.c = ConstantEstimate::exact(std::sqrt(n) / (v - 1.0));
      out.d = ConstantEstimate::exact(1.0);
      break;
    }
  }
  return out;
}

void draw_weights(const WeightScheme& scheme, Rng& rng, std::span<double> out) {
  const std::size_t n = scheme.n();
  if (out.size() != n) throw UsageError("weight buffer has the wrong length");
  switch (scheme.kind()) {
    case SchemeKind::Rademacher: {
      std::uint64_t bits = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (i % 64 == 0) bits = rng();
        out[i] = (bits & 1u) ? 1.0 : -1.0;
        bits >>= 1;
      }
      return;
    }
    case SchemeKind::Efron: {
      std::fill(out.begin(), out.end(), 0.0);
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      for (std::size_t i = 0; i < n; ++i) out[pick(rng)] += 1.0;
      return;
    }
    case SchemeKind::RandomHoldOut:
    case SchemeKind::LeaveOneOut: {
      const std::size_t q = scheme.parameter();
      const double w = static_cast<double>(n) / static_cast<double>(q);
      if (scheme.kind() == SchemeKind::LeaveOneOut) {
        std::fill(out.begin(), out.end(), w);
        out[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)] = 0.0;
        return;
      }
      // Partial Fisher-Yates over the index set; the first q slots are kept.
      thread_local std::vector<std::size_t> index;
      index.resize(n);
      std::iota(index.begin(), index.end(), std::size_t{0});
      std::fill(out.begin(), out.end(), 0.0);
      for (std::size_t j = 0; j < q; ++j) {
        const std::size_t r = std::uniform_int_distribution<std::size_t>(j, n - 1)(rng);
        std::swap(index[j], index[r]);
        out[index[j]] = w;
      }
      return;
    }
    case SchemeKind::VFold: {
      const std::size_t folds = scheme.parameter();
      const std::size_t block = n / folds;
      const double v = static_cast<double>(folds);
      const std::size_t held = std::uniform_int_distribution<std::size_t>(0, folds - 1)(rng);
      for (std::size_t i = 0; i < n; ++i) out[i] = (i / block == held) ? 0.0 : v / (v - 1.0);
      return;
    }
  }
}

std::vector<double> draw_weights(const WeightScheme& scheme, std::uint64_t seed) {
  std::vector<double> w(scheme.n());
  Rng rng(derive_seed(seed, {}));
  draw_weights(scheme, rng, w);
  return w;
}

void support_atom(const WeightScheme& scheme, std::uint64_t index, std::span<double> out) {
  const std::size_t n = scheme.n();
  if (out.size() != n) throw UsageError("weight buffer has the wrong length");
  const auto size = scheme.support_size();
  if (scheme.kind() == SchemeKind::Efron || !size || index >= *size) {
    throw UsageError("support atom index out of range for scheme " + scheme.name());
  }
  switch (scheme.kind()) {
    case SchemeKind::Rademacher:
      for (std::size_t i = 0; i < n; ++i) out[i] = ((index >> i) & 1u) ? 1.0 : -1.0;
      return;
    case SchemeKind::LeaveOneOut: {
      const double w = static_cast<double>(n) / static_cast<double>(n - 1);
      std::fill(out.begin(), out.end(), w);
      out[index] = 0.0;
      return;
    }
    case SchemeKind::RandomHoldOut: {
      // Lexicographic unranking of the q-subset with rank `index`.
      std::size_t remaining = scheme.parameter();
      const double w = static_cast<double>(n) / static_cast<double>(remaining);
      std::uint64_t rank = index;
      for (std::size_t i = 0; i < n; ++i) {
        out[i] = 0.0;
        if (remaining == 0) continue;
        const std::uint64_t with_i = *choose(n - i - 1, remaining - 1);
        if (rank < with_i) {
          out[i] = w;
          --remaining;
        } else {
          rank -= with_i;
        }
      }
      return;
    }
    case SchemeKind::VFold: {
      const std::size_t block = n / scheme.parameter();
      const double v = static_cast<double>(scheme.parameter());
      for (std::size_t i = 0; i < n; ++i) out[i] = (i / block == index) ? 0.0 : v / (v - 1.0);
      return;
    }
    case SchemeKind::Efron:
      break;
  }
}

McEstimate estimate_constant_mc(const WeightScheme& scheme, ConstantName which, std::size_t draws,
                                std::uint64_t seed) {
  if (draws < 100) throw UsageError("Monte Carlo constant estimation needs at least 100 draws");
  const auto deviation = scheme.constant_deviation();
  if (which == ConstantName::D && !deviation) {
    throw UsageError("D_W is undefined for scheme " + scheme.name() +
                     " (weights have no constant deviation |W_i - x0| = a)");
  }
  const std::size_t n = scheme.n();
  const double dn = static_cast<double>(n);
  const bool blockwise_c = which == ConstantName::C && scheme.kind() == SchemeKind::VFold;
  const std::size_t folds = scheme.kind() == SchemeKind::VFold ? scheme.parameter() : 0;

  Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(which)}));
  std::vector<double> w(n);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t t = 0; t < draws; ++t) {
    draw_weights(scheme, rng, w);
    const double wbar = std::accumulate(w.begin(), w.end(), 0.0) / dn;
    double stat = 0.0;
    switch (which) {
      case ConstantName::A:
        for (double x : w) stat += std::abs(x - wbar);
        stat /= dn;
        break;
      case ConstantName::B:
        for (double x : w) stat += (x - wbar) * (x - wbar);
        stat = std::sqrt(stat / dn);
        break;
      case ConstantName::C:
        if (blockwise_c) {
          // V-fold weights are exchangeable at block level only; the constant
          // is sqrt(n/V) times the exchangeable C of the V block weights.
          const std::size_t block = n / folds;
          const double dv = static_cast<double>(folds);
          for (std::size_t j = 0; j < folds; ++j) {
            const double u = w[j * block] - wbar;
            stat += u * u;
          }
          stat = (dn / dv) * (dv / (dv - 1.0)) * stat / dv;
        } else {
          for (double x : w) stat += (x - wbar) * (x - wbar);
          stat = dn / (dn - 1.0) * stat / dn;
        }
        break;
      case ConstantName::D:
        stat = deviation->second + std::abs(wbar - deviation->first);
        break;
    }
    sum += stat;
    sum_sq += stat * stat;
  }
  const double dd = static_cast<double>(draws);
  const double mean = sum / dd;
  const double var = std::max(0.0, (sum_sq - dd * mean * mean) / (dd - 1.0));
  double se = std::sqrt(var / dd);
  if (which == ConstantName::C) {
    // C is the square root of an expectation; propagate with the delta method.
    const double root = std::sqrt(mean);
    return {root, root > 0.0 ? se / (2.0 * root) : 0.0};
  }
  return {mean, se};
}

ResamplingConstants refine_constants_mc(const WeightScheme& scheme, ResamplingConstants constants,
                                        std::size_t draws, std::uint64_t seed) {
  auto refine = [&](ConstantEstimate& c, ConstantName which) {
    if (c.exactness != Exactness::Bounds) return;
    const McEstimate e = estimate_constant_mc(scheme, which, draws, seed);
    c.value = e.value;
    c.exactness = Exactness::MonteCarlo;
    c.draws = draws;
    c.std_error = e.std_error;
  };
  refine(constants.a, ConstantName::A);
  refine(constants.b, ConstantName::B);
  refine(constants.c, ConstantName::C);
  if (constants.d) refine(*constants.d, ConstantName::D);
  return constants;
}

}  // namespace rcr
