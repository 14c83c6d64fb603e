#include "rcr/special.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>

#include "rcr/errors.hpp"

namespace rcr {
namespace {

__extension__ typedef unsigned __int128 u128;

// Acklam's rational approximation to the lower Gaussian quantile, valid for
// 0 < p <= 0.5; relative error about 1.2e-9 before refinement.
double acklam_lower(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

void check_eta(double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw UsageError("binomial quantile level must lie in (0, 1)");
}

double log_add(double x, double y) {
  if (x == -INFINITY) return y;
  if (y == -INFINITY) return x;
  const double hi = std::max(x, y);
  return hi + std::log1p(std::exp(std::min(x, y) - hi));
}

std::size_t binom_upper_quantile_exact(std::size_t n, double eta) {
  // tail(k) = sum_{i>k} C(n,i) is an integer below 2^64; compare it with
  // eta 2^n, which is exactly representable.
  const double scaled = std::ldexp(eta, static_cast<int>(n));
  const double floor_scaled = std::floor(scaled);
  const auto bound = static_cast<u128>(floor_scaled);
  const bool scaled_is_integer = floor_scaled == scaled;
  auto below = [&](u128 tail) {
    return scaled_is_integer ? tail < bound : tail <= bound;
  };

  u128 tail = 0;
  u128 coeff = 1;  // C(n, k)
  std::size_t k = n;
  while (k > 0) {
    const u128 next = tail + coeff;  // tail(k - 1)
    if (!below(next)) break;
    tail = next;
    coeff = coeff * k / (n - k + 1);  // C(n, k - 1)
    --k;
  }
  return k;
}

}  // namespace

double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double inv_normal_upper(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("inv_normal_upper needs alpha in (0, 1)");
  if (alpha > 0.5) return -inv_normal_upper(1.0 - alpha);
  // Lower quantile x of alpha, refined with one Halley step; the answer is -x.
  double x = acklam_lower(alpha);
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - alpha;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  x = x - u / (1.0 + 0.5 * x * u);
  return -x;
}

std::size_t binom_upper_quantile_logspace(std::size_t n, double eta) {
  check_eta(eta);
  const double dn = static_cast<double>(n);
  const double log_eta = std::log(eta);
  const double log_norm = std::lgamma(dn + 1.0) - dn * std::numbers::ln2;
  double log_tail = -INFINITY;
  std::size_t k = n;
  while (k > 0) {
    const double dk = static_cast<double>(k);
    const double log_pmf = log_norm - std::lgamma(dk + 1.0) - std::lgamma(dn - dk + 1.0);
    const double next = log_add(log_tail, log_pmf);
    if (next >= log_eta) break;
    log_tail = next;
    --k;
  }
  return k;
}

std::size_t binom_upper_quantile(std::size_t n, double eta) {
  if (n < 1) throw UsageError("binomial quantile needs n >= 1");
  check_eta(eta);
  if (n <= 64) return binom_upper_quantile_exact(n, eta);
  return binom_upper_quantile_logspace(n, eta);
}

std::vector<double> gamma_coeffs(std::size_t n, std::span<const double> alphas, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw UsageError("delta must lie in (0, 1)");
  const double dn = static_cast<double>(n);
  std::vector<double> gammas;
  gammas.reserve(alphas.size());
  double product = 1.0;
  for (double a : alphas) {
    if (!(a > 0.0 && a < 1.0)) throw UsageError("every alpha_i must lie in (0, 1)");
    const double q = static_cast<double>(binom_upper_quantile(n, a * delta / 2.0));
    product *= (2.0 * q - dn) / dn;
    gammas.push_back(product);
  }
  return gammas;
}

}  // namespace rcr
