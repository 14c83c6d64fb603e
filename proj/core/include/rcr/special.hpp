#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rcr {

// Standard Gaussian upper tail P(N(0,1) > z).
double normal_upper_tail(double z);

// z with normal_upper_tail(z) = alpha, absolute error below 1e-9.
// Rational approximation (Acklam) followed by a Halley step against erfc.
double inv_normal_upper(double alpha);

// min{ k in 0..n : 2^-n sum_{i=k+1}^n C(n,i) < eta }, the upper quantile of
// Binomial(n, 1/2). Exact integer arithmetic for n <= 64, log-space tail
// accumulation above.
std::size_t binom_upper_quantile(std::size_t n, double eta);

// The log-space route, exposed so it can be cross-checked against the exact one.
std::size_t binom_upper_quantile_logspace(std::size_t n, double eta);

// gamma_k = n^-k prod_{i<k} (2 binom_upper_quantile(n, alpha_i delta / 2) - n),
// for k = 1..alphas.size().
std::vector<double> gamma_coeffs(std::size_t n, std::span<const double> alphas, double delta);

}  // namespace rcr
