#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rcr/random.hpp"

namespace rcr {

enum class SchemeKind { Rademacher, Efron, RandomHoldOut, LeaveOneOut, VFold };

// Law of a resampling weight vector W in R^n.
//
//   Rademacher        W_i i.i.d. uniform on {-1, 1}
//   Efron             W ~ Multinomial(n; 1/n, ..., 1/n)
//   RandomHoldOut(q)  W_i = (n/q) 1{i in I}, I uniform among q-subsets
//   LeaveOneOut       RandomHoldOut(n - 1)
//   VFold(V)          W_i = V/(V-1) 1{i not in B_J}, J uniform on the V regular blocks
class WeightScheme {
 public:
  static WeightScheme rademacher(std::size_t n);
  static WeightScheme efron(std::size_t n);
  static WeightScheme random_hold_out(std::size_t n, std::size_t q);
  static WeightScheme leave_one_out(std::size_t n);
  static WeightScheme v_fold(std::size_t n, std::size_t folds);

  // "rademacher", "efron", "rho:<q>", "loo", "vfold:<V>".
  static WeightScheme parse(const std::string& text, std::size_t n);

  SchemeKind kind() const noexcept { return kind_; }
  std::size_t n() const noexcept { return n_; }
  // Subset size for RandomHoldOut / LeaveOneOut, fold count for VFold, 0 otherwise.
  std::size_t parameter() const noexcept { return param_; }

  bool exchangeable() const noexcept { return kind_ != SchemeKind::VFold; }

  // Cardinality of the support of the law, or nullopt when it exceeds 2^64.
  std::optional<std::uint64_t> support_size() const noexcept;

  // Human-readable support cardinality: "2^n", "n^n", "C(n,q)=..." etc.
  std::string complexity_label() const;

  // (x0, a) with |W_i - x0| = a almost surely, when such a pair exists.
  std::optional<std::pair<double, double>> constant_deviation() const noexcept;

  std::string name() const;

  friend bool operator==(const WeightScheme&, const WeightScheme&) = default;

 private:
  WeightScheme(SchemeKind kind, std::size_t n, std::size_t param) : kind_(kind), n_(n), param_(param) {}
  SchemeKind kind_;
  std::size_t n_;
  std::size_t param_;
};

enum class Exactness { Exact, Bounds, MonteCarlo };

const char* to_string(Exactness e) noexcept;

// One resampling constant. `value` is what threshold formulas use: the exact
// value, the Monte Carlo estimate, or for Bounds the end of [lower, upper]
// that makes every threshold conservative (lower for A and B, upper for D).
struct ConstantEstimate {
  double value = 0.0;
  Exactness exactness = Exactness::Exact;
  double lower = 0.0;
  double upper = 0.0;
  std::size_t draws = 0;
  double std_error = 0.0;

  static ConstantEstimate exact(double v) { return {v, Exactness::Exact, v, v, 0, 0.0}; }
};

struct ResamplingConstants {
  ConstantEstimate a;
  ConstantEstimate b;
  ConstantEstimate c;
  std::optional<ConstantEstimate> d;

  double accuracy_index() const noexcept { return c.value / b.value; }
};

ResamplingConstants scheme_constants(const WeightScheme& scheme);

enum class ConstantName { A, B, C, D };

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

// Mean of the defining statistic over `draws` independent weight vectors.
// Requires draws >= 100. D is rejected for schemes without a constant deviation.
McEstimate estimate_constant_mc(const WeightScheme& scheme, ConstantName which, std::size_t draws,
                                std::uint64_t seed);

// Replaces Bounds entries with Monte Carlo estimates.
ResamplingConstants refine_constants_mc(const WeightScheme& scheme, ResamplingConstants constants,
                                        std::size_t draws, std::uint64_t seed);

// Draws one weight vector into `out` (length n).
void draw_weights(const WeightScheme& scheme, Rng& rng, std::span<double> out);
std::vector<double> draw_weights(const WeightScheme& scheme, std::uint64_t seed);

// Writes support atom `index` (0 <= index < support_size) into `out`. All
// supported schemes put equal mass on their atoms. Efron is not enumerable.
void support_atom(const WeightScheme& scheme, std::uint64_t index, std::span<double> out);

}  // namespace rcr
