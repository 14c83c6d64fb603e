#pragma once

#include <span>
#include <string>

namespace rcr {

// Exponent p in [1, inf]. Infinity is a distinct state, not a sentinel value.
class Exponent {
 public:
  static Exponent finite(double p);
  static Exponent infinity() noexcept { return Exponent(); }

  bool is_infinite() const noexcept { return infinite_; }
  // Only meaningful when !is_infinite().
  double value() const noexcept { return p_; }

  std::string to_string() const;

  friend bool operator==(const Exponent&, const Exponent&) = default;

 private:
  Exponent() = default;
  bool infinite_ = true;
  double p_ = 0.0;
};

// ||x||_p, rescaled by max|x_k| before summation so large p cannot overflow.
double p_norm(std::span<const double> x, Exponent p);

enum class PhiKind { Sup, SupAbs, PNorm };

// Contrast function applied to mean vectors. Only the catalogued kinds exist,
// so the declared properties are known to hold.
class Phi {
 public:
  static Phi sup() noexcept { return Phi(PhiKind::Sup, Exponent::infinity()); }
  static Phi sup_abs() noexcept { return Phi(PhiKind::SupAbs, Exponent::infinity()); }
  static Phi pnorm(Exponent p) noexcept { return Phi(PhiKind::PNorm, p); }

  // "sup", "supabs", "pnorm:<p>" or "pnorm:inf".
  static Phi parse(const std::string& text);

  PhiKind kind() const noexcept { return kind_; }

  bool subadditive() const noexcept { return true; }
  bool positive_homogeneous() const noexcept { return true; }
  bool nonnegative() const noexcept { return kind_ != PhiKind::Sup; }
  // |phi(x)| <= ||x||_{p_bound()}
  Exponent p_bound() const noexcept { return p_; }

  // x -> max(phi(x), phi(-x)).
  Phi symmetrized() const noexcept;

  double operator()(std::span<const double> x) const;

  std::string name() const;

  friend bool operator==(const Phi&, const Phi&) = default;

 private:
  Phi(PhiKind kind, Exponent p) noexcept : kind_(kind), p_(p) {}
  PhiKind kind_;
  Exponent p_;
};

}  // namespace rcr
