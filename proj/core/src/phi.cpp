#include "rcr/phi.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "rcr/errors.hpp"

namespace rcr {

Exponent Exponent::finite(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw UsageError("norm exponent must lie in [1, inf)");
  }
  Exponent e;
  e.infinite_ = false;
  e.p_ = p;
  return e;
}

std::string Exponent::to_string() const {
  if (infinite_) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", p_);
  return buf;
}

double p_norm(std::span<const double> x, Exponent p) {
  if (x.empty()) throw UsageError("p_norm of an empty vector");
  double largest = 0.0;
  for (double v : x) largest = std::max(largest, std::abs(v));
  if (p.is_infinite() || largest == 0.0) return largest;

  const double e = p.value();
  double acc = 0.0;
  if (e == 1.0) {
    for (double v : x) acc += std::abs(v);
    return acc;
  }
  if (e == 2.0) {
    for (double v : x) {
      const double r = v / largest;
      acc += r * r;
    }
    return largest * std::sqrt(acc);
  }
  for (double v : x) acc += std::pow(std::abs(v) / largest, e);
  return largest * std::pow(acc, 1.0 / e);
}

Phi Phi::parse(const std::string& text) {
  if (text == "sup") return sup();
  if (text == "supabs" || text == "sup_abs") return sup_abs();
  if (text.rfind("pnorm:", 0) == 0) {
    const std::string arg = text.substr(6);
    if (arg == "inf") return pnorm(Exponent::infinity());
    std::size_t used = 0;
    double p = 0.0;
    try {
      p = std::stod(arg, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != arg.size()) throw UsageError("bad exponent in phi '" + text + "'");
    return pnorm(Exponent::finite(p));
  }
  throw UsageError("unknown phi '" + text + "' (expected sup, supabs or pnorm:<p>)");
}

Phi Phi::symmetrized() const noexcept {
  return kind_ == PhiKind::Sup ? sup_abs() : *this;
}

double Phi::operator()(std::span<const double> x) const {
  if (x.empty()) throw UsageError("phi of an empty vector");
  switch (kind_) {
    case PhiKind::Sup:
      return *std::max_element(x.begin(), x.end());
    case PhiKind::SupAbs: {
      double m = 0.0;
      for (double v : x) m = std::max(m, std::abs(v));
      return m;
    }
    case PhiKind::PNorm:
      return p_norm(x, p_);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

std::string Phi::name() const {
  switch (kind_) {
    case PhiKind::Sup:
      return "sup";
    case PhiKind::SupAbs:
      return "supabs";
    case PhiKind::PNorm:
      return "pnorm:" + p_.to_string();
  }
  return "?";
}

}  // namespace rcr
