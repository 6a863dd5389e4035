#ifndef FRACSOLVE_NUMERICS_TANH_SINH_HPP
#define FRACSOLVE_NUMERICS_TANH_SINH_HPP

#include <cmath>
#include <numbers>
#include <vector>

namespace fracsolve::numerics {

/// A double-exponential node. Distances to both endpoints are kept separately so
/// integrands singular at an endpoint can be evaluated without cancellation.
struct TanhSinhNode {
  double x = 0.0;
  double from_left = 0.0;
  double from_right = 0.0;
  double weight = 0.0;
};

/// Tanh-sinh rule on [a, b] with step 2^-level in the transformed variable.
/// t_max = 6 reaches within ~1e-275 of each endpoint.
inline std::vector<TanhSinhNode> tanh_sinh_rule(double a, double b, int level, double t_max = 6.0) {
  const double h = std::ldexp(1.0, -level);
  const double len = b - a;
  const double half_pi = 0.5 * std::numbers::pi;
  const int kmax = static_cast<int>(std::floor(t_max / h));
  std::vector<TanhSinhNode> rule;
  rule.reserve(2 * kmax + 1);
  for (int k = -kmax; k <= kmax; ++k) {
    const double t = k * h;
    const double v = half_pi * std::sinh(t);
    const double e = std::exp(-2.0 * std::abs(v));
    // 1/cosh^2(v) = 4 e^{-2|v|} / (1 + e^{-2|v|})^2
    const double w = 0.5 * len * h * half_pi * std::cosh(t) * 4.0 * e / ((1.0 + e) * (1.0 + e));
    if (w == 0.0) continue;
    TanhSinhNode n;
    if (v >= 0.0) {
      n.from_right = len * e / (1.0 + e);
      n.from_left = len / (1.0 + e);
    } else {
      n.from_left = len * e / (1.0 + e);
      n.from_right = len / (1.0 + e);
    }
    n.x = v >= 0.0 ? b - n.from_right : a + n.from_left;
    n.weight = w;
    rule.push_back(n);
  }
  return rule;
}

} // namespace fracsolve::numerics

#endif // FRACSOLVE_NUMERICS_TANH_SINH_HPP
