#ifndef FRACSOLVE_FRACDERIV_HPP
#define FRACSOLVE_FRACDERIV_HPP

#include <cmath>
#include <complex>
#include <optional>
#include <sstream>
#include <vector>

#include "fracsolve/errors.hpp"
#include "fracsolve/numerics/finite_difference.hpp"
#include "fracsolve/numerics/gauss_jacobi.hpp"
#include "fracsolve/numerics/tanh_sinh.hpp"
#include "fracsolve/specfun/gamma.hpp"

namespace fracsolve::fracderiv {

using cplx = std::complex<double>;

inline constexpr double kIntegerOrderTolerance = 1e-12;

/// Order alpha > 0 of a Riemann-Liouville derivative with n - 1 < alpha <= n.
struct FracOrder {
  double alpha = 1.0;
  int n = 1;

  static FracOrder make(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("derivative order alpha must be positive");
    const double r = std::round(alpha);
    if (std::abs(alpha - r) <= kIntegerOrderTolerance * std::max(1.0, alpha))
      return {r, static_cast<int>(r)};
    return {alpha, static_cast<int>(std::ceil(alpha))};
  }

  bool is_integer() const { return alpha == static_cast<double>(n); }
};

/// coeff * z^exponent
struct PowerTerm {
  cplx coeff{1.0, 0.0};
  double exponent = 0.0;
};

/// d^alpha z^beta = Gamma(1+beta)/Gamma(1+beta-alpha) z^{beta-alpha}; the
/// coefficient is exactly zero when 1+beta-alpha is a non-positive integer.
inline PowerTerm rl_power(FracOrder order, double beta) {
  if (!(beta > -1.0)) {
    std::ostringstream os;
    os << "power rule needs exponent > -1, got " << beta;
    throw DomainError(os.str());
  }
  const double c = specfun::gamma(1.0 + beta) * specfun::recip_gamma(1.0 + beta - order.alpha);
  return {c, beta - order.alpha};
}

/// Term-by-term derivative of a finite power sum; exact-zero terms are dropped.
inline std::vector<PowerTerm> rl_series(const std::vector<PowerTerm>& terms, FracOrder order) {
  std::vector<PowerTerm> out;
  out.reserve(terms.size());
  for (const auto& t : terms) {
    const PowerTerm d = rl_power(order, t.exponent);
    const cplx c = t.coeff * d.coeff;
    if (c != cplx(0.0, 0.0)) out.push_back({c, d.exponent});
  }
  return out;
}

struct NumericDerivative {
  cplx value{};
  double error = 0.0;          // Richardson disagreement
  double quadrature_error = 0.0; // last change of the inner rules when they were fixed
  int gauss_jacobi_nodes = 0;
  int tanh_sinh_level = 0;
  double step = 0.0;
};

struct RlOptions {
  std::optional<double> step; // finite-difference step; default scales with z and n
  std::optional<int> accuracy; // central-difference accuracy order (even)
  double abs_floor = 0.0;     // absolute error accepted regardless of |value|
  bool check_singularity = true;
  bool strict = true;         // false: return the best estimate instead of throwing
};

/// Default finite-difference step relative to z, tuned per derivative order so that
/// sixth-order truncation and rounding noise amplified by h^-n stay near 1e-8.
inline double default_step(double z, int n) {
  static constexpr double rel[] = {0.005, 0.005, 0.01, 0.04, 0.06};
  return z * (n < 5 ? rel[n] : 0.08);
}

/// Central-difference accuracy order used for the n-th derivative.
inline int stencil_accuracy(int n) { return n >= 3 ? 6 : 4; }

namespace detail {

/// Inner integral int_0^1 (1-u)^a f(y u) du with rules frozen after construction.
class KernelIntegral {
public:
  template <class F>
  KernelIntegral(F& f, double a, double y, double agree) : a_(a) {
    // [1/2, 1]: Gauss-Jacobi with weight (1-x)^a after u = 3/4 + x/4
    cplx prev = 0.0;
    for (int n = 32;; n *= 2) {
      set_jacobi(n);
      const cplx v = jacobi_part(f, y);
      const double err = std::abs(v - prev);
      if (n > 32 && (err <= agree * std::max(std::abs(v), l1_j_) || n >= 512)) {
        quad_err_ += err;
        break;
      }
      prev = v;
    }
    // [0, 1/2]: tanh-sinh copes with integrable power singularities of f at 0
    prev = 0.0;
    for (int level = 3;; ++level) {
      ts_ = numerics::tanh_sinh_rule(0.0, 0.5, level);
      const cplx v = tanh_part(f, y);
      const double err = std::abs(v - prev);
      if (level > 3 && (err <= agree * std::max(std::abs(v), l1_t_) || level >= 8)) {
        quad_err_ += err;
        level_ = level;
        break;
      }
      prev = v;
    }
  }

  template <class F>
  cplx operator()(F& f, double y) {
    return jacobi_part(f, y) + tanh_part(f, y);
  }

  double quadrature_error() const { return quad_err_; }
  int jacobi_nodes() const { return static_cast<int>(gj_.nodes.size()); }
  int tanh_level() const { return level_; }

private:
  void set_jacobi(int n) {
    gj_ = numerics::gauss_jacobi(n, a_, 0.0);
    gj_scale_ = std::pow(4.0, -a_ - 1.0);
  }

  template <class F>
  cplx jacobi_part(F& f, double y) {
    cplx s = 0.0;
    double l1 = 0.0;
    for (std::size_t i = 0; i < gj_.nodes.size(); ++i) {
      const double u = 0.75 + 0.25 * gj_.nodes[i];
      const cplx v = cplx(f(y * u));
      s += gj_.weights[i] * v;
      l1 += gj_.weights[i] * std::abs(v);
    }
    l1_j_ = l1 * gj_scale_;
    return s * gj_scale_;
  }

  template <class F>
  cplx tanh_part(F& f, double y) {
    cplx s = 0.0;
    double l1 = 0.0;
    for (const auto& nd : ts_) {
      const double u = nd.from_left;
      if (u <= 0.0) continue;
      const double w = nd.weight * std::pow(1.0 - u, a_);
      const cplx v = cplx(f(y * u));
      s += w * v;
      l1 += w * std::abs(v);
    }
    l1_t_ = l1;
    return s;
  }

  double a_;
  numerics::QuadratureRule gj_;
  double gj_scale_ = 1.0;
  std::vector<numerics::TanhSinhNode> ts_;
  double l1_j_ = 0.0, l1_t_ = 0.0;
  double quad_err_ = 0.0;
  int level_ = 0;
};

/// Rough power-law exponent of f at 0+, from two small arguments.
template <class F>
std::optional<double> local_exponent(F& f, double z) {
  const double s1 = z * 1e-6, s2 = z * 1e-9;
  const double f1 = std::abs(cplx(f(s1))), f2 = std::abs(cplx(f(s2)));
  if (!(f1 > 0.0) || !(f2 > 0.0) || !std::isfinite(f1) || !std::isfinite(f2)) return std::nullopt;
  return std::log(f1 / f2) / std::log(s1 / s2);
}

} // namespace detail

/// Riemann-Liouville derivative of order alpha of f at z > 0:
/// d^n/dz^n [ z^{n-alpha}/Gamma(n-alpha) int_0^1 (1-u)^{n-alpha-1} f(z u) du ].
/// Inner rules are fixed at z before differencing, so quadrature error varies
/// smoothly across the stencil.
template <class F>
NumericDerivative rl_numeric(F&& f, FracOrder order, double z, double tol, const RlOptions& opt = {}) {
  if (!(z > 0.0)) throw DomainError("rl_numeric requires z > 0");
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  auto fc = [&](double s) { return cplx(f(s)); };
  const int n = order.n;
  NumericDerivative out;
  out.step = opt.step.value_or(default_step(z, n));

  const bool adaptive = !opt.step && !opt.accuracy;
  auto pass = [&](const NumericDerivative& r) {
    return r.error <= std::max(tol * std::abs(r.value), opt.abs_floor);
  };
  // Rounding noise grows like h^-n; widen the stencil while it stays inside (0, z).
  auto difference = [&](auto& g) {
    const int acc0 = opt.accuracy.value_or(stencil_accuracy(n));
    auto d = numerics::richardson_derivative(g, z, n, out.step, 2e-16, acc0);
    out.value = d.value;
    out.error = d.error;
    if (!adaptive || pass(out)) return;
    const double base = out.step;
    for (int acc : {acc0, 4}) {
      if (acc == 4 && acc0 == 4) break;
      const double reach = 2.0 * numerics::central_half_width(n, acc);
      for (double h = base * (acc == acc0 ? 1.25 : 1.0); reach * h <= 0.85 * z; h *= 1.25) {
        d = numerics::richardson_derivative(g, z, n, h, 2e-16, acc);
        if (d.error < out.error) {
          out.value = d.value;
          out.error = d.error;
          out.step = h;
          if (pass(out)) return;
        }
      }
    }
  };

  if (order.is_integer()) {
    difference(fc);
  } else {
    if (opt.check_singularity) {
      if (auto e = detail::local_exponent(fc, z); e && *e <= -1.0 + 1e-3) {
        std::ostringstream os;
        os << "function is not integrable at 0 (local exponent ~ " << *e << ")";
        throw DomainError(os.str());
      }
    }
    const double a = n - order.alpha - 1.0;
    const double agree = std::min(0.5 * tol, std::max(1e-3 * tol, 1e-12));
    detail::KernelIntegral kernel(fc, a, z, agree);
    const double rg = specfun::recip_gamma(static_cast<double>(n) - order.alpha);
    auto G = [&](double y) { return std::pow(y, n - order.alpha) * rg * kernel(fc, y); };
    difference(G);
    out.quadrature_error = kernel.quadrature_error();
    out.gauss_jacobi_nodes = kernel.jacobi_nodes();
    out.tanh_sinh_level = kernel.tanh_level();
  }
  if (opt.strict && !pass(out)) {
    std::ostringstream os;
    os << "rl_numeric: extrapolated derivative estimates disagree by " << out.error << " at z = " << z
       << " (|value| = " << std::abs(out.value) << ")";
    throw ConvergenceError(os.str());
  }
  return out;
}

} // namespace fracsolve::fracderiv

#endif // FRACSOLVE_FRACDERIV_HPP
