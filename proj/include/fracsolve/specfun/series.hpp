#ifndef FRACSOLVE_SPECFUN_SERIES_HPP
#define FRACSOLVE_SPECFUN_SERIES_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <sstream>

#include "fracsolve/errors.hpp"
#include "fracsolve/specfun/descriptor.hpp"
#include "fracsolve/specfun/gamma.hpp"

namespace fracsolve::specfun {

inline constexpr std::size_t kMaxSeriesTerms = 100000;

namespace detail {

/// Complex number stored as mantissa * 2^exponent so that products of many
/// gamma values neither overflow nor underflow.
struct Scaled {
  cplx mant{1.0, 0.0};
  long exp2 = 0;
  bool zero = false;

  void normalize() {
    const double big = std::max(std::abs(mant.real()), std::abs(mant.imag()));
    if (big == 0.0) {
      zero = true;
      return;
    }
    int e = 0;
    std::frexp(big, &e);
    mant = cplx(std::ldexp(mant.real(), -e), std::ldexp(mant.imag(), -e));
    exp2 += e;
  }

  void mul(cplx v) {
    if (zero) return;
    mant *= v;
    normalize();
  }

  /// multiplies by exp(log_value)
  void mul_exp(cplx log_value) {
    if (zero) return;
    const double re = log_value.real() / std::numbers::ln2;
    const double e = std::floor(re);
    const double frac = (re - e) * std::numbers::ln2;
    mant *= std::polar(std::exp(frac), log_value.imag());
    exp2 += static_cast<long>(e);
    normalize();
  }

  cplx value() const {
    if (zero) return 0.0;
    if (exp2 > 2000) return {std::numeric_limits<double>::infinity(), 0.0};
    if (exp2 < -2000) return 0.0;
    const int e = static_cast<int>(exp2);
    return {std::ldexp(mant.real(), e), std::ldexp(mant.imag(), e)};
  }
};

/// Multiplies s by Gamma(z) (or 1/Gamma(z) when reciprocal) without overflow.
inline void mul_gamma(Scaled& s, cplx z, bool reciprocal) {
  if (s.zero) return;
  if (is_nonpositive_integer(z)) {
    if (reciprocal) {
      s.zero = true;
      return;
    }
    throw_pole(z);
  }
  if (z.imag() == 0.0) {
    const double x = z.real();
    if (std::abs(x) < 170.0) {
      const double g = std::tgamma(x);
      if (std::isfinite(g) && g != 0.0) {
        s.mul(reciprocal ? 1.0 / g : g);
        return;
      }
    }
    int sign = 1;
    const double lg = ::lgamma_r(x, &sign);
    const cplx lv(reciprocal ? -lg : lg, sign < 0 ? std::numbers::pi : 0.0);
    s.mul_exp(lv);
    return;
  }
  if (std::abs(z) < 140.0 && std::abs(z.imag()) < 20.0) {
    const cplx g = gamma(z);
    s.mul(reciprocal ? 1.0 / g : g);
    return;
  }
  const cplx lg = log_gamma(z);
  s.mul_exp(reciprocal ? -lg : lg);
}

/// Compensated (Neumaier) complex accumulator.
struct CompensatedSum {
  double re = 0.0, im = 0.0, cre = 0.0, cim = 0.0;

  static void add(double& sum, double& comp, double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  void add(cplx v) {
    add(re, cre, v.real());
    add(im, cim, v.imag());
  }
  cplx value() const { return {re + cre, im + cim}; }
};

struct NoMultiplier {
  cplx operator()(std::size_t) const { return 1.0; }
};

/// Falling factorial (x)(x-1)...(x-n+1).
inline cplx falling(cplx x, int n) {
  cplx r = 1.0;
  for (int i = 0; i < n; ++i) r *= x - static_cast<double>(i);
  return r;
}

/// Index past which the terms of the series decrease geometrically.
inline double decay_onset(const GenWright& g, double abs_w) {
  double log_eps = 0.0;
  for (const auto& r : g.upper)
    if (r.step != 0.0) log_eps += r.step * std::log(std::abs(r.step));
  for (const auto& r : g.lower)
    if (r.step != 0.0) log_eps -= r.step * std::log(std::abs(r.step));
  const double delta = delta_index(g);
  if (abs_w == 0.0) return 0.0;
  const double l = (std::log(abs_w) + log_eps) / (1.0 + delta);
  return l > 700.0 ? 1e300 : std::exp(l);
}

/// Sums multiplier(k) * prod Gamma(A_i + alpha_i k) / prod Gamma(B_j + beta_j k) * w^k / k!.
template <class Multiplier>
Evaluated<cplx> sum_gen_wright(const GenWright& g, cplx w, double tol, Multiplier mult) {
  // An upper row (1, 1) cancels the k! exactly.
  std::size_t cancel = g.upper.size();
  for (std::size_t i = 0; i < g.upper.size(); ++i) {
    if (g.upper[i].shift == cplx(1.0, 0.0) && g.upper[i].step == 1.0) {
      cancel = i;
      break;
    }
  }

  Evaluated<cplx> out;
  CompensatedSum sum;
  Scaled power; // w^k / k!  (or w^k)
  const double onset = decay_onset(g, std::abs(w));
  double max_term = 0.0;
  double last_nonzero = 0.0;
  int small_run = 0;

  for (std::size_t k = 0; k < kMaxSeriesTerms; ++k) {
    if (k > 0) {
      power.mul(cancel < g.upper.size() ? w : w / static_cast<double>(k));
      if (power.zero) break; // w^k underflowed to zero
    }
    Scaled t = power;
    const double kd = static_cast<double>(k);
    for (std::size_t i = 0; i < g.upper.size(); ++i)
      if (i != cancel) mul_gamma(t, g.upper[i].shift + g.upper[i].step * kd, false);
    for (const auto& r : g.lower) mul_gamma(t, r.shift + r.step * kd, true);
    const cplx m = mult(k);
    if (m == cplx(0.0, 0.0)) t.zero = true;
    t.mul(m);
    const cplx term = t.value();
    if (!std::isfinite(term.real()) || !std::isfinite(term.imag()))
      throw ConvergenceError("generalized Wright series: term overflow (argument beyond the practical series radius)");
    sum.add(term);
    const double at = std::abs(term);
    max_term = std::max(max_term, at);
    if (at > 0.0) last_nonzero = at;
    out.diagnostics.terms_used = k + 1;

    const double scale = std::max(std::abs(sum.value()), std::numeric_limits<double>::min());
    if (at < tol * scale)
      ++small_run;
    else
      small_run = 0;
    if (small_run >= 3 && kd >= onset) {
      out.value = sum.value();
      out.diagnostics.converged = true;
      out.diagnostics.tail_estimate = last_nonzero / scale;
      if (out.diagnostics.tail_estimate > tol) out.diagnostics.tail_estimate = at / scale;
      out.diagnostics.condition = std::abs(out.value) > 0.0 ? max_term / std::abs(out.value) : 1.0;
      if (!std::isfinite(out.value.real()) || !std::isfinite(out.value.imag()))
        throw ConvergenceError("generalized Wright series: sum overflow");
      return out;
    }
    if (power.zero && k > 0) break;
  }
  if (power.zero) {
    out.value = sum.value();
    out.diagnostics.converged = true;
    out.diagnostics.tail_estimate = 0.0;
    out.diagnostics.condition = 1.0;
    return out;
  }
  std::ostringstream os;
  os << "generalized Wright series did not converge within " << kMaxSeriesTerms << " terms";
  throw ConvergenceError(os.str());
}

inline void check_tol(double tol) {
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
}

} // namespace detail

/// pPsi_q[z] by direct summation, with diagnostics.
inline Evaluated<cplx> gen_wright_eval(const GenWright& g, cplx z, double tol) {
  detail::check_tol(tol);
  validate(g);
  return detail::sum_gen_wright(g, z, tol, detail::NoMultiplier{});
}

inline cplx gen_wright(const std::vector<UpperRow>& upper, const std::vector<LowerRow>& lower, cplx z,
                       double tol) {
  return gen_wright_eval(GenWright{upper, lower}, z, tol).value;
}

/// N-th derivative in x of x^rho * pPsi_q[A x^sigma] at x > 0, summed term-wise:
/// sum_k c_k A^k (rho + sigma k)_N x^{rho + sigma k - N}.
inline Evaluated<cplx> gen_wright_scaled(const GenWright& g, cplx A, double rho, double sigma, int N, double x,
                                         double tol) {
  detail::check_tol(tol);
  validate(g);
  if (!(x > 0.0)) throw DomainError("series evaluation requires x > 0");
  if (N < 0) throw DomainError("derivative order must be non-negative");
  const cplx w = A * std::pow(x, sigma);
  auto mult = [&](std::size_t k) { return detail::falling(cplx(rho + sigma * static_cast<double>(k)), N); };
  Evaluated<cplx> r = detail::sum_gen_wright(g, w, tol, mult);
  r.value *= std::pow(x, rho - N);
  return r;
}

inline Evaluated<cplx> mittag_leffler_eval(double alpha, double beta, cplx z, double tol) {
  if (!(alpha > 0.0)) throw DomainError("Mittag-Leffler: alpha must be positive");
  return gen_wright_eval(as_gen_wright(MittagLeffler{alpha, beta}), z, tol);
}

/// E_{alpha,beta}(z)
inline cplx mittag_leffler(double alpha, double beta, cplx z, double tol = 1e-15) {
  return mittag_leffler_eval(alpha, beta, z, tol).value;
}

inline Evaluated<cplx> wright_eval(cplx z, double alpha, double beta, double tol) {
  if (!(alpha > -1.0)) throw DomainError("Wright function: alpha must exceed -1");
  detail::check_tol(tol);
  // alpha = 0 is admissible here although a zero step is not for general pPsi_q
  return detail::sum_gen_wright(as_gen_wright(Wright{alpha, beta}), z, tol, detail::NoMultiplier{});
}

/// Psi(z; alpha, beta)
inline cplx wright(cplx z, double alpha, double beta, double tol = 1e-15) {
  return wright_eval(z, alpha, beta, tol).value;
}

} // namespace fracsolve::specfun

#endif // FRACSOLVE_SPECFUN_SERIES_HPP
