#ifndef FRACSOLVE_SPECFUN_FOX_H_HPP
#define FRACSOLVE_SPECFUN_FOX_H_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <deque>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "fracsolve/errors.hpp"
#include "fracsolve/numerics/gauss_kronrod.hpp"
#include "fracsolve/specfun/descriptor.hpp"
#include "fracsolve/specfun/gamma.hpp"
#include "fracsolve/specfun/series.hpp"

namespace fracsolve::specfun {

/// How the vertical contour Re(s) = gamma is placed.
enum class AbscissaRule {
  Saddle, ///< minimise the integrand size on the real axis inside the pole gap
  Fixed,  ///< min(B_j/beta_j) - 1/2 when l = 0, otherwise the middle of the gap
};

struct PoleGap {
  double left = -std::numeric_limits<double>::infinity();  // largest left pole
  double right = std::numeric_limits<double>::infinity();  // smallest right pole
};

/// Real parts of the pole sequences that the contour must separate.
inline PoleGap pole_gap(const FoxH& h) {
  PoleGap g;
  for (int j = 0; j < h.m; ++j) g.right = std::min(g.right, h.lower[j].shift.real() / h.lower[j].step);
  for (int i = 0; i < h.l; ++i) g.left = std::max(g.left, (h.upper[i].shift.real() - 1.0) / h.upper[i].step);
  return g;
}

namespace detail {

inline double log_cosh(double y) {
  const double a = std::abs(y);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

/// Upper envelope of log|1/Gamma(w)| that ignores the zeros of sin(pi w).
inline double log_abs_recip_gamma_envelope(cplx w) {
  if (w.real() >= 0.5) return -log_gamma(w).real();
  return log_gamma(1.0 - w).real() + log_cosh(std::numbers::pi * w.imag()) - std::log(std::numbers::pi);
}

inline bool conj_closed(const std::vector<cplx>& v) {
  std::vector<bool> used(v.size(), false);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (used[i]) continue;
    if (v[i].imag() == 0.0) {
      used[i] = true;
      continue;
    }
    bool found = false;
    for (std::size_t j = i + 1; j < v.size() && !found; ++j) {
      if (used[j]) continue;
      if (std::abs(v[j] - std::conj(v[i])) <= 1e-13 * std::max(1.0, std::abs(v[i]))) {
        used[i] = used[j] = true;
        found = true;
      }
    }
    if (!found) return false;
  }
  return true;
}

} // namespace detail

/// Mellin-Barnes contour evaluator for one H-function descriptor. Values of the
/// gamma ratio on each contour line are memoised, so repeated evaluation at many
/// arguments (as residual checks do) costs little more than the x^s factors.
/// Instances are not safe for concurrent use; create one per thread.
class FoxHEvaluator {
public:
  explicit FoxHEvaluator(FoxH h, AbscissaRule rule = AbscissaRule::Saddle) : h_(std::move(h)), rule_(rule) {
    validate(h_);
    mu_ = mu_index(h_);
    gap_ = pole_gap(h_);
    if (!(gap_.left < gap_.right)) {
      std::ostringstream os;
      os << "Fox H: no vertical contour separates the poles (left poles reach " << gap_.left
         << ", right poles start at " << gap_.right << ")";
      throw DomainError(os.str());
    }
    const double width = gap_.right - gap_.left;
    margin_ = std::isfinite(width) ? std::min(0.25, width / 4.0) : 0.25;
    std::vector<cplx> shifts;
    for (const auto& r : h_.upper) shifts.push_back(r.shift);
    bool closed = detail::conj_closed(shifts);
    shifts.clear();
    for (const auto& r : h_.lower) shifts.push_back(r.shift);
    closed = closed && detail::conj_closed(shifts);
    conj_symmetric_ = closed;
  }

  const FoxH& descriptor() const { return h_; }
  double mu() const { return mu_; }
  PoleGap gap() const { return gap_; }

  /// log|Theta(sigma) x^sigma| on the real axis, with denominators replaced by their envelope.
  double log_size(double sigma, double log_abs_x) const {
    double v = sigma * log_abs_x;
    for (int j = 0; j < h_.q(); ++j) {
      const auto& r = h_.lower[j];
      if (j < h_.m)
        v += log_gamma(r.shift - r.step * sigma).real();
      else
        v += detail::log_abs_recip_gamma_envelope(1.0 - r.shift + r.step * sigma);
    }
    for (int i = 0; i < h_.p(); ++i) {
      const auto& r = h_.upper[i];
      if (i < h_.l)
        v += log_gamma(1.0 - r.shift + r.step * sigma).real();
      else
        v += detail::log_abs_recip_gamma_envelope(r.shift - r.step * sigma);
    }
    return v;
  }

  /// Contour abscissa for argument x under the configured rule.
  double abscissa(cplx x) const {
    const double lo = gap_.left + margin_;
    const double hi = gap_.right - margin_;
    if (rule_ == AbscissaRule::Fixed) {
      if (h_.l == 0) return gap_.right - 0.5 > gap_.left ? gap_.right - 0.5 : 0.5 * (gap_.left + gap_.right);
      if (h_.m == 0) return gap_.left + 0.5;
      return 0.5 * (gap_.left + gap_.right);
    }
    const double lx = std::log(std::abs(x));
    auto f = [&](double s) {
      const double v = log_size(s, lx);
      return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    };
    std::vector<double> cand;
    if (std::isfinite(lo) && std::isfinite(hi)) {
      if (hi <= lo) return 0.5 * (gap_.left + gap_.right);
      for (int i = 0; i <= 40; ++i) cand.push_back(lo + (hi - lo) * i / 40.0);
    } else if (std::isfinite(hi)) {
      for (int j = 0; j <= 44; ++j) cand.push_back(hi - 0.25 * (std::ldexp(1.0, j) - 1.0));
      std::reverse(cand.begin(), cand.end());
    } else {
      for (int j = 0; j <= 44; ++j) cand.push_back(lo + 0.25 * (std::ldexp(1.0, j) - 1.0));
    }
    std::size_t best = 0;
    double fbest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cand.size(); ++i) {
      const double v = f(cand[i]);
      if (v < fbest) {
        fbest = v;
        best = i;
      }
    }
    double a = cand[best == 0 ? 0 : best - 1];
    double b = cand[std::min(best + 1, cand.size() - 1)];
    // golden-section refinement
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 60 && std::abs(b - a) > 1e-6 * (1.0 + std::abs(a)); ++it) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - gr * (b - a);
        fc = f(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + gr * (b - a);
        fd = f(d);
      }
    }
    double s = 0.5 * (a + b);
    if (f(s) > fbest) s = cand[best];
    // quantise so that nearby arguments share the memoised line
    const double quantum = std::ldexp(1.0 / 16.0, std::max(0, std::ilogb(std::abs(s) / 8.0)));
    const double q = std::round(s / quantum) * quantum;
    if (q >= lo && q <= hi) s = q;
    return s;
  }

  /// Evaluates (1/2 pi i) Int Theta(s) M(s) x^s ds, M(s) = (rho + sigma s)_N falling.
  Evaluated<cplx> integrate(cplx x, double tol, double rho = 0.0, double sigma = 0.0, int N = 0) {
    if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
    if (x == cplx(0.0, 0.0)) throw DomainError("Fox H: argument must be nonzero");
    const double argx = std::arg(x);
    if (!(std::abs(argx) < 0.5 * std::numbers::pi * mu_)) {
      std::ostringstream os;
      os << "Fox H: |arg z| = " << std::abs(argx) << " violates |arg z| < pi*mu/2 = " << 0.5 * std::numbers::pi * mu_;
      throw DomainError(os.str());
    }
    const double gamma_line = abscissa(x);
    Evaluated<cplx> out;
    const double lx = std::log(std::abs(x));
    const double peak = log_size(gamma_line, lx);
    if (peak < -700.0) {
      out.value = 0.0;
      out.diagnostics.converged = true;
      return out;
    }
    Line& line = line_for(gamma_line);
    const cplx logx = std::log(x);
    const bool symmetric = conj_symmetric_ && x.imag() == 0.0 && x.real() > 0.0;

    auto g = [&](double t, bool upper_half) -> cplx {
      const cplx s(gamma_line, upper_half ? t : -t);
      const cplx lt = line.log_theta(*this, t, upper_half);
      if (lt.real() == -std::numeric_limits<double>::infinity()) return 0.0;
      cplx v = std::exp(lt + s * logx);
      if (N > 0) v *= detail::falling(rho + sigma * s, N);
      return v;
    };
    auto h = [&](double t) -> cplx {
      if (symmetric) return 2.0 * std::real(g(t, true));
      return g(t, true) + g(t, false);
    };

    numerics::AdaptiveIntegrator<decltype(h)> integ(h);
    // each panel reports at least 50 eps * l1; large exponents add rounding noise of
    // relative size eps * |exponent| to every integrand value
    const double eps = std::numeric_limits<double>::epsilon();
    const double exponent = std::abs(line.log_theta(*this, 0.0, true)) + std::abs(gamma_line * logx);
    const double floor_eps = std::max(200.0 * eps, 20.0 * eps * exponent);
    const double tiny = 1e6 * std::numeric_limits<double>::min();
    auto target = [&]() { return std::max({tol * std::abs(integ.value()), floor_eps * integ.l1(), tiny}); };
    double a = 0.0, b = 1.0;
    int small_panels = 0;
    for (;;) {
      const numerics::Segment s = integ.add(a, b);
      integ.refine(target());
      const double scale = std::max(std::abs(integ.value()), floor_eps * integ.l1());
      if (s.l1 < 0.1 * tol * scale || s.l1 == 0.0)
        ++small_panels;
      else
        small_panels = 0;
      if (small_panels >= 2 && b >= 4.0) break;
      a = b;
      b *= 2.0;
      if (b > 1e7) throw ConvergenceError("Fox H: contour integrand does not decay (half-height exceeded 1e7)");
    }
    if (!integ.refine(target(), 20000) && integ.error() > 1e3 * target())
      throw ConvergenceError("Fox H: contour quadrature stalled before reaching the tolerance");

    const double inv2pi = 0.5 / std::numbers::pi;
    out.value = integ.value() * inv2pi;
    out.diagnostics.terms_used = integ.evaluations();
    out.diagnostics.contour_half_height = b;
    out.diagnostics.tail_estimate = std::abs(out.value) > 0.0 ? integ.error() * inv2pi / std::abs(out.value) : 0.0;
    out.diagnostics.converged = integ.error() <= target() * 1.0000001;
    out.diagnostics.condition = std::abs(integ.value()) > 0.0 ? integ.l1() / std::abs(integ.value()) : 1.0;
    return out;
  }

  /// N-th derivative in z of z^rho * H[A z^sigma] at z > 0.
  Evaluated<cplx> scaled(cplx A, double rho, double sigma, int N, double z, double tol) {
    if (!(z > 0.0)) throw DomainError("Fox H term evaluation requires z > 0");
    const double zs = std::pow(z, sigma);
    if (std::isinf(zs) && h_.l == 0) {
      // H^{m,0} vanishes exponentially as its argument grows
      Evaluated<cplx> r;
      r.diagnostics.converged = true;
      return r;
    }
    if (zs == 0.0 || std::isinf(zs)) throw DomainError("Fox H: argument A z^sigma is not representable");
    Evaluated<cplx> r = integrate(A * zs, tol, rho, sigma, N);
    r.value *= std::pow(z, rho - N);
    return r;
  }

private:
  struct Line {
    double gamma = 0.0;
    std::unordered_map<double, cplx> upper_cache, lower_cache;

    cplx log_theta(const FoxHEvaluator& ev, double t, bool upper_half) {
      auto& cache = upper_half ? upper_cache : lower_cache;
      auto it = cache.find(t);
      if (it != cache.end()) return it->second;
      if (cache.size() > 200000) cache.clear();
      const cplx v = ev.log_theta(cplx(gamma, upper_half ? t : -t));
      cache.emplace(t, v);
      return v;
    }
  };

  /// log of the gamma ratio; -inf real part when a denominator gamma has a pole.
  cplx log_theta(cplx s) const {
    cplx v = 0.0;
    for (int j = 0; j < h_.q(); ++j) {
      const auto& r = h_.lower[j];
      if (j < h_.m) {
        v += log_gamma(r.shift - r.step * s);
      } else {
        const cplx w = 1.0 - r.shift + r.step * s;
        if (is_nonpositive_integer(w)) return {-std::numeric_limits<double>::infinity(), 0.0};
        v -= log_gamma(w);
      }
    }
    for (int i = 0; i < h_.p(); ++i) {
      const auto& r = h_.upper[i];
      if (i < h_.l) {
        v += log_gamma(1.0 - r.shift + r.step * s);
      } else {
        const cplx w = r.shift - r.step * s;
        if (is_nonpositive_integer(w)) return {-std::numeric_limits<double>::infinity(), 0.0};
        v -= log_gamma(w);
      }
    }
    return v;
  }

  Line& line_for(double gamma_line) {
    for (auto& l : lines_)
      if (l.gamma == gamma_line) return l;
    if (lines_.size() >= 64) lines_.pop_front();
    lines_.push_back(Line{gamma_line, {}, {}});
    return lines_.back();
  }

  FoxH h_;
  AbscissaRule rule_;
  double mu_ = 0.0;
  PoleGap gap_;
  double margin_ = 0.25;
  bool conj_symmetric_ = false;
  std::deque<Line> lines_;
};

inline Evaluated<cplx> fox_h_eval(const FoxH& h, cplx z, double tol, AbscissaRule rule = AbscissaRule::Saddle) {
  FoxHEvaluator ev(h, rule);
  return ev.integrate(z, tol);
}

/// H^{m,l}_{p,q}[z] by contour integration.
inline cplx fox_h(const FoxH& h, cplx z, double tol = 1e-12) { return fox_h_eval(h, z, tol).value; }

} // namespace fracsolve::specfun

#endif // FRACSOLVE_SPECFUN_FOX_H_HPP
