#ifndef FRACSOLVE_NUMERICS_GAUSS_KRONROD_HPP
#define FRACSOLVE_NUMERICS_GAUSS_KRONROD_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <queue>
#include <vector>

namespace fracsolve::numerics {

using cplx = std::complex<double>;

/// 10-point Gauss / 21-point Kronrod pair (QUADPACK qk21 constants).
struct GaussKronrod21 {
  static constexpr std::array<double, 11> xgk = {
      0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
      0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
      0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
      0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
      0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
      0.0};
  static constexpr std::array<double, 11> wgk = {
      0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
      0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
      0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
      0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
      0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
      0.149445554002916905664936468389821};
  // Gauss weights for xgk[1], xgk[3], ..., xgk[9]
  static constexpr std::array<double, 5> wg = {
      0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
      0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
      0.295524224714752870173892994651338};
};

struct Segment {
  double a = 0.0;
  double b = 0.0;
  cplx value{};
  double error = 0.0;
  double l1 = 0.0; // integral of |f|

  bool operator<(const Segment& other) const { return error < other.error; }
};

/// One GK21 panel; the error estimate follows QUADPACK's scaling heuristic.
template <class F>
Segment gk21(F& f, double a, double b) {
  using R = GaussKronrod21;
  const double centr = 0.5 * (a + b);
  const double hlgth = 0.5 * (b - a);
  const double dhlgth = std::abs(hlgth);

  const cplx fc = f(centr);
  cplx resg = 0.0;
  cplx resk = fc * R::wgk[10];
  double resabs = std::abs(fc) * R::wgk[10];
  std::array<cplx, 10> fv1{}, fv2{};
  for (std::size_t j = 0; j < 10; ++j) {
    const double absc = hlgth * R::xgk[j];
    const cplx f1 = f(centr - absc);
    const cplx f2 = f(centr + absc);
    fv1[j] = f1;
    fv2[j] = f2;
    resk += R::wgk[j] * (f1 + f2);
    resabs += R::wgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) resg += R::wg[j / 2] * (f1 + f2);
  }
  const cplx reskh = resk * 0.5;
  double resasc = R::wgk[10] * std::abs(fc - reskh);
  for (std::size_t j = 0; j < 10; ++j)
    resasc += R::wgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));

  Segment s;
  s.a = a;
  s.b = b;
  s.value = resk * hlgth;
  s.l1 = resabs * dhlgth;
  resasc *= dhlgth;
  double err = std::abs((resk - resg) * hlgth);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (s.l1 > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * s.l1, err);
  s.error = err;
  return s;
}

/// Globally adaptive GK21 integration over a growing set of panels.
template <class F>
class AdaptiveIntegrator {
public:
  explicit AdaptiveIntegrator(F f) : f_(std::move(f)) {}

  /// Adds [a, b] as a fresh panel and returns the panel's coarse estimate.
  Segment add(double a, double b) {
    Segment s = gk21(f_, a, b);
    evaluations_ += 21;
    push(s);
    return s;
  }

  /// Bisects the worst panel until the summed error is below target.
  /// Returns false if the segment budget is exhausted first.
  bool refine(double target, std::size_t max_segments = 4000) {
    while (error_ > target) {
      if (heap_.size() >= max_segments) return false;
      Segment worst = heap_.top();
      heap_.pop();
      value_ -= worst.value;
      error_ -= worst.error;
      l1_ -= worst.l1;
      const double mid = 0.5 * (worst.a + worst.b);
      if (!(mid > worst.a && mid < worst.b)) {
        // cannot split further; accept it
        push(worst);
        return false;
      }
      push(gk21(f_, worst.a, mid));
      push(gk21(f_, mid, worst.b));
      evaluations_ += 42;
      // guard against drift in the running error sum
      if (error_ < 0.0) recompute();
    }
    return true;
  }

  cplx value() const { return value_; }
  double error() const { return error_; }
  double l1() const { return l1_; }
  std::size_t evaluations() const { return evaluations_; }
  std::size_t segments() const { return heap_.size(); }

private:
  void push(const Segment& s) {
    heap_.push(s);
    value_ += s.value;
    error_ += s.error;
    l1_ += s.l1;
  }

  void recompute() {
    auto copy = heap_;
    value_ = 0.0;
    error_ = 0.0;
    l1_ = 0.0;
    while (!copy.empty()) {
      value_ += copy.top().value;
      error_ += copy.top().error;
      l1_ += copy.top().l1;
      copy.pop();
    }
  }

  F f_;
  std::priority_queue<Segment> heap_;
  cplx value_ = 0.0;
  double error_ = 0.0;
  double l1_ = 0.0;
  std::size_t evaluations_ = 0;
};

struct QuadratureResult {
  cplx value{};
  double error = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

/// Adaptive integration of a complex-valued f over [a, b].
template <class F>
QuadratureResult integrate(F f, double a, double b, double abs_tol, double rel_tol,
                           std::size_t max_segments = 2000) {
  AdaptiveIntegrator<F> integ(std::move(f));
  integ.add(a, b);
  bool ok = true;
  for (;;) {
    const double target = std::max(abs_tol, rel_tol * std::abs(integ.value()));
    if (integ.error() <= target) break;
    if (!integ.refine(target, max_segments)) {
      ok = integ.error() <= std::max(abs_tol, rel_tol * std::abs(integ.value()));
      break;
    }
  }
  return {integ.value(), integ.error(), integ.evaluations(), ok};
}

} // namespace fracsolve::numerics

#endif // FRACSOLVE_NUMERICS_GAUSS_KRONROD_HPP
