#ifndef FRACSOLVE_VERIFY_HPP
#define FRACSOLVE_VERIFY_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <utility>
#include <vector>

#include "json.hpp"

#include "fracsolve/charpoly.hpp"
#include "fracsolve/errors.hpp"
#include "fracsolve/fracderiv.hpp"
#include "fracsolve/solutions.hpp"

namespace fracsolve::verify {

using cplx = std::complex<double>;

inline constexpr double kDefaultTolerance = 1e-5;
inline constexpr double kAbsoluteFloor = 1e-8;
inline const std::vector<double> kDefaultPoints{0.5, 1.0, 2.0};

struct ResidualReport {
  std::vector<double> points;
  std::vector<cplx> lhs;
  std::vector<cplx> rhs;
  std::vector<double> abs_residual;
  std::vector<double> rel_residual;
  std::vector<double> lhs_error; // error estimate of the numerical fractional derivative
  double max_rel = 0.0;
  double tolerance = kDefaultTolerance;
  bool pass = true;
};

struct VerifyOptions {
  double floor = kAbsoluteFloor;
  double eval_tol = 1e-14;    // special-function tolerance on the right-hand side
  double lhs_eval_tol = 1e-16; // finite differences amplify any jitter in the evaluated values
};

namespace detail {

/// The left side comes from quadrature and finite differences of evaluated values,
/// the right side from analytic term-wise derivatives.
inline cplx cauchy_euler(const std::vector<double>& coeffs, double alpha, double z,
                         solutions::ExpressionEvaluator& ev, const std::vector<cplx>& c, double eval_tol) {
  cplx sum = 0.0;
  double scale = 1.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (coeffs[i] != 0.0) sum += coeffs[i] * scale * ev.derivative(c, z, static_cast<int>(i), eval_tol);
    scale *= z / alpha;
  }
  return sum;
}

inline cplx fractional_lhs(solutions::ExpressionEvaluator& ev, const std::vector<cplx>& c, double alpha, double z,
                           double tol, const VerifyOptions& opt, double& err) {
  auto f = [&](double s) { return ev(c, s, opt.lhs_eval_tol); };
  fracderiv::RlOptions ro;
  ro.abs_floor = 0.25 * opt.floor;
  ro.strict = false;
  const auto d = fracderiv::rl_numeric(f, fracderiv::FracOrder::make(alpha), z, 0.25 * tol, ro);
  err = d.error;
  return d.value;
}

inline void add_point(ResidualReport& r, double z, cplx l, cplx rh, double lerr, double floor) {
  const double diff = std::abs(l - rh);
  const double denom = std::max({std::abs(l), std::abs(rh), floor / r.tolerance});
  r.points.push_back(z);
  r.lhs.push_back(l);
  r.rhs.push_back(rh);
  r.abs_residual.push_back(diff);
  r.rel_residual.push_back(diff / denom);
  r.lhs_error.push_back(lerr);
  r.max_rel = std::max(r.max_rel, diff / denom);
  r.pass = r.max_rel <= r.tolerance;
}

inline void check_points(const std::vector<double>& points) {
  if (points.empty()) throw DomainError("no sample points");
  for (double z : points)
    if (!(z > 0.0) || !std::isfinite(z)) throw DomainError("sample points must be positive");
}

inline bool all_zero(const std::vector<cplx>& c) {
  return std::all_of(c.begin(), c.end(), [](cplx v) { return v == cplx(0.0, 0.0); });
}

template <class Fn>
auto at_point(double z, Fn&& fn) {
  try {
    return fn();
  } catch (const ConvergenceError& e) {
    std::ostringstream os;
    os << e.what() << " [sample point z = " << z << "]";
    throw ConvergenceError(os.str());
  }
}

} // namespace detail

/// Residual of d^alpha phi = P(phi) for the evaluated expression at each point.
inline ResidualReport residual_scalar(const charpoly::FodeSpec& spec, const solutions::SolutionExpression& expr,
                                      const std::vector<cplx>& constants, const std::vector<double>& points,
                                      double tol = kDefaultTolerance, const VerifyOptions& opt = {}) {
  spec.validate();
  detail::check_points(points);
  solutions::ExpressionEvaluator ev(expr);
  const std::vector<cplx> c = ev.resolve(constants);
  ResidualReport r;
  r.tolerance = tol;
  const bool zero = detail::all_zero(c);
  for (double z : points) {
    detail::at_point(z, [&] {
      double err = 0.0;
      const cplx l = zero ? cplx(0.0) : detail::fractional_lhs(ev, c, spec.alpha, z, tol, opt, err);
      const cplx rh = zero ? cplx(0.0) : detail::cauchy_euler(spec.coeffs, spec.alpha, z, ev, c, opt.eval_tol);
      detail::add_point(r, z, l, rh, err, opt.floor);
      return 0;
    });
  }
  return r;
}

/// Residuals of both equations d^alpha phi = P_1(psi) and d^alpha psi = P_2(phi).
inline std::pair<ResidualReport, ResidualReport> residual_system(const charpoly::SystemSpec& spec,
                                                                 const solutions::SystemSolution& sol,
                                                                 const std::vector<cplx>& constants,
                                                                 const std::vector<double>& points,
                                                                 double tol = kDefaultTolerance,
                                                                 const VerifyOptions& opt = {}) {
  spec.validate();
  detail::check_points(points);
  solutions::ExpressionEvaluator phi(sol.phi), psi(sol.psi);
  const std::vector<cplx> c = phi.resolve(constants);
  ResidualReport r1, r2;
  r1.tolerance = r2.tolerance = tol;
  const bool zero = detail::all_zero(c);
  for (double z : points) {
    detail::at_point(z, [&] {
      double e1 = 0.0, e2 = 0.0;
      const cplx l1 = zero ? cplx(0.0) : detail::fractional_lhs(phi, c, spec.alpha, z, tol, opt, e1);
      const cplx l2 = zero ? cplx(0.0) : detail::fractional_lhs(psi, c, spec.alpha, z, tol, opt, e2);
      const cplx rh1 = zero ? cplx(0.0) : detail::cauchy_euler(spec.a_coeffs, spec.alpha, z, psi, c, opt.eval_tol);
      const cplx rh2 = zero ? cplx(0.0) : detail::cauchy_euler(spec.b_coeffs, spec.alpha, z, phi, c, opt.eval_tol);
      detail::add_point(r1, z, l1, rh1, e1, opt.floor);
      detail::add_point(r2, z, l2, rh2, e2, opt.floor);
      return 0;
    });
  }
  return {r1, r2};
}

inline nlohmann::json to_json(const ResidualReport& r) {
  using nlohmann::json;
  json pts = json::array();
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    pts.push_back({{"z", r.points[i]},
                   {"lhs", json::array({r.lhs[i].real(), r.lhs[i].imag()})},
                   {"rhs", json::array({r.rhs[i].real(), r.rhs[i].imag()})},
                   {"abs_residual", r.abs_residual[i]},
                   {"rel_residual", r.rel_residual[i]},
                   {"lhs_error", r.lhs_error[i]}});
  }
  return {{"points", pts}, {"max_rel", r.max_rel}, {"tolerance", r.tolerance}, {"pass", r.pass}};
}

} // namespace fracsolve::verify

#endif // FRACSOLVE_VERIFY_HPP
