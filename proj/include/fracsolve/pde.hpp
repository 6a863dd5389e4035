#ifndef FRACSOLVE_PDE_HPP
#define FRACSOLVE_PDE_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

#include "fracsolve/charpoly.hpp"
#include "fracsolve/errors.hpp"
#include "fracsolve/fracderiv.hpp"
#include "fracsolve/numerics/finite_difference.hpp"
#include "fracsolve/solutions.hpp"

namespace fracsolve::pde {

using cplx = std::complex<double>;

inline constexpr double kDegenerateExponentTolerance = 1e-12;

/// d^alpha_t u = sum_i a_i (x+b)^{p-m+i} d^i_x u on x > -b, t > 0, with generator weight a.
struct EvolutionPde {
  double alpha = 1.0;
  std::vector<double> coeffs; // a_0..a_m
  double b = 0.0;
  double p = 0.0;
  double a = 0.0;

  int m() const { return static_cast<int>(coeffs.size()) - 1; }

  void validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be positive");
    if (coeffs.size() < 2) throw DomainError("the PDE needs coefficients a_0..a_m with m >= 1");
    for (double c : coeffs)
      if (!std::isfinite(c)) throw DomainError("coefficients must be finite");
    if (!std::isfinite(b) || !std::isfinite(p) || !std::isfinite(a)) throw DomainError("b, p and a must be finite");
    if (!(coeffs.back() > 0.0)) throw DomainError("the leading coefficient a_m must be positive");
  }
};

/// d^alpha_t u = a1 (x+c)^{m1} v_x + b1 (x+c)^{m1-1} v, d^alpha_t v = a2 (x+c)^{m2} u_x + b2 (x+c)^{m2-1} u.
struct SystemPde {
  double alpha = 1.0;
  double a1 = 1.0, a2 = 1.0, b1 = 0.0, b2 = 0.0;
  double m1 = 1.0, m2 = 1.0;
  double c = 0.0;
  double d = 0.0;

  void validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be positive");
    for (double v : {a1, a2, b1, b2, m1, m2, c, d})
      if (!std::isfinite(v)) throw DomainError("system parameters must be finite");
    if (!(a1 * a2 > 0.0)) throw DomainError("a1 a2 must be positive");
  }
};

/// u = (x+shift)^{prefactors[0]} phi(z), v = (x+shift)^{prefactors[1]} psi(z), z = t (x+shift)^{exponent}.
struct PdeReduction {
  double similarity_exponent = 0.0;
  std::vector<double> prefactors;
  double shift = 0.0;
  std::variant<charpoly::FodeSpec, charpoly::SystemSpec> target;

  bool is_system() const { return std::holds_alternative<charpoly::SystemSpec>(target); }
  const charpoly::FodeSpec& scalar() const { return std::get<charpoly::FodeSpec>(target); }
  const charpoly::SystemSpec& system() const { return std::get<charpoly::SystemSpec>(target); }
};

/// Reduced FODE of the m = 2 equation; p = 2 collapses it to d^alpha phi = a_bar phi.
inline PdeReduction reduce_scalar(const EvolutionPde& pde) {
  if (pde.coeffs.size() == 3 && !(pde.coeffs[2] > 0.0)) throw DomainError("a_2 must be positive");
  pde.validate();
  if (pde.m() != 2) {
    std::ostringstream os;
    os << "reduced coefficients are available for m = 2 only (got m = " << pde.m() << ")";
    throw UnsupportedRegime(os.str());
  }
  const double alpha = pde.alpha, a = pde.a, p = pde.p;
  const double a0 = pde.coeffs[0], a1 = pde.coeffs[1], a2 = pde.coeffs[2];
  PdeReduction r;
  r.similarity_exponent = (p - 2.0) / alpha;
  r.prefactors = {a};
  r.shift = pde.b;
  const double abar = a * (a - 1.0) * a2 + a * a1 + a0;
  if (std::abs(p - 2.0) <= kDegenerateExponentTolerance) {
    r.similarity_exponent = 0.0;
    r.target = charpoly::FodeSpec{alpha, {abar}};
    return r;
  }
  const double q = p - 2.0;
  const double bbar = q * (q / alpha + 2.0 * a - 1.0 + a1 / a2) * a2;
  const double cbar = q * q * a2;
  r.target = charpoly::FodeSpec{alpha, {abar, bbar, cbar}};
  return r;
}

/// Reduced system; m1 + m2 = 2 removes the first-order terms.
inline PdeReduction reduce_system(const SystemPde& pde) {
  pde.validate();
  const double M = pde.m1 + pde.m2;
  PdeReduction r;
  r.similarity_exponent = (M - 2.0) / (2.0 * pde.alpha);
  r.prefactors = {pde.d + 0.5 * pde.m1, pde.d + 0.5 * pde.m2};
  r.shift = pde.c;
  const double abar1 = (pde.d + 0.5 * pde.m2) * pde.a1 + pde.b1;
  const double abar2 = (pde.d + 0.5 * pde.m1) * pde.a2 + pde.b2;
  if (std::abs(M - 2.0) <= kDegenerateExponentTolerance) {
    r.similarity_exponent = 0.0;
    r.target = charpoly::SystemSpec{pde.alpha, {abar1}, {abar2}};
    return r;
  }
  r.target = charpoly::SystemSpec{pde.alpha, {abar1, 0.5 * (M - 2.0) * pde.a1}, {abar2, 0.5 * (M - 2.0) * pde.a2}};
  return r;
}

struct SimilarityPoint {
  double base = 1.0; // x + shift
  double z = 0.0;
};

inline SimilarityPoint similarity(const PdeReduction& red, double x, double t) {
  const double base = x + red.shift;
  if (!(base > 0.0) || !std::isfinite(base)) {
    std::ostringstream os;
    os << "x = " << x << " lies outside the domain x > " << -red.shift;
    throw DomainError(os.str());
  }
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("t must be positive");
  return {base, t * std::pow(base, red.similarity_exponent)};
}

/// u(x, t) from a callable phi(z).
template <class Phi>
cplx lift(const PdeReduction& red, Phi&& phi, double x, double t) {
  const SimilarityPoint s = similarity(red, x, t);
  return std::pow(s.base, red.prefactors.at(0)) * phi(s.z);
}

/// (u, v)(x, t) from callables phi(z), psi(z).
template <class Phi, class Psi>
std::pair<cplx, cplx> lift(const PdeReduction& red, Phi&& phi, Psi&& psi, double x, double t) {
  const SimilarityPoint s = similarity(red, x, t);
  return {std::pow(s.base, red.prefactors.at(0)) * phi(s.z), std::pow(s.base, red.prefactors.at(1)) * psi(s.z)};
}

/// Reduction plus the solution family of its target, evaluable at (x, t).
class InvariantSolution {
public:
  InvariantSolution(PdeReduction red, const solutions::SolveOptions& opt = {}) : red_(std::move(red)) {
    if (red_.is_system()) {
      set(solutions::solve_system(red_.system(), opt));
    } else {
      set(solutions::solve_scalar(red_.scalar(), opt));
    }
  }

  InvariantSolution(PdeReduction red, solutions::SolutionExpression expr) : red_(std::move(red)) {
    if (red_.is_system()) throw DomainError("a system reduction needs a solution pair");
    set(std::move(expr));
  }

  InvariantSolution(PdeReduction red, solutions::SystemSolution sol) : red_(std::move(red)) {
    if (!red_.is_system()) throw DomainError("a scalar reduction needs a single solution");
    set(std::move(sol));
  }

  const PdeReduction& reduction() const { return red_; }
  bool is_system() const { return red_.is_system(); }
  int num_constants() const { return phi_->expression().num_constants; }
  const solutions::SolutionExpression& phi_expression() const { return phi_->expression(); }
  const solutions::SolutionExpression& psi_expression() const { return psi_->expression(); }

  /// Component 0 is u, component 1 is v.
  cplx operator()(const std::vector<cplx>& constants, double x, double t, double tol, int component = 0) {
    if (component < 0 || component > (is_system() ? 1 : 0)) throw DomainError("no such solution component");
    solutions::ExpressionEvaluator& ev = component == 0 ? *phi_ : *psi_;
    const SimilarityPoint s = similarity(red_, x, t);
    return std::pow(s.base, red_.prefactors.at(component)) * ev(constants, s.z, tol);
  }

private:
  void set(solutions::SolutionExpression e) { phi_ = std::make_unique<solutions::ExpressionEvaluator>(e); }
  void set(solutions::SystemSolution s) {
    phi_ = std::make_unique<solutions::ExpressionEvaluator>(s.phi);
    psi_ = std::make_unique<solutions::ExpressionEvaluator>(s.psi);
  }

  PdeReduction red_;
  std::unique_ptr<solutions::ExpressionEvaluator> phi_, psi_;
};

// ---------------------------------------------------------------- residuals

inline constexpr double kPdeTolerance = 1e-4;
inline const std::vector<double> kDefaultX{1.0, 2.0, 4.0};
inline const std::vector<double> kDefaultT{0.5, 1.0, 2.0};

struct PdeResidualPoint {
  double x = 0.0, t = 0.0;
  int component = 0;
  cplx lhs, rhs;
  double rel = 0.0;
};

struct PdeResidualReport {
  std::vector<PdeResidualPoint> points;
  double max_rel = 0.0;
  double tolerance = kPdeTolerance;
  bool pass = true;
};

struct PdeResidualOptions {
  double floor = 1e-8;
  double eval_tol = 1e-16;
  double x_step = 0.02; // relative to x + shift
};

namespace detail {

inline void add(PdeResidualReport& r, PdeResidualPoint p, double floor) {
  const double denom = std::max({std::abs(p.lhs), std::abs(p.rhs), floor / r.tolerance});
  p.rel = std::abs(p.lhs - p.rhs) / denom;
  r.max_rel = std::max(r.max_rel, p.rel);
  r.pass = r.max_rel <= r.tolerance;
  r.points.push_back(p);
}

template <class U>
cplx time_derivative(U&& u, double alpha, double t, double tol, double floor) {
  fracderiv::RlOptions ro;
  ro.abs_floor = 0.25 * floor;
  ro.strict = false;
  return fracderiv::rl_numeric(u, fracderiv::FracOrder::make(alpha), t, 0.25 * tol, ro).value;
}

template <class U>
cplx space_derivative(U&& u, double x, int order, double base, double rel_step) {
  if (order == 0) return u(x);
  return numerics::richardson_derivative(u, x, order, rel_step * base).value;
}

inline void check_grid(const std::vector<double>& xs, const std::vector<double>& ts) {
  if (xs.empty() || ts.empty()) throw DomainError("empty residual grid");
}

} // namespace detail

/// Residual of the evolution equation for the lifted solution on the grid xs x ts.
inline PdeResidualReport residual_scalar(const EvolutionPde& pde, InvariantSolution& sol,
                                         const std::vector<cplx>& constants, const std::vector<double>& xs,
                                         const std::vector<double>& ts, double tol = kPdeTolerance,
                                         const PdeResidualOptions& opt = {}) {
  pde.validate();
  detail::check_grid(xs, ts);
  PdeResidualReport r;
  r.tolerance = tol;
  const int m = pde.m();
  for (double x : xs) {
    const double base = similarity(sol.reduction(), x, 1.0).base;
    for (double t : ts) {
      auto in_t = [&](double s) { return sol(constants, x, s, opt.eval_tol); };
      auto in_x = [&](double y) { return sol(constants, y, t, opt.eval_tol); };
      PdeResidualPoint p{x, t, 0, {}, {}, 0.0};
      p.lhs = detail::time_derivative(in_t, pde.alpha, t, tol, opt.floor);
      for (int i = 0; i <= m; ++i) {
        if (pde.coeffs[i] == 0.0) continue;
        p.rhs += pde.coeffs[i] * std::pow(base, pde.p - m + i) *
                 detail::space_derivative(in_x, x, i, base, opt.x_step);
      }
      detail::add(r, p, opt.floor);
    }
  }
  return r;
}

/// Residuals of both system equations on the grid xs x ts.
inline PdeResidualReport residual_system(const SystemPde& pde, InvariantSolution& sol,
                                         const std::vector<cplx>& constants, const std::vector<double>& xs,
                                         const std::vector<double>& ts, double tol = kPdeTolerance,
                                         const PdeResidualOptions& opt = {}) {
  pde.validate();
  detail::check_grid(xs, ts);
  if (!sol.is_system()) throw DomainError("a system PDE needs a system solution");
  PdeResidualReport r;
  r.tolerance = tol;
  const double coef[2][2] = {{pde.a1, pde.b1}, {pde.a2, pde.b2}};
  const double powers[2] = {pde.m1, pde.m2};
  for (double x : xs) {
    const double base = similarity(sol.reduction(), x, 1.0).base;
    for (double t : ts) {
      for (int comp = 0; comp < 2; ++comp) {
        const int other = 1 - comp;
        auto in_t = [&](double s) { return sol(constants, x, s, opt.eval_tol, comp); };
        auto in_x = [&](double y) { return sol(constants, y, t, opt.eval_tol, other); };
        PdeResidualPoint p{x, t, comp, {}, {}, 0.0};
        p.lhs = detail::time_derivative(in_t, pde.alpha, t, tol, opt.floor);
        p.rhs = coef[comp][0] * std::pow(base, powers[comp]) * detail::space_derivative(in_x, x, 1, base, opt.x_step) +
                coef[comp][1] * std::pow(base, powers[comp] - 1.0) * in_x(x);
        detail::add(r, p, opt.floor);
      }
    }
  }
  return r;
}

// ---------------------------------------------------------------- JSON

using nlohmann::json;

inline json to_json(const charpoly::FodeSpec& s) { return {{"alpha", s.alpha}, {"coeffs", s.coeffs}}; }

inline json to_json(const charpoly::SystemSpec& s) {
  return {{"alpha", s.alpha}, {"a_coeffs", s.a_coeffs}, {"b_coeffs", s.b_coeffs}};
}

inline json to_json(const PdeReduction& r) {
  json j{{"similarity_exponent", r.similarity_exponent}, {"prefactor_exponents", r.prefactors}, {"shift", r.shift}};
  if (r.is_system()) {
    j["target_kind"] = "system_fode";
    j["target"] = to_json(r.system());
    j["target"]["m1"] = r.system().m1();
    j["target"]["m2"] = r.system().m2();
  } else {
    j["target_kind"] = "scalar_fode";
    j["target"] = to_json(r.scalar());
    j["target"]["m"] = r.scalar().m();
  }
  return j;
}

inline json to_json(const PdeResidualReport& r) {
  json pts = json::array();
  for (const auto& p : r.points) {
    pts.push_back({{"x", p.x},
                   {"t", p.t},
                   {"component", p.component == 0 ? "u" : "v"},
                   {"lhs", json::array({p.lhs.real(), p.lhs.imag()})},
                   {"rhs", json::array({p.rhs.real(), p.rhs.imag()})},
                   {"rel_residual", p.rel}});
  }
  return {{"points", pts}, {"max_rel", r.max_rel}, {"tolerance", r.tolerance}, {"pass", r.pass}};
}

} // namespace fracsolve::pde

#endif // FRACSOLVE_PDE_HPP
