#ifndef FRACSOLVE_SOLUTIONS_HPP
#define FRACSOLVE_SOLUTIONS_HPP

#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "fracsolve/charpoly.hpp"
#include "fracsolve/errors.hpp"
#include "fracsolve/specfun.hpp"

namespace fracsolve::solutions {

using cplx = std::complex<double>;
using specfun::FoxH;
using specfun::GenWright;
using specfun::LowerRow;
using specfun::MittagLeffler;
using specfun::SpecialFunctionDescriptor;
using specfun::UpperRow;
using specfun::Wright;

inline constexpr double kBoundaryTolerance = 1e-12;
inline constexpr double kDegenerateDeterminantTolerance = 1e-9;

enum class Branch { MittagLeffler, GenWright, FoxH, WrightDegenerate };

inline const char* to_string(Branch b) {
  switch (b) {
    case Branch::MittagLeffler: return "MittagLeffler";
    case Branch::GenWright: return "GenWright";
    case Branch::FoxH: return "FoxH";
    case Branch::WrightDegenerate: return "WrightDegenerate";
  }
  return "?";
}

inline Branch branch_from_string(const std::string& s) {
  for (Branch b : {Branch::MittagLeffler, Branch::GenWright, Branch::FoxH, Branch::WrightDegenerate})
    if (s == to_string(b)) return b;
  throw DomainError("unknown branch '" + s + "'");
}

/// coeff * c[constant] * z^rho * F(arg_scale * z^arg_power)
struct SolutionTerm {
  cplx coeff{1.0, 0.0};
  double rho = 0.0;
  SpecialFunctionDescriptor func;
  double arg_scale = 1.0;
  double arg_power = 1.0;
  int constant = 0;
};

struct SolutionExpression {
  std::vector<SolutionTerm> terms;
  int n = 1;             // constants per family
  int num_constants = 1; // length of the constant vector
  Branch branch = Branch::MittagLeffler;
  std::vector<std::string> warnings;
};

/// phi and psi draw on one shared constant vector.
struct SystemSolution {
  SolutionExpression phi;
  SolutionExpression psi;
  int num_constants = 1;
  Branch branch = Branch::MittagLeffler;
  std::vector<std::string> warnings;
};

struct SolveOptions {
  std::optional<Branch> branch; // bypasses regime checks; evaluation may still fail
};

/// n with n - 1 < alpha <= n.
inline int constants_per_family(double alpha) {
  const double r = std::round(alpha);
  if (std::abs(alpha - r) <= kBoundaryTolerance * std::max(1.0, alpha)) return static_cast<int>(r);
  return static_cast<int>(std::ceil(alpha));
}

namespace detail {

inline bool near(double a, double b) { return std::abs(a - b) <= kBoundaryTolerance * std::max(1.0, std::abs(b)); }

inline void check_override(const SolveOptions& opt, std::initializer_list<Branch> allowed) {
  if (!opt.branch) return;
  for (Branch b : allowed)
    if (*opt.branch == b) return;
  throw DomainError(std::string("branch ") + to_string(*opt.branch) + " is not available for this problem");
}

inline std::vector<UpperRow> shifted_rows(const std::vector<cplx>& roots, double base_first, double base_rest,
                                          int split, double root_scale) {
  std::vector<UpperRow> rows;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const double base = static_cast<int>(i) < split ? base_first : base_rest;
    rows.emplace_back(base - root_scale * roots[i], 1.0);
  }
  return rows;
}

inline std::vector<LowerRow> shifted_lower(const std::vector<cplx>& roots, double base_first, double base_rest,
                                           int split) {
  std::vector<LowerRow> rows;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const double base = static_cast<int>(i) < split ? base_first : base_rest;
    rows.emplace_back(base - 0.5 * roots[i], 1.0);
  }
  return rows;
}

inline SolutionTerm gen_wright_term(cplx coeff, double rho, std::vector<UpperRow> upper, LowerRow lower, double A,
                                    double sigma, int constant) {
  upper.emplace_back(1.0, 1.0);
  return {coeff, rho, GenWright{std::move(upper), {lower}}, A, sigma, constant};
}

} // namespace detail

inline SolutionExpression solve_degenerate_wright(double alpha, double a, double b, double c);

/// Solution family of d^alpha phi = sum_i (a_i/alpha^i) z^i phi^(i).
inline SolutionExpression solve_scalar(const charpoly::FodeSpec& spec, const SolveOptions& opt = {}) {
  spec.validate();
  const double alpha = spec.alpha;
  const int m = spec.m();
  SolutionExpression out;
  out.n = constants_per_family(alpha);

  if (m == 0) {
    detail::check_override(opt, {Branch::MittagLeffler});
    out.branch = Branch::MittagLeffler;
    out.num_constants = out.n;
    for (int k = 1; k <= out.n; ++k)
      out.terms.push_back({1.0, alpha - k, MittagLeffler{alpha, 1.0 + alpha - k}, spec.coeffs[0], alpha, k - 1});
    return out;
  }

  if (opt.branch == Branch::WrightDegenerate) {
    if (m != 2) throw DomainError("branch WrightDegenerate needs m = 2");
    return solve_degenerate_wright(spec.alpha, spec.coeffs[0], spec.coeffs[1], spec.coeffs[2]);
  }
  const charpoly::CharPoly poly = charpoly::build_scalar(spec);
  out.warnings = poly.warnings;
  const double am = spec.coeffs.back();

  Branch branch;
  if (opt.branch) {
    detail::check_override(opt, {Branch::FoxH, Branch::GenWright});
    branch = *opt.branch;
  } else if (detail::near(alpha, m)) {
    std::ostringstream os;
    os << "alpha = m = " << m << " lies on the boundary between the H-function and generalized Wright regimes";
    throw UnsupportedRegime(os.str());
  } else if (alpha < m) {
    if (!(am > 0.0)) {
      std::ostringstream os;
      os << "0 < alpha < m requires a_m > 0 (got a_m = " << am << ")";
      throw UnsupportedRegime(os.str());
    }
    branch = Branch::FoxH;
  } else {
    branch = Branch::GenWright;
  }

  out.branch = branch;
  if (branch == Branch::FoxH) {
    FoxH h;
    h.m = m;
    h.l = 0;
    h.upper = {UpperRow(1.0, alpha)};
    for (const cplx& s : poly.roots) h.lower.emplace_back(-s, 1.0);
    out.num_constants = 1;
    out.terms.push_back({1.0, 0.0, std::move(h), 1.0 / am, -alpha, 0});
  } else {
    out.num_constants = out.n;
    for (int k = 1; k <= out.n; ++k) {
      const double base = 1.0 - k / alpha;
      out.terms.push_back(detail::gen_wright_term(1.0, alpha - k, detail::shifted_rows(poly.roots, base, base, 0, 1.0),
                                                  LowerRow(1.0 + alpha - k, alpha), am, alpha, k - 1));
    }
  }
  return out;
}

/// Solution pair of the coupled system d^alpha phi = P_1(psi), d^alpha psi = P_2(phi).
inline SystemSolution solve_system(const charpoly::SystemSpec& spec, const SolveOptions& opt = {}) {
  spec.validate();
  const double alpha = spec.alpha;
  const int m1 = spec.m1(), m2 = spec.m2(), m = m1 + m2;
  const int n = constants_per_family(alpha);
  SystemSolution out;
  out.phi.n = out.psi.n = n;

  if (m == 0) {
    detail::check_override(opt, {Branch::MittagLeffler});
    const double a1 = spec.a_coeffs[0], a2 = spec.b_coeffs[0];
    const double A = a1 * a2;
    out.branch = out.phi.branch = out.psi.branch = Branch::MittagLeffler;
    out.num_constants = out.phi.num_constants = out.psi.num_constants = 2 * n;
    for (int k = 1; k <= n; ++k) {
      out.phi.terms.push_back({1.0, alpha - k, MittagLeffler{2 * alpha, 1.0 + alpha - k}, A, 2 * alpha, k - 1});
      out.phi.terms.push_back(
          {a1, 2 * alpha - k, MittagLeffler{2 * alpha, 1.0 + 2 * alpha - k}, A, 2 * alpha, n + k - 1});
      out.psi.terms.push_back({a2, 2 * alpha - k, MittagLeffler{2 * alpha, 1.0 + 2 * alpha - k}, A, 2 * alpha, k - 1});
      out.psi.terms.push_back({1.0, alpha - k, MittagLeffler{2 * alpha, 1.0 + alpha - k}, A, 2 * alpha, n + k - 1});
    }
    return out;
  }

  const auto polys = charpoly::build_system(spec);
  const std::vector<cplx> s = charpoly::combined_roots(polys);
  out.warnings = polys.first.warnings;
  out.warnings.insert(out.warnings.end(), polys.second.warnings.begin(), polys.second.warnings.end());
  const double am = spec.a_coeffs.back(), bm = spec.b_coeffs.back();
  const double A = std::ldexp(am * bm, m);

  Branch branch;
  if (opt.branch) {
    detail::check_override(opt, {Branch::FoxH, Branch::GenWright});
    branch = *opt.branch;
  } else if (detail::near(2.0 * alpha, m)) {
    std::ostringstream os;
    os << "alpha = m/2 = " << 0.5 * m << " lies on the boundary between the H-function and generalized Wright regimes";
    throw UnsupportedRegime(os.str());
  } else if (2.0 * alpha < m) {
    if (!(am * bm > 0.0)) {
      std::ostringstream os;
      os << "0 < alpha < m/2 requires a_{m1} b_{m2} > 0 (got " << am * bm << ")";
      throw UnsupportedRegime(os.str());
    }
    branch = Branch::FoxH;
  } else {
    branch = Branch::GenWright;
  }
  out.branch = out.phi.branch = out.psi.branch = branch;

  if (branch == Branch::FoxH) {
    auto make = [&](double first, double rest) {
      FoxH h;
      h.m = m;
      h.l = 0;
      h.upper = {UpperRow(1.0, 2 * alpha)};
      h.lower = detail::shifted_lower(s, first, rest, m1);
      return h;
    };
    out.num_constants = out.phi.num_constants = out.psi.num_constants = 1;
    const double sgn = bm > 0.0 ? 1.0 : -1.0;
    const double ratio = std::pow(2.0, 0.5 * (m2 - m1)) * std::sqrt(bm / am);
    out.phi.terms.push_back({sgn, 0.0, make(0.5, 0.0), 1.0 / A, -2 * alpha, 0});
    out.psi.terms.push_back({ratio, 0.0, make(0.0, 0.5), 1.0 / A, -2 * alpha, 0});
    return out;
  }

  out.num_constants = out.phi.num_constants = out.psi.num_constants = 2 * n;
  const double pa = std::ldexp(am, m1), pb = std::ldexp(bm, m2);
  for (int k = 1; k <= n; ++k) {
    const double q = k / (2 * alpha);
    const LowerRow low1(1.0 + alpha - k, 2 * alpha), low2(1.0 + 2 * alpha - k, 2 * alpha);
    out.phi.terms.push_back(detail::gen_wright_term(1.0, alpha - k, detail::shifted_rows(s, 1.0 - q, 0.5 - q, m1, 0.5),
                                                    low1, A, 2 * alpha, k - 1));
    out.phi.terms.push_back(detail::gen_wright_term(pa, 2 * alpha - k,
                                                    detail::shifted_rows(s, 1.5 - q, 1.0 - q, m1, 0.5), low2, A,
                                                    2 * alpha, n + k - 1));
    out.psi.terms.push_back(detail::gen_wright_term(pb, 2 * alpha - k,
                                                    detail::shifted_rows(s, 1.0 - q, 1.5 - q, m1, 0.5), low2, A,
                                                    2 * alpha, k - 1));
    out.psi.terms.push_back(detail::gen_wright_term(1.0, alpha - k, detail::shifted_rows(s, 0.5 - q, 1.0 - q, m1, 0.5),
                                                    low1, A, 2 * alpha, n + k - 1));
  }
  return out;
}

/// Quadratic right-hand side a + (b/alpha) z d/dz + (c/alpha^2) z^2 d^2/dz^2 with D = 1/4:
/// Wright-function form for 0 < alpha < 2 and c > 0, two-row generalized Wright form for alpha > 2.
inline SolutionExpression solve_degenerate_wright(double alpha, double a, double b, double c) {
  charpoly::FodeSpec{alpha, {a, b, c}}.validate();
  const double D = charpoly::quadratic_determinant(alpha, a, b, c);
  if (!(std::abs(D - 0.25) <= kDegenerateDeterminantTolerance)) {
    std::ostringstream os;
    os << "determinant D = " << D << " differs from 1/4";
    throw DomainError(os.str());
  }
  SolutionExpression out;
  out.branch = Branch::WrightDegenerate;
  out.n = constants_per_family(alpha);
  if (detail::near(alpha, 2.0)) throw UnsupportedRegime("alpha = 2 separates the two degenerate forms");
  if (alpha < 2.0) {
    if (!(c > 0.0)) throw DomainError("the Wright-function form needs c > 0");
    const double h = 0.5 * alpha;
    out.num_constants = 1;
    out.terms.push_back({1.0, h * (1.0 / alpha - b / c + 0.5), Wright{-h, h * (3.0 / alpha - b / c + 0.5)},
                         -2.0 / std::sqrt(c), -h, 0});
  } else {
    out.num_constants = out.n;
    for (int k = 1; k <= out.n; ++k) {
      GenWright g{{UpperRow(1.5 - (2.0 * k + 1.0) / alpha + b / c, 2.0), UpperRow(1.0, 1.0)},
                  {LowerRow(1.0 + alpha - k, alpha)}};
      out.terms.push_back({1.0, alpha - k, std::move(g), 0.25 * c, alpha, k - 1});
    }
  }
  return out;
}

/// Cached evaluator for one expression; H-function contour data is reused across calls.
class ExpressionEvaluator {
public:
  explicit ExpressionEvaluator(const SolutionExpression& expr) : expr_(expr) {
    for (const auto& t : expr_.terms) {
      if (t.arg_power == 0.0) throw DomainError("solution term with arg_power = 0");
      evaluators_.push_back(std::make_unique<specfun::TermEvaluator>(t.func, t.arg_scale, t.rho, t.arg_power));
    }
  }

  /// d^N/dz^N of sum coeff * c * z^rho F(A z^sigma); terms with zero weight are skipped.
  cplx derivative(const std::vector<cplx>& constants, double z, int N, double tol) {
    const std::vector<cplx> c = resolve(constants);
    cplx sum = 0.0;
    for (std::size_t i = 0; i < expr_.terms.size(); ++i) {
      const SolutionTerm& t = expr_.terms[i];
      const cplx w = t.coeff * c[t.constant];
      if (w == cplx(0.0, 0.0)) continue;
      sum += w * (*evaluators_[i])(z, N, tol).value;
    }
    return sum;
  }

  cplx operator()(const std::vector<cplx>& constants, double z, double tol) { return derivative(constants, z, 0, tol); }

  const SolutionExpression& expression() const { return expr_; }

  std::vector<cplx> resolve(const std::vector<cplx>& constants) const {
    if (constants.empty()) return std::vector<cplx>(expr_.num_constants, 1.0);
    if (static_cast<int>(constants.size()) != expr_.num_constants) {
      std::ostringstream os;
      os << "expected " << expr_.num_constants << " constants, got " << constants.size();
      throw DomainError(os.str());
    }
    return constants;
  }

private:
  SolutionExpression expr_;
  std::vector<std::unique_ptr<specfun::TermEvaluator>> evaluators_;
};

/// Value of expr at z > 0; empty constants means every constant is 1.
inline cplx evaluate(const SolutionExpression& expr, const std::vector<cplx>& constants, double z, double tol) {
  ExpressionEvaluator ev(expr);
  return ev(constants, z, tol);
}

// ---------------------------------------------------------------- JSON

using nlohmann::json;

namespace detail {

inline json complex_to_json(cplx v) { return json::array({v.real(), v.imag()}); }

inline cplx complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw DomainError("complex values are numbers or [re, im] pairs, got " + j.dump());
}

template <class RowT>
json rows_to_json(const std::vector<RowT>& rows) {
  json a = json::array();
  for (const auto& r : rows) a.push_back(json::array({complex_to_json(r.shift), r.step}));
  return a;
}

template <class RowT>
std::vector<RowT> rows_from_json(const json& j) {
  if (!j.is_array()) throw DomainError("parameter rows must be an array");
  std::vector<RowT> rows;
  for (const auto& r : j) {
    if (!r.is_array() || r.size() != 2 || !r[1].is_number()) throw DomainError("parameter row must be [shift, step]");
    rows.emplace_back(complex_from_json(r[0]), r[1].get<double>());
  }
  return rows;
}

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw DomainError(std::string("missing field '") + key + "'");
  return j.at(key);
}

inline double number(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number()) throw DomainError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

inline int integer(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number_integer()) throw DomainError(std::string("field '") + key + "' must be an integer");
  return v.get<int>();
}

inline void only_keys(const json& j, std::initializer_list<const char*> keys) {
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* allowed : keys) ok = ok || k == allowed;
    if (!ok) throw DomainError("unknown field '" + k + "'");
  }
}

} // namespace detail

inline json descriptor_to_json(const SpecialFunctionDescriptor& f) {
  return std::visit(
      [](const auto& d) -> json {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, MittagLeffler>) {
          return {{"kind", "MittagLeffler"}, {"alpha", d.alpha}, {"beta", d.beta}};
        } else if constexpr (std::is_same_v<T, Wright>) {
          return {{"kind", "Wright"}, {"alpha", d.alpha}, {"beta", d.beta}};
        } else if constexpr (std::is_same_v<T, GenWright>) {
          return {{"kind", "GenWright"}, {"upper", detail::rows_to_json(d.upper)}, {"lower", detail::rows_to_json(d.lower)}};
        } else {
          return {{"kind", "FoxH"},
                  {"m", d.m},
                  {"l", d.l},
                  {"upper", detail::rows_to_json(d.upper)},
                  {"lower", detail::rows_to_json(d.lower)}};
        }
      },
      f);
}

inline SpecialFunctionDescriptor descriptor_from_json(const json& j) {
  const json& kind = detail::field(j, "kind");
  if (!kind.is_string()) throw DomainError("descriptor kind must be a string");
  const std::string k = kind.get<std::string>();
  if (k == "MittagLeffler" || k == "Wright") {
    detail::only_keys(j, {"kind", "alpha", "beta"});
    const double a = detail::number(j, "alpha"), b = detail::number(j, "beta");
    if (k == "Wright") return Wright{a, b};
    return MittagLeffler{a, b};
  }
  if (k == "GenWright") {
    detail::only_keys(j, {"kind", "upper", "lower"});
    return GenWright{detail::rows_from_json<UpperRow>(detail::field(j, "upper")),
                     detail::rows_from_json<LowerRow>(detail::field(j, "lower"))};
  }
  if (k == "FoxH") {
    detail::only_keys(j, {"kind", "m", "l", "upper", "lower"});
    FoxH h;
    h.m = detail::integer(j, "m");
    h.l = detail::integer(j, "l");
    h.upper = detail::rows_from_json<UpperRow>(detail::field(j, "upper"));
    h.lower = detail::rows_from_json<LowerRow>(detail::field(j, "lower"));
    return h;
  }
  throw DomainError("unknown descriptor kind '" + k + "'");
}

inline json to_json(const SolutionExpression& e) {
  json terms = json::array();
  for (const auto& t : e.terms)
    terms.push_back({{"coeff", detail::complex_to_json(t.coeff)},
                     {"rho", t.rho},
                     {"function", descriptor_to_json(t.func)},
                     {"arg_scale", t.arg_scale},
                     {"arg_power", t.arg_power},
                     {"constant", t.constant}});
  return {{"branch", to_string(e.branch)},
          {"n", e.n},
          {"num_constants", e.num_constants},
          {"terms", terms},
          {"warnings", e.warnings}};
}

inline SolutionExpression expression_from_json(const json& j) {
  detail::only_keys(j, {"branch", "n", "num_constants", "terms", "warnings"});
  SolutionExpression e;
  const json& br = detail::field(j, "branch");
  if (!br.is_string()) throw DomainError("branch must be a string");
  e.branch = branch_from_string(br.get<std::string>());
  e.n = detail::integer(j, "n");
  e.num_constants = detail::integer(j, "num_constants");
  if (e.num_constants < 1) throw DomainError("num_constants must be positive");
  const json& terms = detail::field(j, "terms");
  if (!terms.is_array()) throw DomainError("terms must be an array");
  for (const auto& t : terms) {
    detail::only_keys(t, {"coeff", "rho", "function", "arg_scale", "arg_power", "constant"});
    SolutionTerm term{detail::complex_from_json(detail::field(t, "coeff")),
                      detail::number(t, "rho"),
                      descriptor_from_json(detail::field(t, "function")),
                      detail::number(t, "arg_scale"),
                      detail::number(t, "arg_power"),
                      detail::integer(t, "constant")};
    if (term.constant < 0 || term.constant >= e.num_constants) throw DomainError("term constant index out of range");
    e.terms.push_back(std::move(term));
  }
  if (j.contains("warnings")) e.warnings = j.at("warnings").get<std::vector<std::string>>();
  return e;
}

inline json to_json(const SystemSolution& s) {
  return {{"branch", to_string(s.branch)},
          {"num_constants", s.num_constants},
          {"phi", to_json(s.phi)},
          {"psi", to_json(s.psi)},
          {"warnings", s.warnings}};
}

inline SystemSolution system_from_json(const json& j) {
  detail::only_keys(j, {"branch", "num_constants", "phi", "psi", "warnings"});
  SystemSolution s;
  s.branch = branch_from_string(detail::field(j, "branch").get<std::string>());
  s.num_constants = detail::integer(j, "num_constants");
  s.phi = expression_from_json(detail::field(j, "phi"));
  s.psi = expression_from_json(detail::field(j, "psi"));
  if (s.phi.num_constants != s.num_constants || s.psi.num_constants != s.num_constants)
    throw DomainError("phi and psi must share the system's constant vector");
  if (j.contains("warnings")) s.warnings = j.at("warnings").get<std::vector<std::string>>();
  return s;
}

} // namespace fracsolve::solutions

#endif // FRACSOLVE_SOLUTIONS_HPP
