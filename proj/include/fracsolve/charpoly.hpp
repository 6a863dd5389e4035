#ifndef FRACSOLVE_CHARPOLY_HPP
#define FRACSOLVE_CHARPOLY_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fracsolve/errors.hpp"

namespace fracsolve::charpoly {

using cplx = std::complex<double>;

inline constexpr double kRepeatedRootDistance = 1e-7;
inline constexpr double kRootResidualTolerance = 1e-9;

/// d^alpha phi = sum_i (a_i / alpha^i) z^i phi^(i), coefficients a_0..a_m.
struct FodeSpec {
  double alpha = 1.0;
  std::vector<double> coeffs;

  int m() const { return static_cast<int>(coeffs.size()) - 1; }

  void validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be positive");
    if (coeffs.empty()) throw DomainError("at least the coefficient a_0 is required");
    for (double c : coeffs)
      if (!std::isfinite(c)) throw DomainError("coefficients must be finite");
    if (m() >= 1 && coeffs.back() == 0.0) throw DomainError("leading coefficient a_m must be nonzero");
  }
};

/// Coupled pair: d^alpha phi = P_1(psi), d^alpha psi = P_2(phi).
struct SystemSpec {
  double alpha = 1.0;
  std::vector<double> a_coeffs;
  std::vector<double> b_coeffs;

  int m1() const { return static_cast<int>(a_coeffs.size()) - 1; }
  int m2() const { return static_cast<int>(b_coeffs.size()) - 1; }

  void validate() const {
    FodeSpec{alpha, a_coeffs}.validate();
    FodeSpec{alpha, b_coeffs}.validate();
    if (a_coeffs.back() * b_coeffs.back() == 0.0)
      throw DomainError("leading coefficients a_{m1} and b_{m2} must be nonzero");
  }
};

struct CharPoly {
  std::vector<double> monomial; // ascending powers of s
  std::vector<cplx> roots;      // canonical order: descending real part, then descending imaginary part
  double lead = 0.0;
  std::vector<std::string> warnings;

  int degree() const { return static_cast<int>(monomial.size()) - 1; }
  bool has_repeated_roots() const { return !warnings.empty(); }

  cplx operator()(cplx s) const {
    cplx v = 0.0;
    for (auto it = monomial.rbegin(); it != monomial.rend(); ++it) v = v * s + *it;
    return v;
  }

  /// sum |c_i| |s|^i, the natural size against which |P(s)| is judged.
  double scale_at(cplx s) const {
    double v = 0.0;
    for (auto it = monomial.rbegin(); it != monomial.rend(); ++it) v = v * std::abs(s) + std::abs(*it);
    return v;
  }
};

namespace detail {

inline std::vector<double> poly_mul_linear(const std::vector<double>& p, double root) {
  std::vector<double> out(p.size() + 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    out[i + 1] += p[i];
    out[i] -= root * p[i];
  }
  return out;
}

inline cplx horner(const std::vector<double>& c, cplx s, cplx* deriv) {
  cplx v = 0.0, d = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) {
    d = d * s + v;
    v = v * s + *it;
  }
  if (deriv) *deriv = d;
  return v;
}

inline std::vector<cplx> companion_roots(const std::vector<double>& c) {
  const int m = static_cast<int>(c.size()) - 1;
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(m, m);
  for (int i = 1; i < m; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < m; ++i) comp(i, m - 1) = -c[i] / c[m];
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  if (es.info() != Eigen::Success) throw ConvergenceError("companion eigenvalue solver failed");
  std::vector<cplx> r(m);
  for (int i = 0; i < m; ++i) r[i] = es.eigenvalues()(i);
  return r;
}

/// Aberth-Ehrlich simultaneous iteration; returns false if it stalls.
inline bool aberth(const std::vector<double>& c, std::vector<cplx>& z) {
  const int m = static_cast<int>(c.size()) - 1;
  // initial guesses on a circle whose radius is the geometric mean of the root moduli
  const double radius = std::pow(std::max(std::abs(c[0] / c[m]), 1e-300), 1.0 / m);
  const double r0 = (c[0] == 0.0) ? 1.0 : radius;
  z.resize(m);
  for (int k = 0; k < m; ++k)
    z[k] = std::polar(r0, 2.0 * std::numbers::pi * k / m + 0.4);
  for (int iter = 0; iter < 500; ++iter) {
    double max_step = 0.0;
    for (int k = 0; k < m; ++k) {
      cplx d;
      const cplx v = horner(c, z[k], &d);
      if (v == cplx(0.0, 0.0)) continue;
      const cplx ratio = v / d;
      cplx sum = 0.0;
      for (int j = 0; j < m; ++j)
        if (j != k) sum += 1.0 / (z[k] - z[j]);
      const cplx step = ratio / (1.0 - ratio * sum);
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) return false;
      z[k] -= step;
      max_step = std::max(max_step, std::abs(step) / std::max(1.0, std::abs(z[k])));
    }
    if (max_step < 1e-15) return true;
  }
  return false;
}

inline void polish(const std::vector<double>& c, std::vector<cplx>& z) {
  for (auto& s : z) {
    for (int it = 0; it < 3; ++it) {
      cplx d;
      const cplx v = horner(c, s, &d);
      if (d == cplx(0.0, 0.0) || v == cplx(0.0, 0.0)) break;
      const cplx next = s - v / d;
      cplx dn;
      if (std::abs(horner(c, next, &dn)) < std::abs(v)) s = next;
      else break;
    }
  }
}

/// Makes complex roots of a real polynomial come in exact conjugate pairs.
inline void symmetrize(std::vector<cplx>& z) {
  std::vector<cplx> out;
  std::vector<bool> used(z.size(), false);
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    const double tiny = 1e-12 * std::max(1.0, std::abs(z[i]));
    if (std::abs(z[i].imag()) <= tiny) {
      out.emplace_back(z[i].real(), 0.0);
      continue;
    }
    std::size_t best = z.size();
    double dist = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(z[j] - std::conj(z[i]));
      if (best == z.size() || d < dist) {
        best = j;
        dist = d;
      }
    }
    if (best == z.size()) {
      out.emplace_back(z[i].real(), 0.0);
      continue;
    }
    used[best] = true;
    const double re = 0.5 * (z[i].real() + z[best].real());
    const double im = 0.5 * (std::abs(z[i].imag()) + std::abs(z[best].imag()));
    out.emplace_back(re, im);
    out.emplace_back(re, -im);
  }
  z = out;
}

inline void canonical_sort(std::vector<cplx>& z) {
  std::sort(z.begin(), z.end(), [](cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
}

} // namespace detail

/// All roots of poly (with multiplicity), conjugate-paired and in canonical order.
inline std::vector<cplx> roots(const CharPoly& poly) {
  const std::vector<double>& c = poly.monomial;
  const int m = poly.degree();
  if (m < 1) throw DomainError("root finding needs degree >= 1");
  std::vector<cplx> z;
  if (m == 1) {
    z = {cplx(-c[0] / c[1], 0.0)};
  } else if (m == 2) {
    const double disc = c[1] * c[1] - 4.0 * c[2] * c[0];
    if (disc >= 0.0) {
      const double q = -0.5 * (c[1] + std::copysign(std::sqrt(disc), c[1]));
      if (q == 0.0) {
        z = {0.0, 0.0};
      } else {
        z = {cplx(q / c[2], 0.0), cplx(c[0] / q, 0.0)};
      }
    } else {
      const double re = -c[1] / (2.0 * c[2]);
      const double im = std::sqrt(-disc) / (2.0 * std::abs(c[2]));
      z = {cplx(re, im), cplx(re, -im)};
    }
  } else {
    if (!detail::aberth(c, z)) z = detail::companion_roots(c);
    detail::polish(c, z);
    detail::symmetrize(z);
  }
  detail::canonical_sort(z);
  for (const auto& s : z) {
    const double res = std::abs(poly(s));
    if (!(res <= kRootResidualTolerance * poly.scale_at(s))) {
      std::ostringstream os;
      os << "root finding failed: |P(" << s << ")| = " << res;
      throw ConvergenceError(os.str());
    }
  }
  return z;
}

namespace detail {

inline std::vector<double> falling_factorial_expansion(double alpha, const std::vector<double>& a) {
  std::vector<double> out(a.size(), 0.0);
  std::vector<double> basis{1.0}; // prod_{j<i} (s - j/alpha)
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < basis.size(); ++k) out[k] += a[i] * basis[k];
    basis = poly_mul_linear(basis, static_cast<double>(i) / alpha);
  }
  return out;
}

inline void attach_roots(CharPoly& p) {
  if (p.degree() < 1) return;
  p.roots = roots(p);
  for (std::size_t i = 0; i < p.roots.size(); ++i) {
    for (std::size_t j = i + 1; j < p.roots.size(); ++j) {
      if (std::abs(p.roots[i] - p.roots[j]) <= kRepeatedRootDistance * std::max(1.0, std::abs(p.roots[i]))) {
        std::ostringstream os;
        os << "repeated characteristic root near " << p.roots[i]
           << ": solution terms coincide and are not independent";
        p.warnings.push_back(os.str());
      }
    }
  }
}

} // namespace detail

/// P(s) = a_0 + sum_{i>=1} a_i prod_{j<i} (s - j/alpha), expanded and rooted.
inline CharPoly build_scalar(const FodeSpec& spec) {
  spec.validate();
  CharPoly p;
  p.monomial = detail::falling_factorial_expansion(spec.alpha, spec.coeffs);
  p.lead = spec.coeffs.back();
  detail::attach_roots(p);
  return p;
}

/// Characteristic polynomials of both right-hand sides.
inline std::pair<CharPoly, CharPoly> build_system(const SystemSpec& spec) {
  spec.validate();
  return {build_scalar(FodeSpec{spec.alpha, spec.a_coeffs}), build_scalar(FodeSpec{spec.alpha, spec.b_coeffs})};
}

/// s_1..s_{m1} from P_1 followed by s_{m1+1}..s_{m1+m2} from P_2.
inline std::vector<cplx> combined_roots(const std::pair<CharPoly, CharPoly>& polys) {
  std::vector<cplx> r = polys.first.roots;
  r.insert(r.end(), polys.second.roots.begin(), polys.second.roots.end());
  return r;
}

/// Determinant D of the quadratic characteristic equation for coefficients (a, b, c).
inline double quadratic_determinant(double alpha, double a, double b, double c) {
  return 1.0 / (alpha * alpha) - 2.0 * b / (alpha * c) + b * b / (c * c) - 4.0 * a / c;
}

} // namespace fracsolve::charpoly

#endif // FRACSOLVE_CHARPOLY_HPP
