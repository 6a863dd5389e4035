#ifndef FRACSOLVE_SPECFUN_GAMMA_HPP
#define FRACSOLVE_SPECFUN_GAMMA_HPP

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "fracsolve/errors.hpp"

namespace fracsolve::specfun {

using cplx = std::complex<double>;

/// Tolerance used to decide that an argument sits on a pole of Gamma.
inline constexpr double kPoleTolerance = 1e-9;

namespace detail {

// Lanczos approximation, g = 7, nine coefficients.
inline constexpr double kLanczosG = 7.0;
inline constexpr std::array<double, 9> kLanczosCoeffs = {
    0.99999999999980993,   676.5203681218851,     -1259.1392167224028,
    771.32342877765313,    -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,  9.9843695780195716e-6, 1.5056327351493116e-7};

inline const double kLogSqrtTwoPi = 0.5 * std::log(2.0 * std::numbers::pi);

// Lanczos series A_g(z) for Gamma(z + 1).
inline cplx lanczos_sum(cplx z) {
  cplx x = kLanczosCoeffs[0];
  for (std::size_t i = 1; i < kLanczosCoeffs.size(); ++i)
    x += kLanczosCoeffs[i] / (z + static_cast<double>(i));
  return x;
}

// log(sin(pi z)) without overflow for large |Im z|; exp() of the result equals sin(pi z).
inline cplx log_sin_pi(cplx z) {
  const double k = std::round(z.real());
  const cplx w(z.real() - k, z.imag());
  const double pi = std::numbers::pi;
  // (-1)^k phase
  const cplx phase(0.0, std::fmod(std::abs(k), 2.0) == 1.0 ? pi : 0.0);
  if (std::abs(w.imag()) < 20.0) return std::log(std::sin(pi * w)) + phase;
  // sin(pi w) = e^{-i pi w} (e^{2 i pi w} - 1) / (2i) for Im w > 0, mirrored otherwise.
  const cplx i(0.0, 1.0);
  if (w.imag() > 0.0)
    return -i * pi * w + std::log((std::exp(2.0 * i * pi * w) - 1.0) / (2.0 * i)) + phase;
  return i * pi * w + std::log((1.0 - std::exp(-2.0 * i * pi * w)) / (2.0 * i)) + phase;
}

[[noreturn]] inline void throw_pole(cplx z) {
  std::ostringstream os;
  os << "Gamma has a pole at z = " << z.real();
  throw PoleError(os.str());
}

} // namespace detail

/// True when z is a non-positive integer (within kPoleTolerance).
inline bool is_nonpositive_integer(cplx z, double tol = kPoleTolerance) {
  if (std::abs(z.imag()) > tol || z.real() > 0.5) return false;
  return std::abs(z.real() - std::round(z.real())) <= tol;
}

inline bool is_nonpositive_integer(double x, double tol = kPoleTolerance) {
  return is_nonpositive_integer(cplx(x, 0.0), tol);
}

/// log Gamma(z). The imaginary part is only defined modulo 2*pi, which is all that
/// exp() needs; for real z it is 0 or pi according to the sign of Gamma.
inline cplx log_gamma(cplx z) {
  if (is_nonpositive_integer(z)) detail::throw_pole(z);
  if (z.imag() == 0.0) {
    int sign = 1;
    const double lg = ::lgamma_r(z.real(), &sign);
    return {lg, sign < 0 ? std::numbers::pi : 0.0};
  }
  if (z.real() < 0.5) {
    return std::log(std::numbers::pi) - detail::log_sin_pi(z) - log_gamma(1.0 - z);
  }
  const cplx zm = z - 1.0;
  const cplx t = zm + detail::kLanczosG + 0.5;
  return detail::kLogSqrtTwoPi + (zm + 0.5) * std::log(t) - t +
         std::log(detail::lanczos_sum(zm));
}

/// Gamma(z); throws PoleError at non-positive integers.
inline cplx gamma(cplx z) {
  if (is_nonpositive_integer(z)) detail::throw_pole(z);
  if (z.imag() == 0.0) return std::tgamma(z.real());
  if (std::abs(z) > 140.0 || std::abs(z.imag()) > 20.0) return std::exp(log_gamma(z));
  if (z.real() < 0.5) {
    const double pi = std::numbers::pi;
    return pi / (std::sin(pi * z) * gamma(1.0 - z));
  }
  const cplx zm = z - 1.0;
  const cplx t = zm + detail::kLanczosG + 0.5;
  return std::exp(detail::kLogSqrtTwoPi + (zm + 0.5) * std::log(t) - t) *
         detail::lanczos_sum(zm);
}

inline double gamma(double x) {
  if (is_nonpositive_integer(x)) detail::throw_pole(cplx(x, 0.0));
  return std::tgamma(x);
}

/// 1/Gamma(z): entire, exactly zero at the non-positive integers.
inline cplx recip_gamma(cplx z) {
  if (is_nonpositive_integer(z)) return 0.0;
  if (z.imag() == 0.0) {
    const double x = z.real();
    if (x < 171.0 && x > -170.0) return 1.0 / std::tgamma(x);
    int sign = 1;
    const double lg = ::lgamma_r(x, &sign);
    return sign * std::exp(-lg);
  }
  if (std::abs(z) > 140.0 || std::abs(z.imag()) > 20.0) return std::exp(-log_gamma(z));
  return 1.0 / gamma(z);
}

inline double recip_gamma(double x) { return recip_gamma(cplx(x, 0.0)).real(); }

} // namespace fracsolve::specfun

#endif // FRACSOLVE_SPECFUN_GAMMA_HPP
