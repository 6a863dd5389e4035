#ifndef FRACSOLVE_SPECFUN_DESCRIPTOR_HPP
#define FRACSOLVE_SPECFUN_DESCRIPTOR_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <sstream>
#include <variant>
#include <vector>

#include "fracsolve/errors.hpp"

namespace fracsolve::specfun {

using cplx = std::complex<double>;

struct upper_tag {};
struct lower_tag {};

/// One parameter pair (shift, step) of a Wright- or H-type function. The role
/// (numerator-side "upper" row vs denominator-side "lower" row) is part of the type.
template <class Role>
struct Row {
  cplx shift{};
  double step = 1.0;

  Row() = default;
  Row(cplx shift_, double step_) : shift(shift_), step(step_) {}
  Row(double shift_, double step_) : shift(shift_, 0.0), step(step_) {}

  bool operator==(const Row&) const = default;
};

using UpperRow = Row<upper_tag>;
using LowerRow = Row<lower_tag>;

/// E_{alpha,beta}(z) = sum z^k / Gamma(alpha k + beta)
struct MittagLeffler {
  double alpha = 1.0;
  double beta = 1.0;
};

/// Psi(z; alpha, beta) = sum z^k / (k! Gamma(alpha k + beta))
struct Wright {
  double alpha = 0.0;
  double beta = 1.0;
};

/// pPsi_q[z | (A_i, alpha_i); (B_j, beta_j)]
struct GenWright {
  std::vector<UpperRow> upper;
  std::vector<LowerRow> lower;
};

/// H^{m,l}_{p,q}[z | (A_i, alpha_i)_{1,p}; (B_j, beta_j)_{1,q}]
struct FoxH {
  int m = 0;
  int l = 0;
  std::vector<UpperRow> upper;
  std::vector<LowerRow> lower;

  int p() const { return static_cast<int>(upper.size()); }
  int q() const { return static_cast<int>(lower.size()); }
};

using SpecialFunctionDescriptor = std::variant<MittagLeffler, Wright, GenWright, FoxH>;

struct EvalDiagnostics {
  std::size_t terms_used = 0; // series terms, or integrand evaluations for contours
  double tail_estimate = 0.0;
  double contour_half_height = 0.0;
  bool converged = false;
  /// max |term| / |sum| for series; integral of |integrand| / |integral| for contours.
  double condition = 1.0;
};

template <class T>
struct Evaluated {
  T value{};
  EvalDiagnostics diagnostics;
};

/// Delta = sum beta_j - sum alpha_i
inline double delta_index(const GenWright& g) {
  double d = 0.0;
  for (const auto& r : g.lower) d += r.step;
  for (const auto& r : g.upper) d -= r.step;
  return d;
}

/// mu = sum_{i<=l} alpha_i - sum_{i>l} alpha_i + sum_{j<=m} beta_j - sum_{j>m} beta_j
inline double mu_index(const FoxH& h) {
  double mu = 0.0;
  for (int i = 0; i < h.p(); ++i) mu += (i < h.l ? 1.0 : -1.0) * h.upper[i].step;
  for (int j = 0; j < h.q(); ++j) mu += (j < h.m ? 1.0 : -1.0) * h.lower[j].step;
  return mu;
}

/// nu = sum beta_j - sum alpha_i
inline double nu_index(const FoxH& h) {
  double nu = 0.0;
  for (const auto& r : h.lower) nu += r.step;
  for (const auto& r : h.upper) nu -= r.step;
  return nu;
}

inline void validate(const GenWright& g) {
  for (const auto& r : g.upper)
    if (r.step == 0.0) throw DomainError("generalized Wright: upper step must be nonzero");
  for (const auto& r : g.lower)
    if (r.step == 0.0) throw DomainError("generalized Wright: lower step must be nonzero");
  const double delta = delta_index(g);
  if (!(delta > -1.0)) {
    std::ostringstream os;
    os << "generalized Wright series diverges: Delta = " << delta << " <= -1";
    throw DomainError(os.str());
  }
}

inline void validate(const FoxH& h) {
  if (h.m < 0 || h.m > h.q() || h.l < 0 || h.l > h.p())
    throw DomainError("Fox H: require 0 <= m <= q and 0 <= l <= p");
  if (h.m == 0 && h.l == 0) throw DomainError("Fox H: (m, l) = (0, 0) is not allowed");
  for (const auto& r : h.upper)
    if (!(r.step > 0.0)) throw DomainError("Fox H: upper steps must be positive");
  for (const auto& r : h.lower)
    if (!(r.step > 0.0)) throw DomainError("Fox H: lower steps must be positive");
  const double mu = mu_index(h);
  if (!(mu > 0.0)) {
    std::ostringstream os;
    os << "Fox H contour integral diverges: mu = " << mu << " <= 0";
    throw DomainError(os.str());
  }
}

/// E_{alpha,beta} = 1Psi1[(1,1); (beta,alpha)]
inline GenWright as_gen_wright(const MittagLeffler& f) {
  return GenWright{{UpperRow(1.0, 1.0)}, {LowerRow(f.beta, f.alpha)}};
}

/// Psi(z; alpha, beta) = 0Psi1[-; (beta, alpha)]
inline GenWright as_gen_wright(const Wright& f) { return GenWright{{}, {LowerRow(f.beta, f.alpha)}}; }

/// H-function representation of pPsi_q (evaluated at -z). Needs all upper steps and
/// lower steps beyond the first to be positive, and beta_1 > 0 or -1 < beta_1 < 0.
inline std::optional<FoxH> bridge_to_fox_h(const GenWright& g) {
  if (g.lower.empty()) return std::nullopt;
  for (const auto& r : g.upper)
    if (!(r.step > 0.0)) return std::nullopt;
  for (std::size_t j = 1; j < g.lower.size(); ++j)
    if (!(g.lower[j].step > 0.0)) return std::nullopt;

  FoxH h;
  h.m = 1;
  h.l = static_cast<int>(g.upper.size());
  for (const auto& r : g.upper) h.upper.emplace_back(1.0 - r.shift, r.step);
  const LowerRow& first = g.lower.front();
  h.lower.emplace_back(0.0, 1.0);
  if (first.step > 0.0) {
    h.lower.emplace_back(1.0 - first.shift, first.step);
  } else if (first.step > -1.0) {
    h.upper.emplace_back(first.shift, -first.step);
  } else {
    return std::nullopt;
  }
  for (std::size_t j = 1; j < g.lower.size(); ++j) h.lower.emplace_back(1.0 - g.lower[j].shift, g.lower[j].step);
  return h;
}

} // namespace fracsolve::specfun

#endif // FRACSOLVE_SPECFUN_DESCRIPTOR_HPP
