#ifndef FRACSOLVE_SPECFUN_EVALUATE_HPP
#define FRACSOLVE_SPECFUN_EVALUATE_HPP

#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <optional>
#include <variant>

#include "fracsolve/specfun/descriptor.hpp"
#include "fracsolve/specfun/fox_h.hpp"
#include "fracsolve/specfun/series.hpp"

namespace fracsolve::specfun {

/// Series whose largest term exceeds the sum by this factor are re-evaluated
/// through the H-function representation when one is available.
inline constexpr double kSeriesConditionLimit = 1e3;

/// Evaluates z -> d^N/dz^N [ z^rho F(A z^sigma) ] for one descriptor F at z > 0.
/// Series descriptors fall back to the contour integral of their H-function
/// form when the power series loses too many digits to cancellation.
class TermEvaluator {
public:
  TermEvaluator(SpecialFunctionDescriptor f, cplx A, double rho, double sigma)
      : f_(std::move(f)), A_(A), rho_(rho), sigma_(sigma) {
    if (const auto* h = std::get_if<FoxH>(&f_)) {
      contour_ = std::make_unique<FoxHEvaluator>(*h);
    } else {
      series_ = to_series(f_);
      if (const auto* ml = std::get_if<MittagLeffler>(&f_); ml && !(ml->alpha > 0.0))
        throw DomainError("Mittag-Leffler: alpha must be positive");
      if (const auto* w = std::get_if<Wright>(&f_); w && !(w->alpha > -1.0))
        throw DomainError("Wright function: alpha must exceed -1");
      if (std::holds_alternative<GenWright>(f_)) validate(series_);
    }
  }

  Evaluated<cplx> operator()(double z, int N, double tol) {
    if (!(z > 0.0)) throw DomainError("solution terms are evaluated for z > 0 only");
    if (contour_) return contour_->scaled(A_, rho_, sigma_, N, z, tol);

    Evaluated<cplx> r;
    std::optional<ConvergenceError> series_failure;
    try {
      const cplx w = A_ * std::pow(z, sigma_);
      auto mult = [&](std::size_t k) { return detail::falling(cplx(rho_ + sigma_ * static_cast<double>(k)), N); };
      r = detail::sum_gen_wright(series_, w, tol, mult);
      r.value *= std::pow(z, rho_ - N);
      if (r.diagnostics.condition <= kSeriesConditionLimit) return r;
    } catch (const ConvergenceError& e) {
      series_failure = e;
    }
    if (auto* bridge = bridge_evaluator()) {
      const cplx x = -A_ * std::pow(z, sigma_);
      if (std::abs(std::arg(x)) < 0.5 * std::numbers::pi * bridge->mu()) {
        Evaluated<cplx> c = bridge->integrate(x, tol, rho_, sigma_, N);
        c.value *= std::pow(z, rho_ - N);
        return c;
      }
    }
    if (series_failure) throw *series_failure;
    return r;
  }

  const SpecialFunctionDescriptor& descriptor() const { return f_; }

private:
  static GenWright to_series(const SpecialFunctionDescriptor& f) {
    if (const auto* ml = std::get_if<MittagLeffler>(&f)) return as_gen_wright(*ml);
    if (const auto* w = std::get_if<Wright>(&f)) return as_gen_wright(*w);
    return std::get<GenWright>(f);
  }

  FoxHEvaluator* bridge_evaluator() {
    if (!bridge_tried_) {
      bridge_tried_ = true;
      if (auto h = bridge_to_fox_h(series_)) {
        try {
          bridge_ = std::make_unique<FoxHEvaluator>(*h);
        } catch (const DomainError&) {
          bridge_.reset();
        }
      }
    }
    return bridge_.get();
  }

  SpecialFunctionDescriptor f_;
  cplx A_;
  double rho_;
  double sigma_;
  GenWright series_;
  std::unique_ptr<FoxHEvaluator> contour_;
  std::unique_ptr<FoxHEvaluator> bridge_;
  bool bridge_tried_ = false;
};

} // namespace fracsolve::specfun

#endif // FRACSOLVE_SPECFUN_EVALUATE_HPP
