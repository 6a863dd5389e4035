#ifndef FRACSOLVE_NUMERICS_FINITE_DIFFERENCE_HPP
#define FRACSOLVE_NUMERICS_FINITE_DIFFERENCE_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <vector>

namespace fracsolve::numerics {

/// Fornberg weights for the order-th derivative at x0 from samples at xs.
inline std::vector<double> fornberg_weights(double x0, const std::vector<double>& xs, int order) {
  const int n = static_cast<int>(xs.size());
  std::vector<std::vector<double>> c(n, std::vector<double>(order + 1, 0.0));
  double c1 = 1.0;
  double c4 = xs[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = c[i][order];
  return w;
}

/// Half-width (in steps) of the central stencil with the given (even) accuracy order.
inline int central_half_width(int order, int accuracy = 4) { return (order + 1) / 2 + accuracy / 2 - 1; }

/// Integer offsets of the central stencil for the given derivative and accuracy order.
inline std::vector<int> central_offsets(int order, int accuracy = 4) {
  const int p = central_half_width(order, accuracy);
  std::vector<int> offs;
  for (int j = -p; j <= p; ++j) {
    if (j == 0 && order % 2 == 1) continue; // odd derivatives: centre weight is zero
    offs.push_back(j);
  }
  return offs;
}

struct DerivativeEstimate {
  std::complex<double> value{};
  double error = 0.0;
};

/// Order-th derivative of g at x by central differences of the given accuracy order
/// at steps 2h, h, h/2 with Richardson extrapolation of the two finest pairs. The
/// error is the disagreement of the two extrapolants, scaled to the finer one, plus
/// the rounding noise of relative size noise_rel amplified by the finest stencil.
/// Samples are cached so shared stencil points are evaluated once.
template <class G>
DerivativeEstimate richardson_derivative(G&& g, double x, int order, double h, double noise_rel = 2e-16,
                                         int accuracy = 4) {
  const std::vector<int> base = central_offsets(order, accuracy);
  std::map<int, std::complex<double>> cache; // key: offset in units of h/2
  auto sample = [&](int units) {
    auto it = cache.find(units);
    if (it != cache.end()) return it->second;
    const std::complex<double> v = g(x + 0.5 * h * units);
    cache.emplace(units, v);
    return v;
  };
  std::vector<double> unit_xs;
  for (int j : base) unit_xs.push_back(static_cast<double>(j));
  const std::vector<double> w = fornberg_weights(0.0, unit_xs, order);

  auto stencil = [&](int scale) { // step = scale * h/2
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < base.size(); ++i) acc += w[i] * sample(base[i] * scale);
    return acc / std::pow(0.5 * h * scale, order);
  };
  const std::complex<double> d_half = stencil(1);
  const std::complex<double> d_one = stencil(2);
  const std::complex<double> d_two = stencil(4);
  const double gain = std::ldexp(1.0, accuracy);        // 2^p
  const double next = std::ldexp(1.0, accuracy + 2) - 1; // 2^{p+2} - 1
  const std::complex<double> r_fine = (gain * d_half - d_one) / (gain - 1.0);
  const std::complex<double> r_coarse = (gain * d_one - d_two) / (gain - 1.0);
  double wsum = 0.0, fmax = 0.0;
  for (double wi : w) wsum += std::abs(wi);
  for (const auto& kv : cache) fmax = std::max(fmax, std::abs(kv.second));
  const double noise = (gain + 1.0) / (gain - 1.0) * noise_rel * fmax * wsum / std::pow(0.5 * h, order);
  // remainder of order p + 2: r_coarse - r_fine ~ (2^{p+2} - 1) * err(r_fine)
  return {r_fine, std::abs(r_coarse - r_fine) / next + noise};
}

} // namespace fracsolve::numerics

#endif // FRACSOLVE_NUMERICS_FINITE_DIFFERENCE_HPP
