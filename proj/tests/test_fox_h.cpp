#include <gtest/gtest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/erf.hpp>

#include "support/oracles.hpp"

using namespace fracsolve::specfun;
using fracsolve::DomainError;

namespace {

// residue sum of H^{2,0}_{0,2}[z | (b1,1),(b2,1)]
double two_gamma_kernel(double b1, double b2, double z) {
  return 2.0 * std::pow(z, 0.5 * (b1 + b2)) * boost::math::cyl_bessel_k(b1 - b2, 2.0 * std::sqrt(z));
}

FoxH random_h(oracle::Draws& r) {
  // H^{2,0}_{1,2} with a single upper row, as produced for quadratic right-hand sides
  const double alpha = r.uniform(0.3, 1.6);
  return FoxH{2, 0, {UpperRow(r.uniform(0.5, 1.5), alpha)},
              {LowerRow(r.uniform(-0.4, 0.8), 1.0), LowerRow(r.uniform(-0.4, 0.8), r.uniform(0.6, 1.4))}};
}

} // namespace

TEST(FoxH, ExponentialKernel) {
  const FoxH h{1, 0, {}, {LowerRow(0.0, 1.0)}};
  EXPECT_NEAR(fox_h(h, 1.0).real(), std::exp(-1.0), 1e-12);
  for (double z : {0.05, 0.5, 3.0, 12.0}) EXPECT_LE(oracle::rel_diff(fox_h(h, z), std::exp(-z)), 1e-10) << z;
}

TEST(FoxH, BesselKernel) {
  for (auto [b1, b2] : {std::pair{0.0, 0.5}, std::pair{0.3, -0.2}, std::pair{1.1, 0.4}}) {
    const FoxH h{2, 0, {}, {LowerRow(b1, 1.0), LowerRow(b2, 1.0)}};
    for (double z : {0.1, 1.0, 6.0})
      EXPECT_LE(oracle::rel_diff(fox_h(h, z), two_gamma_kernel(b1, b2, z)), 1e-10) << b1 << " " << b2 << " " << z;
  }
}

TEST(FoxH, WrightResidueSum) {
  const FoxH h{1, 0, {UpperRow(1.0, 0.5)}, {LowerRow(0.0, 1.0)}};
  const double ref = oracle::gen_wright_series({}, {{1.0, -0.5}}, -1.0);
  EXPECT_LE(oracle::rel_diff(fox_h(h, 1.0), ref), 1e-10);
  EXPECT_LE(oracle::rel_diff(fox_h(h, 1.0), wright(-1.0, -0.5, 1.0)), 1e-10);
}

TEST(FoxH, AbscissaRulesAgree) {
  oracle::Draws r(31);
  for (int i = 0; i < 10; ++i) {
    const FoxH h = random_h(r);
    const double z = r.uniform(0.2, 3.0);
    const cplx a = fox_h_eval(h, z, 1e-12, AbscissaRule::Saddle).value;
    const cplx b = fox_h_eval(h, z, 1e-12, AbscissaRule::Fixed).value;
    EXPECT_LE(oracle::rel_diff(a, b), 1e-9) << i;
  }
}

TEST(FoxH, PowerShiftIdentity) {
  // z^s H[z | (a_i, A_i); (b_j, B_j)] = H[z | (a_i + s A_i, A_i); (b_j + s B_j, B_j)]
  oracle::Draws r(32);
  for (int i = 0; i < 10; ++i) {
    FoxH h = random_h(r);
    const double s = r.uniform(-0.2, 0.4);
    FoxH g = h;
    for (auto& row : g.upper) row.shift += s * row.step;
    for (auto& row : g.lower) row.shift += s * row.step;
    for (double z : {0.5, 1.0, 2.0})
      EXPECT_LE(oracle::rel_diff(std::pow(z, s) * fox_h(h, z), fox_h(g, z)), 1e-8) << i << " " << z;
  }
}

TEST(FoxH, StepScalingIdentity) {
  // H[z^k | (a_i, k A_i); (b_j, k B_j)] = H[z | ...] / k
  oracle::Draws r(33);
  for (int i = 0; i < 10; ++i) {
    const FoxH h = random_h(r);
    const double k = i % 2 == 0 ? 2.0 : r.uniform(0.6, 1.8);
    FoxH g = h;
    for (auto& row : g.upper) row.step *= k;
    for (auto& row : g.lower) row.step *= k;
    for (double z : {0.5, 1.0, 2.0})
      EXPECT_LE(oracle::rel_diff(fox_h(g, std::pow(z, k)), fox_h(h, z) / k), 1e-8) << i << " " << z;
  }
}

TEST(FoxH, InversionIdentity) {
  // H^{m,l}_{p,q}[1/z | (a, A); (b, B)] = H^{l,m}_{q,p}[z | (1 - b, B); (1 - a, A)]
  oracle::Draws r(34);
  for (int i = 0; i < 10; ++i) {
    const FoxH h = random_h(r);
    FoxH g;
    g.m = h.l;
    g.l = h.m;
    for (const auto& row : h.lower) g.upper.emplace_back(1.0 - row.shift, row.step);
    for (const auto& row : h.upper) g.lower.emplace_back(1.0 - row.shift, row.step);
    for (double z : {0.5, 1.0, 2.0})
      EXPECT_LE(oracle::rel_diff(fox_h(h, 1.0 / z), fox_h(g, z)), 1e-8) << i << " " << z;
  }
}

TEST(FoxH, InvalidDescriptorsRejected) {
  EXPECT_THROW(fox_h(FoxH{0, 0, {}, {LowerRow(0.0, 1.0)}}, 1.0), DomainError);
  EXPECT_THROW(fox_h(FoxH{2, 0, {}, {LowerRow(0.0, 1.0)}}, 1.0), DomainError);
  EXPECT_THROW(fox_h(FoxH{1, 0, {}, {LowerRow(0.0, -1.0)}}, 1.0), DomainError);
  // mu = 1 - 1.5 < 0
  EXPECT_THROW(fox_h(FoxH{1, 0, {UpperRow(1.0, 1.5)}, {LowerRow(0.0, 1.0)}}, 1.0), DomainError);
  // left and right poles overlap
  EXPECT_THROW(fox_h(FoxH{1, 1, {UpperRow(3.0, 1.0)}, {LowerRow(0.0, 1.0)}}, 1.0), DomainError);
  const FoxH ok{1, 0, {}, {LowerRow(0.0, 1.0)}};
  EXPECT_THROW(fox_h(ok, 0.0), DomainError);
  EXPECT_THROW(fox_h_eval(ok, 1.0, 0.0), DomainError);
}

TEST(FoxH, ComplexConjugateShiftsGiveRealValues) {
  const cplx s(0.2, 0.7);
  const FoxH h{2, 0, {UpperRow(1.0, 0.8)}, {LowerRow(-s, 1.0), LowerRow(-std::conj(s), 1.0)}};
  const cplx v = fox_h(h, 1.3);
  EXPECT_LE(std::abs(v.imag()), 1e-10 * std::abs(v));
}

TEST(FoxH, EvaluatorCachesAcrossCalls) {
  FoxHEvaluator ev(FoxH{1, 0, {}, {LowerRow(0.0, 1.0)}});
  const cplx a = ev.integrate(0.7, 1e-12).value;
  const cplx b = ev.integrate(0.7, 1e-12).value;
  EXPECT_EQ(a, b);
  EXPECT_NEAR(a.real(), std::exp(-0.7), 1e-11);
}

TEST(FoxH, ScaledTermDerivatives) {
  // z^rho H[A z^sigma] with H = e^{-x}: z^{rho} exp(-A z^sigma)
  FoxHEvaluator ev(FoxH{1, 0, {}, {LowerRow(0.0, 1.0)}});
  const double A = 0.8, rho = 0.4, sigma = -0.6, z = 1.3;
  auto f = [&](double x) { return std::pow(x, rho) * std::exp(-A * std::pow(x, sigma)); };
  const double h = 1e-4;
  EXPECT_LE(oracle::rel_diff(ev.scaled(A, rho, sigma, 0, z, 1e-12).value, f(z)), 1e-10);
  EXPECT_LE(oracle::rel_diff(ev.scaled(A, rho, sigma, 1, z, 1e-12).value, (f(z + h) - f(z - h)) / (2 * h)), 1e-7);
}

TEST(FoxH, ExponentialDecayAlongPositiveAxis) {
  // H^{m,0} ~ exp(-nu (eps z)^{1/nu}) z^{(2 delta + 1)/(2 nu)}: the ratio to this envelope settles
  oracle::Draws r(37);
  for (int i = 0; i < 5; ++i) {
    const FoxH h = random_h(r);
    const double a = h.upper[0].step, b1 = h.lower[0].step, b2 = h.lower[1].step;
    const double nu = b1 + b2 - a;
    const double eps = std::pow(a, a) * std::pow(b1, -b1) * std::pow(b2, -b2);
    const double delta = h.lower[0].shift.real() + h.lower[1].shift.real() - h.upper[0].shift.real() - 0.5;
    std::vector<double> values, ratios;
    for (double z : {10.0, 20.0, 40.0}) {
      const double v = fox_h(h, z, 1e-14).real();
      values.push_back(std::abs(v));
      ratios.push_back(v / (std::exp(-nu * std::pow(eps * z, 1.0 / nu)) * std::pow(z, (2 * delta + 1) / (2 * nu))));
    }
    EXPECT_GT(values[0], values[1]) << i;
    EXPECT_GT(values[1], values[2]) << i;
    EXPECT_LT(values[2], 1e-3) << i;
    EXPECT_LE(oracle::rel_diff(ratios[1], ratios[2]), 0.5 * oracle::rel_diff(ratios[0], ratios[1]) + 0.05) << i;
  }
}

TEST(Bridge, MittagLefflerAsGenWright) {
  oracle::Draws r(35);
  for (int i = 0; i < 20; ++i) {
    const double a = r.uniform(0.3, 2.5), b = r.uniform(0.3, 2.5), z = r.uniform(-2.0, 2.0);
    EXPECT_LE(oracle::rel_diff(mittag_leffler(a, b, z), gen_wright_eval(as_gen_wright(MittagLeffler{a, b}), z, 1e-15).value),
              1e-14);
    EXPECT_LE(oracle::rel_diff(wright(z, a, b), gen_wright_eval(as_gen_wright(Wright{a, b}), z, 1e-15).value), 1e-14);
  }
}

TEST(Bridge, GenWrightEqualsContourForm) {
  oracle::Draws r(36);
  for (int i = 0; i < 10; ++i) {
    GenWright g{{UpperRow(r.uniform(0.3, 1.5), r.uniform(0.3, 1.0)), UpperRow(1.0, 1.0)},
                {LowerRow(r.uniform(0.5, 2.5), r.uniform(1.2, 2.2))}};
    const auto h = bridge_to_fox_h(g);
    ASSERT_TRUE(h.has_value());
    const double z = r.uniform(0.3, 2.0);
    EXPECT_LE(oracle::rel_diff(gen_wright_eval(g, -z, 1e-15).value, fox_h(*h, z)), 1e-8) << i;
  }
}

TEST(Bridge, NegativeFirstLowerStep) {
  const auto h = bridge_to_fox_h(as_gen_wright(Wright{-0.5, 1.0}));
  ASSERT_TRUE(h.has_value());
  EXPECT_EQ(h->m, 1);
  EXPECT_EQ(h->l, 0);
  ASSERT_EQ(h->upper.size(), 1u);
  EXPECT_EQ(h->upper[0], UpperRow(1.0, 0.5));
  EXPECT_FALSE(bridge_to_fox_h(as_gen_wright(Wright{-1.5, 1.0})).has_value());
  EXPECT_FALSE(bridge_to_fox_h(GenWright{{}, {}}).has_value());
}

TEST(TermEvaluator, LargeNegativeArgumentUsesContour) {
  // E_{1/2}(-x) = exp(x^2) erfc(x)
  TermEvaluator ev(MittagLeffler{0.5, 1.0}, -1.0, 0.0, 1.0);
  for (double x : {6.0, 10.0, 25.0}) {
    const double ref = boost::math::erfc(x) * std::exp(x * x);
    EXPECT_LE(oracle::rel_diff(ev(x, 0, 1e-12).value, ref), 1e-9) << x;
  }
}

TEST(TermEvaluator, SeriesAndContourAgreeOnWrightTerm) {
  // negative-step Wright function: series at small z, contour through the bridge
  TermEvaluator ev(Wright{-0.5, 0.5}, -1.0, 0.0, 1.0);
  for (double z : {0.5, 2.0, 6.0})
    EXPECT_LE(oracle::rel_diff(ev(z, 0, 1e-13).value, std::exp(-z * z / 4) / std::sqrt(std::numbers::pi)), 1e-10) << z;
}

TEST(TermEvaluator, RejectsNonPositivePoint) {
  TermEvaluator ev(MittagLeffler{0.5, 1.0}, 1.0, 0.0, 1.0);
  EXPECT_THROW(ev(0.0, 0, 1e-12), DomainError);
  EXPECT_THROW(TermEvaluator(MittagLeffler{-1.0, 1.0}, 1.0, 0.0, 1.0), DomainError);
}
