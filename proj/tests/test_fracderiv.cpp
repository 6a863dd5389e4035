#include <gtest/gtest.h>

#include "support/oracles.hpp"

using namespace fracsolve::specfun;
using namespace fracsolve::fracderiv;
using fracsolve::ConvergenceError;
using fracsolve::DomainError;

namespace {

const double kSqrtPi = std::sqrt(std::numbers::pi);

GenWright random_series(oracle::Draws& r, double b1_step) {
  return GenWright{{UpperRow(r.uniform(0.3, 1.5), r.uniform(0.4, 1.2)), UpperRow(r.uniform(0.3, 1.5), 1.0)},
                   {LowerRow(r.uniform(0.6, 2.0), b1_step), LowerRow(r.uniform(0.5, 2.0), r.uniform(0.5, 1.5))}};
}

double psi(const GenWright& g, double w) { return gen_wright_eval(g, w, 1e-16).value.real(); }

// z d/dz by Richardson differences
template <class F>
double euler_derivative(F f, double z) {
  auto g = [&](double s) { return std::complex<double>(f(s)); };
  return z * fracsolve::numerics::richardson_derivative(g, z, 1, 0.02 * z, 2e-16, 6).value.real();
}

} // namespace

TEST(FracOrder, IntegerDetection) {
  const auto o = FracOrder::make(2.0 + 1e-14);
  EXPECT_TRUE(o.is_integer());
  EXPECT_EQ(o.n, 2);
  const auto f = FracOrder::make(1.3);
  EXPECT_FALSE(f.is_integer());
  EXPECT_EQ(f.n, 2);
  EXPECT_THROW(FracOrder::make(0.0), DomainError);
  EXPECT_THROW(FracOrder::make(-1.0), DomainError);
  EXPECT_THROW(FracOrder::make(std::nan("")), DomainError);
}

TEST(PowerRule, ClosedFormExamples) {
  const auto half = rl_power(FracOrder::make(0.5), 1.0);
  EXPECT_NEAR(half.coeff.real(), 2.0 / kSqrtPi, 1e-15);
  EXPECT_NEAR(half.exponent, 0.5, 0.0);
  const auto two = rl_power(FracOrder::make(1.0), 2.0);
  EXPECT_NEAR(two.coeff.real(), 2.0, 1e-15);
  EXPECT_NEAR(two.exponent, 1.0, 0.0);
}

TEST(PowerRule, KernelPowersAnnihilate) {
  for (double alpha : {0.3, 1.7, 2.4}) {
    for (int k = 1; k <= static_cast<int>(std::ceil(alpha)); ++k)
      EXPECT_EQ(rl_power(FracOrder::make(alpha), alpha - k).coeff, cplx(0.0, 0.0)) << alpha << " " << k;
  }
}

TEST(PowerRule, RejectsNonIntegrablePower) { EXPECT_THROW(rl_power(FracOrder::make(0.5), -1.0), DomainError); }

TEST(PowerSeries, ConstantAndEmpty) {
  const auto d = rl_series({{1.0, 0.0}}, FracOrder::make(0.5));
  ASSERT_EQ(d.size(), 1u);
  EXPECT_NEAR(d[0].coeff.real(), 1.0 / kSqrtPi, 1e-15);
  EXPECT_NEAR(d[0].exponent, -0.5, 0.0);
  EXPECT_TRUE(rl_series({}, FracOrder::make(0.5)).empty());
}

TEST(PowerSeries, TruncatedMittagLefflerShifts) {
  // sum_{k<10} a^k z^{alpha k + alpha - 1}/Gamma(alpha k + alpha): order alpha drops the k = 0 term
  const double alpha = 0.6, a = 1.7;
  std::vector<PowerTerm> terms;
  for (int k = 0; k < 10; ++k) terms.push_back({std::pow(a, k) / std::tgamma(alpha * k + alpha), alpha * k + alpha - 1});
  const auto d = rl_series(terms, FracOrder::make(alpha));
  ASSERT_EQ(d.size(), 9u);
  for (int k = 1; k < 10; ++k) {
    EXPECT_NEAR(d[k - 1].exponent, alpha * (k - 1) + alpha - 1, 1e-14);
    EXPECT_LE(oracle::rel_diff(d[k - 1].coeff, a * std::pow(a, k - 1) / std::tgamma(alpha * (k - 1) + alpha)), 1e-13);
  }
}

TEST(RlNumeric, HalfDerivativeOfIdentity) {
  const auto d = rl_numeric([](double s) { return s; }, FracOrder::make(0.5), 1.0, 1e-9);
  EXPECT_NEAR(d.value.real(), 2.0 / kSqrtPi, 1e-9);
}

TEST(RlNumeric, HalfDerivativeOfConstant) {
  const auto d = rl_numeric([](double) { return 1.0; }, FracOrder::make(0.5), 4.0, 1e-9);
  EXPECT_NEAR(d.value.real(), 0.5 / kSqrtPi, 1e-9);
}

TEST(RlNumeric, PowerRuleDraws) {
  oracle::Draws r(41);
  for (int i = 0; i < 20; ++i) {
    const double alpha = r.off_integer(0.1, 3.5), beta = r.uniform(-0.8, 3.0), z = r.uniform(0.3, 3.0);
    const auto expect = rl_power(FracOrder::make(alpha), beta);
    const double ref = expect.coeff.real() * std::pow(z, expect.exponent);
    const auto d = rl_numeric([&](double s) { return std::pow(s, beta); }, FracOrder::make(alpha), z, 1e-7);
    EXPECT_LE(std::abs(d.value.real() - ref), 1e-6 * std::max(1.0, std::abs(ref))) << alpha << " " << beta << " " << z;
  }
}

TEST(RlNumeric, MittagLefflerShift) {
  // d^0.7 [z^0.3 E_{0.7,1.3}(2 z^0.7)] at z = 1 is E_{0.7,0.6}(2)
  auto f = [](double s) { return std::pow(s, 0.3) * mittag_leffler(0.7, 1.3, 2.0 * std::pow(s, 0.7)).real(); };
  const auto d = rl_numeric(f, FracOrder::make(0.7), 1.0, 1e-8);
  EXPECT_LE(oracle::rel_diff(d.value, mittag_leffler(0.7, 0.6, 2.0)), 1e-7);
}

TEST(RlNumeric, IntegerOrderIsOrdinaryDerivative) {
  const auto d1 = rl_numeric([](double s) { return std::sin(s); }, FracOrder::make(1.0), 0.8, 1e-9);
  EXPECT_NEAR(d1.value.real(), std::cos(0.8), 1e-9);
  EXPECT_EQ(d1.gauss_jacobi_nodes, 0);
  const auto d3 = rl_numeric([](double s) { return std::exp(2 * s); }, FracOrder::make(3.0), 0.8, 1e-8);
  EXPECT_NEAR(d3.value.real(), 8 * std::exp(1.6), 1e-7 * 8 * std::exp(1.6));
}

TEST(RlNumeric, ReportsDiagnostics) {
  const auto d = rl_numeric([](double s) { return std::pow(s, 1.5); }, FracOrder::make(1.4), 2.0, 1e-8);
  EXPECT_GT(d.gauss_jacobi_nodes, 0);
  EXPECT_GT(d.tanh_sinh_level, 0);
  EXPECT_GT(d.step, 0.0);
  EXPECT_GE(d.error, 0.0);
}

TEST(RlNumeric, DomainChecks) {
  auto f = [](double s) { return s; };
  EXPECT_THROW(rl_numeric(f, FracOrder::make(0.5), 0.0, 1e-8), DomainError);
  EXPECT_THROW(rl_numeric(f, FracOrder::make(0.5), -1.0, 1e-8), DomainError);
  EXPECT_THROW(rl_numeric(f, FracOrder::make(0.5), 1.0, 0.0), DomainError);
  EXPECT_THROW(rl_numeric([](double s) { return std::pow(s, -1.2); }, FracOrder::make(0.5), 1.0, 1e-8), DomainError);
}

TEST(RlNumeric, UnreachableToleranceThrowsUnlessRelaxed) {
  auto f = [](double s) { return std::exp(s); };
  RlOptions opt;
  opt.step = 1e-3;
  EXPECT_THROW(rl_numeric(f, FracOrder::make(3.5), 1.0, 1e-14, opt), ConvergenceError);
  opt.strict = false;
  const auto d = rl_numeric(f, FracOrder::make(3.5), 1.0, 1e-14, opt);
  EXPECT_GT(d.error, 1e-14 * std::abs(d.value));
}

TEST(Contiguous, FractionalShiftOfGenWright) {
  // first contiguous relation, m = 0 and m = 1 cases
  oracle::Draws r(42);
  for (int i = 0; i < 10; ++i) {
    const double alpha = r.off_integer(0.2, 2.6), beta1 = r.uniform(0.5, 1.5), a = r.uniform(-1.2, 1.2);
    GenWright g = random_series(r, beta1);
    if (i % 3 == 0) g.lower[0].shift = alpha; // B1 - alpha - 1 = -1 forces m = 1
    const double B1 = g.lower[0].shift.real();
    if (i % 3 != 0 && is_nonpositive_integer(B1 - alpha, 0.05)) continue;
    int m = 0;
    while (is_nonpositive_integer(B1 + m * beta1 - alpha, 1e-12)) ++m;
    GenWright out{{UpperRow(1.0, 1.0)}, {LowerRow(1.0 + m, 1.0)}};
    for (const auto& u : g.upper) out.upper.emplace_back(u.shift + m * u.step, u.step);
    out.lower.emplace_back(B1 + m * beta1 - alpha, beta1);
    for (std::size_t j = 1; j < g.lower.size(); ++j) out.lower.emplace_back(g.lower[j].shift + m * g.lower[j].step, g.lower[j].step);

    auto f = [&](double s) { return std::pow(s, B1 - 1) * psi(g, a * std::pow(s, beta1)); };
    for (double z : {0.6, 1.5}) {
      const double lhs = rl_numeric(f, FracOrder::make(alpha), z, 1e-8).value.real();
      const double rhs = std::pow(a, m) * std::pow(z, B1 + m * beta1 - 1 - alpha) * psi(out, a * std::pow(z, beta1));
      EXPECT_LE(std::abs(lhs - rhs), 1e-6 * std::max(1.0, std::abs(rhs))) << i << " m=" << m << " z=" << z;
    }
  }
}

TEST(Contiguous, EulerLadderOfGenWright) {
  // second contiguous relation
  oracle::Draws r(43);
  for (int i = 0; i < 10; ++i) {
    const double alpha = r.uniform(0.3, 3.0), sigma = r.signed_magnitude(0.3, 1.5), R = r.uniform(-1.0, 1.0);
    const double a = r.uniform(-1.0, 1.0);
    GenWright g = random_series(r, r.uniform(0.8, 1.5));
    const double A1 = g.upper[0].shift.real(), a1 = g.upper[0].step;
    GenWright up = g;
    up.upper[0].shift += 1.0;
    const double e = A1 * sigma / a1 - alpha * R;
    auto f = [&](double s) { return std::pow(s, e) * psi(g, a * std::pow(s, sigma)); };
    for (double z : {0.5, 1.0, 2.0}) {
      const double lhs = euler_derivative(f, z) / alpha + R * f(z);
      const double rhs = sigma / (a1 * alpha) * std::pow(z, e) * psi(up, a * std::pow(z, sigma));
      EXPECT_LE(oracle::rel_diff(lhs, rhs), 1e-6) << i << " z=" << z;
    }
  }
}

TEST(Contiguous, UnitRowFractionalShift) {
  // follows from the first relation with the (1, 1) row absorbing k!
  oracle::Draws r(44);
  for (int i = 0; i < 10; ++i) {
    const double alpha = r.off_integer(0.2, 2.8), beta1 = r.uniform(0.6, 2.0), a = r.uniform(-1.0, 1.0);
    const double B1 = r.uniform(0.5, 2.5);
    if (B1 - alpha - 1 < 0 && is_nonpositive_integer(B1 - alpha, 0.05)) continue;
    const double A2 = r.uniform(0.3, 1.2), a2 = r.uniform(0.3, 1.0);
    GenWright g{{UpperRow(1.0, 1.0), UpperRow(A2, a2)}, {LowerRow(B1, beta1), LowerRow(1.4, 0.7)}};
    GenWright out{{UpperRow(1.0, 1.0), UpperRow(A2, a2)}, {LowerRow(B1 - alpha, beta1), LowerRow(1.4, 0.7)}};
    auto f = [&](double s) { return std::pow(s, B1 - 1) * psi(g, a * std::pow(s, beta1)); };
    for (double z : {0.5, 2.0}) {
      const double lhs = rl_numeric(f, FracOrder::make(alpha), z, 1e-8).value.real();
      const double rhs = std::pow(z, B1 - 1 - alpha) * psi(out, a * std::pow(z, beta1));
      EXPECT_LE(std::abs(lhs - rhs), 1e-6 * std::max(1.0, std::abs(rhs))) << i << " z=" << z;
    }
  }
}

TEST(NegativePowerH, FractionalShift) {
  // d^alpha H^{m,0}[a z^{-alpha_p} | ..., (1, alpha_p)] = z^{-alpha} H^{m,0}[... (1 - alpha, alpha_p)]
  oracle::Draws r(45);
  for (int i = 0; i < 10; ++i) {
    const double alpha = r.uniform(0.2, 1.8), ap = r.uniform(0.3, 1.0), a = r.uniform(0.3, 2.0);
    FoxH h{2, 0, {UpperRow(1.0, ap)}, {LowerRow(r.uniform(-0.3, 0.6), 1.0), LowerRow(r.uniform(-0.3, 0.6), 1.0)}};
    FoxH out = h;
    out.upper.back().shift = 1.0 - alpha;
    FoxHEvaluator eh(h), eo(out);
    auto f = [&](double s) { return eh.scaled(a, 0.0, -ap, 0, s, 1e-13).value.real(); };
    for (double z : {0.5, 1.5}) {
      RlOptions ro;
      ro.strict = false;
      const double lhs = rl_numeric(f, FracOrder::make(alpha), z, 1e-8, ro).value.real();
      const double rhs = std::pow(z, -alpha) * eo.scaled(a, 0.0, -ap, 0, z, 1e-13).value.real();
      EXPECT_LE(oracle::rel_diff(lhs, rhs), 1e-6) << i << " z=" << z;
    }
  }
}

TEST(NegativePowerH, EulerLadder) {
  oracle::Draws r(46);
  for (int i = 0; i < 10; ++i) {
    const double ap = r.uniform(0.3, 1.0), a = r.uniform(0.3, 2.0), b1 = r.uniform(0.7, 1.3);
    FoxH h{2, 0, {UpperRow(1.0, ap)}, {LowerRow(r.uniform(-0.3, 0.6), b1), LowerRow(r.uniform(-0.3, 0.6), 1.0)}};
    const double B1 = h.lower[0].shift.real();
    FoxH up = h;
    up.lower[0].shift += 1.0;
    FoxHEvaluator eh(h), eu(up);
    auto f = [&](double s) { return eh.scaled(a, 0.0, -ap, 0, s, 1e-13).value.real(); };
    for (double z : {0.5, 1.0, 2.0}) {
      const double lhs = b1 / ap * euler_derivative(f, z) + B1 * f(z);
      const double rhs = eu.scaled(a, 0.0, -ap, 0, z, 1e-13).value.real();
      EXPECT_LE(oracle::rel_diff(lhs, rhs), 1e-6) << i << " z=" << z;
    }
  }
}

TEST(RlNumeric, Linearity) {
  auto f = [](double s) { return std::exp(-s) * std::sqrt(s); };
  auto g = [](double s) { return std::cos(s) + s * s; };
  const auto order = FracOrder::make(1.35);
  const double z = 1.4, a = 0.7, b = -2.1;
  const auto df = rl_numeric(f, order, z, 1e-8), dg = rl_numeric(g, order, z, 1e-8);
  const auto dh = rl_numeric([&](double s) { return a * f(s) + b * g(s); }, order, z, 1e-8);
  EXPECT_LE(oracle::rel_diff(dh.value, a * df.value + b * dg.value), 1e-7);
}

TEST(RlNumeric, FirstOrderOnPolynomials) {
  oracle::Draws r(47);
  for (int i = 0; i < 10; ++i) {
    const double c0 = r.uniform(-1, 1), c1 = r.uniform(-1, 1), c2 = r.uniform(-1, 1), c3 = r.uniform(-1, 1);
    const double z = r.uniform(0.3, 3.0);
    auto p = [&](double s) { return c0 + s * (c1 + s * (c2 + s * c3)); };
    const double ref = c1 + z * (2 * c2 + 3 * c3 * z);
    EXPECT_NEAR(rl_numeric(p, FracOrder::make(1.0), z, 1e-9).value.real(), ref, 1e-8) << i;
  }
}

TEST(RlNumeric, MittagLefflerClosedForm) {
  // d^alpha [z^{B-1} E_{beta,B}(a z^beta)] = a^m z^{B+m beta-alpha-1} E_{beta,B+m beta-alpha}(a z^beta)
  oracle::Draws r(48);
  for (int i = 0; i < 20; ++i) {
    const double alpha = r.off_integer(0.1, 2.5), beta = r.uniform(0.3, 2.0), a = r.signed_magnitude(0.3, 1.5);
    const double B = i % 4 == 0 ? alpha : r.uniform(0.5, 2.5);
    int m = 0;
    while (is_nonpositive_integer(B + m * beta - alpha)) ++m;
    const double z = r.uniform(0.5, 2.0);
    auto f = [&](double s) { return std::pow(s, B - 1) * mittag_leffler(beta, B, a * std::pow(s, beta)).real(); };
    RlOptions ro;
    ro.strict = false;
    const double lhs = rl_numeric(f, FracOrder::make(alpha), z, 1e-8, ro).value.real();
    const double rhs = std::pow(a, m) * std::pow(z, B + m * beta - alpha - 1) *
                       mittag_leffler(beta, B + m * beta - alpha, a * std::pow(z, beta)).real();
    EXPECT_LE(oracle::rel_diff(lhs, rhs), 1e-5) << i << " m=" << m;
  }
}
