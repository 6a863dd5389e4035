#ifndef FRACSOLVE_NUMERICS_GAUSS_JACOBI_HPP
#define FRACSOLVE_NUMERICS_GAUSS_JACOBI_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

namespace fracsolve::numerics {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Jacobi rule for the weight (1-x)^a (1+x)^b on [-1, 1], a, b > -1,
/// via the Golub-Welsch eigenvalue problem.
inline QuadratureRule gauss_jacobi(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_jacobi: n must be positive");
  if (a <= -1.0 || b <= -1.0) throw std::invalid_argument("gauss_jacobi: exponents must exceed -1");

  const double ab = a + b;
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(n > 1 ? n - 1 : 0);
  for (int k = 0; k < n; ++k) {
    const double d = 2.0 * k + ab;
    if (k == 0)
      diag(k) = (b - a) / (ab + 2.0);
    else
      diag(k) = (b * b - a * a) / (d * (d + 2.0));
  }
  for (int k = 1; k < n; ++k) {
    const double d = 2.0 * k + ab;
    double beta;
    if (k == 1)
      beta = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    else
      beta = 4.0 * k * (k + a) * (k + b) * (k + ab) / (d * d * (d + 1.0) * (d - 1.0));
    sub(k - 1) = std::sqrt(beta);
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw std::runtime_error("gauss_jacobi: eigen solver failed");

  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) +
                              std::lgamma(b + 1.0) - std::lgamma(ab + 2.0));
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = solver.eigenvalues()(i);
    const double v0 = solver.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v0 * v0;
  }
  return rule;
}

} // namespace fracsolve::numerics

#endif // FRACSOLVE_NUMERICS_GAUSS_JACOBI_HPP
