#include "flockcert/gauss_rules.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "flockcert/errors.hpp"

namespace flockcert::gauss {

Rule golub_welsch(const std::vector<double>& diag,
                  const std::vector<double>& offdiag_sq) {
  const auto n = static_cast<Eigen::Index>(diag.size());
  if (n < 1) throw InvalidOrder("Gauss rule needs at least one node");
  if (static_cast<Eigen::Index>(offdiag_sq.size()) != n - 1)
    throw InvalidOrder("recurrence coefficient size mismatch");

  Eigen::VectorXd d(n);
  Eigen::VectorXd e(std::max<Eigen::Index>(n - 1, 0));
  for (Eigen::Index i = 0; i < n; ++i) d[i] = diag[static_cast<std::size_t>(i)];
  for (Eigen::Index i = 0; i + 1 < n; ++i)
    e[i] = std::sqrt(offdiag_sq[static_cast<std::size_t>(i)]);

  Rule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  if (n == 1) {
    rule.nodes[0] = d[0];
    rule.weights[0] = 1.0;
    return rule;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success)
    throw Error("tridiagonal eigenvalue problem did not converge");

  // Eigen returns eigenvalues in increasing order.
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v0 = solver.eigenvectors()(0, i);
    rule.nodes[static_cast<std::size_t>(i)] = solver.eigenvalues()[i];
    rule.weights[static_cast<std::size_t>(i)] = v0 * v0;
    total += v0 * v0;
  }
  for (auto& w : rule.weights) w /= total;
  return rule;
}

Rule jacobi(int n, double a, double b) {
  if (n < 1) throw InvalidOrder("Gauss-Jacobi order must be >= 1");
  std::vector<double> diag(static_cast<std::size_t>(n));
  std::vector<double> off(static_cast<std::size_t>(n - 1));
  const double ab = a + b;
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + ab;
    if (k == 0) {
      diag[0] = (b - a) / (ab + 2.0);
    } else {
      diag[static_cast<std::size_t>(k)] = (b * b - a * a) / (s * (s + 2.0));
    }
  }
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + ab;
    double beta = 4.0 * k * (k + a) * (k + b) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
    if (k == 1 && std::abs(ab + 1.0) < 1e-300) {
      beta = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    }
    off[static_cast<std::size_t>(k - 1)] = beta;
  }
  return golub_welsch(diag, off);
}

Rule legendre(int n) {
  if (n < 1) throw InvalidOrder("Gauss-Legendre order must be >= 1");
  std::vector<double> diag(static_cast<std::size_t>(n), 0.0);
  std::vector<double> off(static_cast<std::size_t>(n - 1));
  for (int k = 1; k < n; ++k) {
    const double kk = static_cast<double>(k) * k;
    off[static_cast<std::size_t>(k - 1)] = kk / (4.0 * kk - 1.0);
  }
  return golub_welsch(diag, off);
}

Rule laguerre(int n) {
  if (n < 1) throw InvalidOrder("Gauss-Laguerre order must be >= 1");
  std::vector<double> diag(static_cast<std::size_t>(n));
  std::vector<double> off(static_cast<std::size_t>(n - 1));
  for (int k = 0; k < n; ++k) diag[static_cast<std::size_t>(k)] = 2.0 * k + 1.0;
  for (int k = 1; k < n; ++k) off[static_cast<std::size_t>(k - 1)] = static_cast<double>(k) * k;
  return golub_welsch(diag, off);
}

}  // namespace flockcert::gauss
