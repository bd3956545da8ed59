#pragma once

#include <vector>

namespace flockcert::gauss {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Golub-Welsch: nodes and normalized weights (summing to 1) of the Gauss rule
/// whose monic orthogonal polynomials satisfy
///   p_{k+1}(x) = (x - diag[k]) p_k(x) - offdiag_sq[k] p_{k-1}(x).
/// `offdiag_sq[k]` couples p_k and p_{k+1}; its size is diag.size() - 1.
Rule golub_welsch(const std::vector<double>& diag,
                  const std::vector<double>& offdiag_sq);

/// Gauss-Legendre on [-1, 1], weights normalized to 1.
Rule legendre(int n);

/// Gauss-Jacobi for weight (1-x)^a (1+x)^b on [-1, 1], weights normalized to 1.
Rule jacobi(int n, double a, double b);

/// Gauss-Laguerre for weight e^{-x} on [0, inf).
Rule laguerre(int n);

}  // namespace flockcert::gauss
