#pragma once

#include <vector>

namespace trimqdt {

struct QuadratureRule {
  std::vector<double> x;
  std::vector<double> w;
};

/// n-point Gauss-Legendre rule on [a, b].
QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// (n+1)-point Gauss-Lobatto-Legendre rule on [-1, 1] (nodes include +-1).
QuadratureRule gauss_lobatto(int n);

/// Legendre polynomial P_n(x) and its derivative.
void legendre(int n, double x, double& p, double& dp);

}  // namespace trimqdt
