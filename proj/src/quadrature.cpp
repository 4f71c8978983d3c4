#include "trimqdt/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include "trimqdt/units.hpp"

namespace trimqdt {

void legendre(int n, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  if (n == 0) {
    p = 1.0;
    dp = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  if (std::abs(1.0 - x * x) < 1e-300) {
    const double s = (x > 0 || n % 2 == 1) ? 1.0 : -1.0;
    dp = s * 0.5 * n * (n + 1.0);
  } else {
    dp = n * (x * p1 - p0) / (x * x - 1.0);
  }
}

QuadratureRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  QuadratureRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double p = 0.0, dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      legendre(n, x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre(n, x, p, dp);
    const double half = 0.5 * (b - a);
    r.x[n - 1 - i] = 0.5 * (a + b) + half * x;
    r.w[n - 1 - i] = half * 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

QuadratureRule gauss_lobatto(int n) {
  if (n < 1) throw std::invalid_argument("gauss_lobatto: n must be positive");
  QuadratureRule r;
  r.x.resize(n + 1);
  r.w.resize(n + 1);
  r.x[0] = -1.0;
  r.x[n] = 1.0;
  // interior nodes are the roots of P'_n; Newton on P'_n using
  // (1-x^2) P''_n = 2x P'_n - n(n+1) P_n
  for (int i = 1; i < n; ++i) {
    double x = -std::cos(kPi * i / n);
    for (int it = 0; it < 100; ++it) {
      double p = 0.0, dp = 0.0;
      legendre(n, x, p, dp);
      const double d2p = (2.0 * x * dp - n * (n + 1.0) * p) / (1.0 - x * x);
      const double dx = dp / d2p;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.x[i] = x;
  }
  for (int i = 0; i <= n; ++i) {
    double p = 0.0, dp = 0.0;
    legendre(n, r.x[i], p, dp);
    r.w[i] = 2.0 / (n * (n + 1.0) * p * p);
  }
  return r;
}

}  // namespace trimqdt
