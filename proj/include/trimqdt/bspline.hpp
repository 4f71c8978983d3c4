#pragma once

#include <vector>

namespace trimqdt {

/// Clamped B-spline basis on [a, b] with uniform interior knots.
class SplineBasis {
 public:
  SplineBasis(int count, int order, double a, double b);

  int count() const { return count_; }
  int order() const { return order_; }
  double a() const { return a_; }
  double b() const { return b_; }
  const std::vector<double>& knots() const { return knots_; }
  int intervals() const { return count_ - order_ + 1; }

  /// Index of the first spline that is nonzero on the knot interval holding x.
  int first_nonzero(double x) const;

  /// Values and first derivatives of the `order` splines nonzero at x,
  /// starting at first_nonzero(x).
  void evaluate(double x, std::vector<double>& value, std::vector<double>& deriv) const;

  /// Value of spline j at x (zero outside its support).
  double value(int j, double x) const;

 private:
  int count_;
  int order_;
  double a_;
  double b_;
  std::vector<double> knots_;
};

/// Gauss-Legendre nodes on every knot interval with tabulated spline values.
struct SplineQuadrature {
  std::vector<double> x;
  std::vector<double> w;
  std::vector<int> first;                  ///< first nonzero spline per node
  std::vector<std::vector<double>> value;  ///< [node][order]
  std::vector<std::vector<double>> deriv;  ///< [node][order]
};

SplineQuadrature make_spline_quadrature(const SplineBasis& basis, int points_per_interval);

}  // namespace trimqdt
