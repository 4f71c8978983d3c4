#include "trimqdt/bspline.hpp"

#include <algorithm>
#include <stdexcept>

#include "trimqdt/quadrature.hpp"

namespace trimqdt {

SplineBasis::SplineBasis(int count, int order, double a, double b)
    : count_(count), order_(order), a_(a), b_(b) {
  if (order < 2) throw std::invalid_argument("SplineBasis: order must be >= 2");
  if (count < order) throw std::invalid_argument("SplineBasis: count must be >= order");
  if (!(b > a)) throw std::invalid_argument("SplineBasis: empty interval");
  const int nint = intervals();
  knots_.reserve(count + order);
  for (int i = 0; i < order - 1; ++i) knots_.push_back(a);
  for (int i = 0; i <= nint; ++i) knots_.push_back(a + (b - a) * i / nint);
  for (int i = 0; i < order - 1; ++i) knots_.push_back(b);
}

int SplineBasis::first_nonzero(double x) const {
  const int nint = intervals();
  int cell = static_cast<int>((x - a_) / (b_ - a_) * nint);
  cell = std::clamp(cell, 0, nint - 1);
  return cell;  // spline index of the first nonzero function equals the cell index
}

void SplineBasis::evaluate(double x, std::vector<double>& value,
                           std::vector<double>& deriv) const {
  const int k = order_;
  const int cell = first_nonzero(x);
  const int mu = cell + k - 1;  // knots_[mu] <= x < knots_[mu+1]
  // de Boor triangle; b[i] holds B_{mu-r+i, r+1}
  std::vector<double> b(k, 0.0), left(k, 0.0), right(k, 0.0), lower(k, 0.0);
  b[0] = 1.0;
  for (int r = 1; r < k; ++r) {
    left[r] = x - knots_[mu + 1 - r];
    right[r] = knots_[mu + r] - x;
    double saved = 0.0;
    if (r == k - 1) lower.assign(b.begin(), b.end());
    for (int i = 0; i < r; ++i) {
      const double temp = b[i] / (right[i + 1] + left[r - i]);
      b[i] = saved + right[i + 1] * temp;
      saved = left[r - i] * temp;
    }
    b[r] = saved;
  }
  value.assign(b.begin(), b.end());
  // derivative from order k-1 splines: B'_{i,k} = (k-1)[B_{i,k-1}/(t_{i+k-1}-t_i) - B_{i+1,k-1}/(t_{i+k}-t_{i+1})]
  deriv.assign(k, 0.0);
  for (int i = 0; i < k; ++i) {
    const int gi = cell + i;
    double d = 0.0;
    if (i >= 1) {
      const double den = knots_[gi + k - 1] - knots_[gi];
      if (den > 0.0) d += lower[i - 1] / den;
    }
    if (i <= k - 2) {
      const double den = knots_[gi + k] - knots_[gi + 1];
      if (den > 0.0) d -= lower[i] / den;
    }
    deriv[i] = (k - 1) * d;
  }
}

double SplineBasis::value(int j, double x) const {
  if (x < a_ || x > b_) return 0.0;
  const int cell = first_nonzero(x);
  if (j < cell || j >= cell + order_) return 0.0;
  std::vector<double> v, d;
  evaluate(x, v, d);
  return v[j - cell];
}

SplineQuadrature make_spline_quadrature(const SplineBasis& basis, int points_per_interval) {
  SplineQuadrature q;
  const auto& t = basis.knots();
  const int k = basis.order();
  for (int c = 0; c < basis.intervals(); ++c) {
    const double lo = t[c + k - 1];
    const double hi = t[c + k];
    const auto rule = gauss_legendre(points_per_interval, lo, hi);
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
      std::vector<double> v, d;
      basis.evaluate(rule.x[i], v, d);
      q.x.push_back(rule.x[i]);
      q.w.push_back(rule.w[i]);
      q.first.push_back(basis.first_nonzero(rule.x[i]));
      q.value.push_back(std::move(v));
      q.deriv.push_back(std::move(d));
    }
  }
  return q;
}

}  // namespace trimqdt
