#include "trimqdt/levels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "trimqdt/units.hpp"

namespace trimqdt::mqdt {

double LevelRecord::E_cm() const { return to_cm(E); }

Eigen::VectorXd effective_nu(double E, const Eigen::VectorXd& thr) {
  Eigen::VectorXd nu(thr.size());
  for (int i = 0; i < thr.size(); ++i) {
    const double d = thr(i) - E;
    if (!(d > 0.0)) throw std::domain_error("effective_nu: energy at or above a threshold");
    nu(i) = 1.0 / std::sqrt(2.0 * d);
  }
  return nu;
}

namespace {

Eigen::MatrixXd det_matrix(double E, const Eigen::MatrixXd& K, const Eigen::VectorXd& thr) {
  const Eigen::VectorXd nu = effective_nu(E, thr);
  Eigen::MatrixXd A(K.rows(), K.cols());
  for (int i = 0; i < K.rows(); ++i) {
    const double s = std::sin(kPi * nu(i)), c = std::cos(kPi * nu(i));
    A.row(i) = c * K.row(i);
    A(i, i) += s;
  }
  return A;
}

double min_sv(double E, const Eigen::MatrixXd& K, const Eigen::VectorXd& thr) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(det_matrix(E, K, thr)).singularValues().minCoeff();
}

double energy_of_nu(double thr0, double nu) { return thr0 - 0.5 / (nu * nu); }

// Brent's method on a bracket with f(a) f(b) < 0
template <class F>
double brent(F f, double a, double b, double fa, double fb, double tol) {
  double c = a, fc = fa, d = b - a, e = d;
  for (int it = 0; it < 200; ++it) {
    if (fb * fc > 0) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double m = 0.5 * (c - b);
    const double t = 2.0 * 1e-16 * std::abs(b) + 0.5 * tol;
    if (std::abs(m) <= t || fb == 0.0) return b;
    if (std::abs(e) >= t && std::abs(fa) > std::abs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2 * m * s;
        q = 1 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2 * m * q * (q - r) - (b - a) * (r - 1));
        q = (q - 1) * (r - 1) * (s - 1);
      }
      if (p > 0) q = -q;
      p = std::abs(p);
      if (2 * p < std::min(3 * m * q - std::abs(t * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = d;
      }
    } else {
      d = m;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > t ? d : (m > 0 ? t : -t);
    fb = f(b);
  }
  return b;
}

template <class F>
double golden_min(F f, double a, double b, double tol) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - r * (b - a), x2 = a + r * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

struct Root {
  double E;
  int mult;
};

std::vector<Root> scan(const Eigen::MatrixXd& K, const Eigen::VectorXd& thr, double E_lo, double E_hi,
                       const FindOptions& opt, double step) {
  const double thr0 = thr.minCoeff();
  const double nu_lo = 1.0 / std::sqrt(2.0 * (thr0 - E_lo));
  const double nu_hi = 1.0 / std::sqrt(2.0 * (thr0 - E_hi));
  const int n = std::max(2, static_cast<int>(std::ceil((nu_hi - nu_lo) / step)) + 1);
  std::vector<double> E(n), d(n), s(n);
  for (int i = 0; i < n; ++i) E[i] = i + 1 == n ? E_hi : energy_of_nu(thr0, nu_lo + (nu_hi - nu_lo) * i / (n - 1));
  E[0] = E_lo;
  const int threads = std::max(1, std::min(opt.threads, n));
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (int i = t; i < n; i += threads) {
        const Eigen::MatrixXd A = det_matrix(E[i], K, thr);
        d[i] = A.determinant();
        s[i] = Eigen::JacobiSVD<Eigen::MatrixXd>(A).singularValues().minCoeff();
      }
    });
  for (auto& th : pool) th.join();

  auto f = [&](double e) { return det_function(e, K, thr); };
  std::vector<Root> roots;
  for (int i = 0; i + 1 < n; ++i) {
    if (d[i] == 0.0) {
      roots.push_back({E[i], 1});
      continue;
    }
    if (d[i] * d[i + 1] < 0.0) {
      roots.push_back({brent(f, E[i], E[i + 1], d[i], d[i + 1], opt.tol), 1});
      continue;
    }
    // touching roots: local minimum of the smallest singular value without a sign change
    if (i > 0 && s[i] < s[i - 1] && s[i] <= s[i + 1] && d[i - 1] * d[i] > 0.0) {
      auto g = [&](double e) { return min_sv(e, K, thr); };
      const double e = golden_min(g, E[i - 1], E[i + 1], opt.tol);
      const double smin = g(e);
      if (smin < opt.degenerate_tol) {
        const auto sv = Eigen::JacobiSVD<Eigen::MatrixXd>(det_matrix(e, K, thr)).singularValues();
        int m = 0;
        for (int k = 0; k < sv.size(); ++k)
          if (sv(k) < std::sqrt(opt.degenerate_tol)) ++m;
        roots.push_back({e, std::max(2, m)});
      }
    }
  }
  if (d[n - 1] == 0.0) roots.push_back({E[n - 1], 1});
  return roots;
}

LevelRecord annotate(double E, int mult, const Eigen::MatrixXd& K, const Eigen::VectorXd& thr) {
  LevelRecord r;
  r.E = E;
  r.multiplicity = mult;
  const Eigen::VectorXd nu = effective_nu(E, thr);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(det_matrix(E, K, thr), Eigen::ComputeFullV);
  const Eigen::VectorXd x = svd.matrixV().col(K.cols() - 1);
  double tot = 0.0;
  for (int i = 0; i < nu.size(); ++i) {
    r.nu.push_back(nu(i));
    const double c = std::cos(kPi * nu(i));
    // guard channels sitting on a pole of tan
    const double w = nu(i) * nu(i) * nu(i) * x(i) * x(i) / std::max(c * c, 1e-30);
    r.weights.push_back(w);
    tot += w;
  }
  double best = -1.0;
  for (std::size_t i = 0; i < r.weights.size(); ++i) {
    if (tot > 0) r.weights[i] /= tot;
    if (r.weights[i] > best) {
      best = r.weights[i];
      r.dominant = static_cast<int>(i);
    }
  }
  return r;
}

}  // namespace

double det_function(double E, const Eigen::MatrixXd& K, const Eigen::VectorXd& thr) {
  if (K.rows() != K.cols() || K.rows() != thr.size()) throw std::invalid_argument("det_function: size mismatch");
  return det_matrix(E, K, thr).determinant();
}

std::pair<double, double> nu_window(const Eigen::VectorXd& thr, double nu_lo, double nu_hi) {
  if (!(nu_lo > 0.0) || !(nu_hi > nu_lo)) throw std::invalid_argument("nu_window: need 0 < nu_lo < nu_hi");
  const double t = thr.minCoeff();
  return {energy_of_nu(t, nu_lo), energy_of_nu(t, nu_hi)};
}

FindResult find_levels(const Eigen::MatrixXd& K, const Eigen::VectorXd& thr, double E_lo, double E_hi,
                       const FindOptions& opt) {
  if (K.rows() != K.cols() || K.rows() != thr.size()) throw std::invalid_argument("find_levels: size mismatch");
  if (thr.size() == 0) throw std::invalid_argument("find_levels: no channels");
  if (!(E_hi > E_lo)) throw std::invalid_argument("find_levels: empty window");
  if (!(E_hi < thr.minCoeff())) throw std::domain_error("find_levels: window reaches the lowest threshold");
  if (!(opt.nu_step > 0.0) || opt.nu_step > 0.005) throw std::invalid_argument("find_levels: nu_step must be in (0, 0.005]");
  FindResult res;
  const auto coarse = scan(K, thr, E_lo, E_hi, opt, opt.nu_step);
  const auto fine = scan(K, thr, E_lo, E_hi, opt, 0.5 * opt.nu_step);
  auto count = [](const std::vector<Root>& r) {
    int c = 0;
    for (const auto& x : r) c += x.mult;
    return c;
  };
  res.count_fine = count(fine);
  res.stable = count(coarse) == res.count_fine;
  for (const auto& r : fine) res.levels.push_back(annotate(r.E, r.mult, K, thr));
  std::sort(res.levels.begin(), res.levels.end(), [](const LevelRecord& a, const LevelRecord& b) { return a.E < b.E; });
  return res;
}

}  // namespace trimqdt::mqdt
