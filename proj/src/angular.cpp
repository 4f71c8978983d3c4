#include "trimqdt/angular.hpp"

#include <array>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "trimqdt/units.hpp"

namespace trimqdt::angular {

namespace {

constexpr int kMaxFactorial = 170;

const std::array<long double, kMaxFactorial + 1>& factorials() {
  static const auto table = [] {
    std::array<long double, kMaxFactorial + 1> f{};
    f[0] = 1.0L;
    for (int i = 1; i <= kMaxFactorial; ++i) f[i] = f[i - 1] * i;
    return f;
  }();
  return table;
}

long double fact(int n) {
  if (n < 0 || n > kMaxFactorial) throw std::out_of_range("factorial argument out of range");
  return factorials()[n];
}

// Exact binomial coefficient; 0 outside 0 <= k <= n.
__int128 binom(int n, int k) {
  if (k < 0 || k > n || n < 0) return 0;
  if (k > n - k) k = n - k;
  __int128 r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

int twice(double x) {
  const double t = 2.0 * x;
  const double r = std::round(t);
  if (std::abs(t - r) > 1e-9) throw std::invalid_argument("angular momentum must be a half-integer");
  return static_cast<int>(r);
}

bool is_even(int n) { return (n % 2) == 0; }

}  // namespace

AngMomLabel AngMomLabel::from(double j, double m) { return {twice(j), twice(m)}; }

bool AngMomLabel::valid() const {
  return twice_j >= 0 && std::abs(twice_m) <= twice_j && is_even(twice_j - twice_m);
}

double clebsch_gordan_x2(int tj1, int tm1, int tj2, int tm2, int tJ, int tM) {
  if (tj1 < 0 || tj2 < 0 || tJ < 0) return 0.0;
  if (std::abs(tm1) > tj1 || std::abs(tm2) > tj2 || std::abs(tM) > tJ) return 0.0;
  if (tm1 + tm2 != tM) return 0.0;
  if (!is_even(tj1 - tm1) || !is_even(tj2 - tm2) || !is_even(tJ - tM)) return 0.0;
  if (!is_even(tj1 + tj2 - tJ)) return 0.0;
  if (tJ < std::abs(tj1 - tj2) || tJ > tj1 + tj2) return 0.0;

  const int a = (tj1 + tj2 - tJ) / 2;
  const int b = (tj1 - tm1) / 2;
  const int c = (tj2 + tm2) / 2;
  const int jm = (tJ - tM) / 2;
  const int jp = (tJ + tM) / 2;

  // Racah sum rewritten as an exact integer sum of binomial products.
  __int128 sum = 0;
  for (int k = 0; k <= a; ++k) {
    const __int128 t = binom(a, k) * binom(jm, b - k) * binom(jp, c - k);
    sum += (k % 2 == 0) ? t : -t;
  }
  if (sum == 0) return 0.0;

  const long double num = (tJ + 1) * fact((tj1 - tj2 + tJ) / 2) * fact((-tj1 + tj2 + tJ) / 2) *
                          fact((tj1 + tm1) / 2) * fact(b) * fact(c) * fact((tj2 - tm2) / 2);
  const long double den = fact((tj1 + tj2 + tJ) / 2 + 1) * fact(a) * fact(jp) * fact(jm);
  return static_cast<double>(static_cast<long double>(sum) * std::sqrt(num / den));
}

double clebsch_gordan(double j1, double m1, double j2, double m2, double J, double M) {
  return clebsch_gordan_x2(twice(j1), twice(m1), twice(j2), twice(m2), twice(J), twice(M));
}

double wigner_d_x2(int tj, int tmp, int tm, double beta) {
  if (tj < 0 || std::abs(tmp) > tj || std::abs(tm) > tj) return 0.0;
  if (!is_even(tj - tmp) || !is_even(tj - tm)) return 0.0;
  const int jpm = (tj + tm) / 2, jmm = (tj - tm) / 2;
  const int jpmp = (tj + tmp) / 2, jmmp = (tj - tmp) / 2;
  const int dm = (tmp - tm) / 2;  // m' - m
  const long double pref = std::sqrt(fact(jpmp) * fact(jmmp) * fact(jpm) * fact(jmm));
  const long double cb = std::cos(0.5L * beta);
  const long double sb = std::sin(0.5L * beta);
  long double sum = 0.0L;
  const int kmin = std::max(0, -dm);
  const int kmax = std::min(jpm, jmmp);
  for (int k = kmin; k <= kmax; ++k) {
    const long double den = fact(jpm - k) * fact(k) * fact(jmmp - k) * fact(k + dm);
    const int pc = (jpm - k) + (jmmp - k);  // 2j - 2k + m - m'
    const int ps = 2 * k + dm;
    const long double term = std::pow(cb, pc) * std::pow(sb, ps) / den;
    sum += ((k + dm) % 2 == 0) ? term : -term;
  }
  return static_cast<double>(pref * sum);
}

double wigner_d(int j, int mp, int m, double beta) { return wigner_d_x2(2 * j, 2 * mp, 2 * m, beta); }

std::complex<double> wigner_D(int j, int mp, int m, const EulerAngles& e) {
  const double d = wigner_d(j, mp, m, e.beta);
  return std::polar(d, -(mp * e.alpha + m * e.gamma));
}

std::complex<double> rot_harmonic(int N, int K, int m, const EulerAngles& e) {
  const double norm = std::sqrt((2.0 * N + 1.0) / (8.0 * kPi * kPi));
  return norm * std::conj(wigner_D(N, m, K, e));
}

std::vector<ProductTerm> product_expand(int Nplus, int mplus, int Kplus, int l, int lambda,
                                        int Lambda) {
  std::vector<ProductTerm> out;
  const int K = Kplus + Lambda;
  const int m = mplus + lambda;
  for (int N = std::abs(Nplus - l); N <= Nplus + l; ++N) {
    if (std::abs(K) > N || std::abs(m) > N) continue;
    ProductTerm t;
    t.N = N;
    t.K = K;
    t.m = m;
    t.c_body = clebsch_gordan_x2(2 * Nplus, 2 * Kplus, 2 * l, 2 * Lambda, 2 * N, 2 * K);
    t.c_lab = clebsch_gordan_x2(2 * Nplus, 2 * mplus, 2 * l, 2 * lambda, 2 * N, 2 * m);
    if (t.c_body != 0.0 && t.c_lab != 0.0) out.push_back(t);
  }
  return out;
}

double tilde_coefficient(int Nplus, int Kplus, int l, int Lambda, int N) {
  const int K = Kplus + Lambda;
  const double c = clebsch_gordan_x2(2 * l, -2 * Lambda, 2 * N, 2 * K, 2 * Nplus, 2 * Kplus);
  return ((l - Lambda) % 2 == 0) ? c : -c;
}

namespace {
Eigen::MatrixXd perpendicular_j2(int N, double offdiag_sign) {
  const int dim = 2 * N + 1;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  const double nn = N * (N + 1.0);
  auto f = [&](int K) { return std::sqrt(std::max(0.0, nn - K * (K + 1.0))); };
  for (int K = -N; K <= N; ++K) {
    m(K + N, K + N) = 0.5 * (nn - double(K) * K);
    if (K + 2 <= N) {
      const double v = offdiag_sign * 0.25 * f(K) * f(K + 1);
      m(K + 2 + N, K + N) = v;
      m(K + N, K + 2 + N) = v;
    }
  }
  return m;
}
}  // namespace

Eigen::MatrixXd jx2_matrix(int N) { return perpendicular_j2(N, +1.0); }
Eigen::MatrixXd jy2_matrix(int N) { return perpendicular_j2(N, -1.0); }

}  // namespace trimqdt::angular
