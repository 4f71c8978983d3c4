#pragma once
// Independent reference implementations used only by the tests.

#include <cmath>
#include <complex>
#include <map>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

inline const double kPi = std::acos(-1.0);

struct Rule {
  std::vector<double> x, w;
};

// Gauss-Legendre nodes on [a, b] by Newton iteration on P_n.
inline Rule gauss_legendre(int n, double a, double b) {
  Rule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5)), dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    r.x[i] = 0.5 * (b - a) * z + 0.5 * (a + b);
    r.w[i] = (b - a) / ((1.0 - z * z) * dp * dp);
  }
  return r;
}

// Clebsch-Gordan coefficients for integer j1, j2 built from the highest-weight
// state by repeated lowering and orthogonalisation in the product basis.
class CGTable {
 public:
  CGTable(int j1, int j2) : j1_(j1), j2_(j2) {
    const int d1 = 2 * j1 + 1, d2 = 2 * j2 + 1;
    auto idx = [&](int m1, int m2) { return (m1 + j1) * d2 + (m2 + j2); };
    const int dim = d1 * d2;
    auto lower = [&](const Eigen::VectorXd& v) {
      Eigen::VectorXd out = Eigen::VectorXd::Zero(dim);
      for (int m1 = -j1; m1 <= j1; ++m1)
        for (int m2 = -j2; m2 <= j2; ++m2) {
          const double c = v[idx(m1, m2)];
          if (c == 0.0) continue;
          if (m1 > -j1) out[idx(m1 - 1, m2)] += c * std::sqrt(double(j1 * (j1 + 1) - m1 * (m1 - 1)));
          if (m2 > -j2) out[idx(m1, m2 - 1)] += c * std::sqrt(double(j2 * (j2 + 1) - m2 * (m2 - 1)));
        }
      return out;
    };
    std::map<std::pair<int, int>, Eigen::VectorXd> st;
    for (int J = j1 + j2; J >= std::abs(j1 - j2); --J) {
      // top state: orthogonal to all |J' J> with J' > J, sign fixed by <j1 j1; j2 J-j1|J J> > 0
      Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
      for (int m1 = -j1; m1 <= j1; ++m1) {
        const int m2 = J - m1;
        if (std::abs(m2) <= j2) v[idx(m1, m2)] = 1.0 + 0.1 * m1;
      }
      for (int pass = 0; pass < 3; ++pass)
        for (int Jp = J + 1; Jp <= j1 + j2; ++Jp) {
          const auto& u = st[{Jp, J}];
          v -= u.dot(v) * u;
        }
      v.normalize();
      if (v[idx(j1, J - j1)] < 0) v = -v;
      st[{J, J}] = v;
      for (int M = J; M > -J; --M) {
        Eigen::VectorXd w = lower(st[{J, M}]);
        st[{J, M - 1}] = w.normalized();
      }
    }
    for (auto& [k, v] : st)
      for (int m1 = -j1; m1 <= j1; ++m1)
        for (int m2 = -j2; m2 <= j2; ++m2)
          if (m1 + m2 == k.second) c_[{m1, m2, k.first}] = v[idx(m1, m2)];
  }
  double operator()(int m1, int m2, int J) const {
    auto it = c_.find({m1, m2, J});
    return it == c_.end() ? 0.0 : it->second;
  }

 private:
  int j1_, j2_;
  std::map<std::tuple<int, int, int>, double> c_;
};

}  // namespace oracle

namespace oracle {

// d^j_{m'm}(beta) = <j m'| exp(-i beta J_y) |j m> by diagonalising J_y.
inline Eigen::MatrixXd small_d(int j, double beta) {
  const int d = 2 * j + 1;
  Eigen::MatrixXcd Jy = Eigen::MatrixXcd::Zero(d, d);
  for (int m = -j; m < j; ++m) {
    // <m+1|J+|m>
    const double c = std::sqrt(double(j * (j + 1) - m * (m + 1)));
    Jy(m + 1 + j, m + j) += std::complex<double>(0, -0.5) * c;
    Jy(m + j, m + 1 + j) += std::complex<double>(0, 0.5) * c;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Jy);
  Eigen::VectorXcd ph(d);
  for (int k = 0; k < d; ++k) ph[k] = std::exp(std::complex<double>(0, -beta * es.eigenvalues()[k]));
  Eigen::MatrixXcd U = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
  return U.real();
}

}  // namespace oracle

namespace oracle {

// Multiplicity of total angular momentum N and S3 irrep (0 = A1, 1 = A2, 2 = E)
// among degree-lam harmonic polynomials on R^6 = (two Jacobi vectors). Counted
// from characters: weights of the polynomial ring under Jz and the eigenvalues of
// a permutation on the two-dimensional Jacobi representation.
inline int harmonic_multiplicity(int lam, int N, int irrep) {
  using cd = std::complex<double>;
  const cd w = std::exp(cd(0, 2 * kPi / 3));
  // class representatives: identity, transposition (3 elements), 3-cycle (2 elements)
  const std::vector<std::vector<cd>> eig{{1.0, 1.0}, {1.0, -1.0}, {w, std::conj(w)}};
  const std::vector<double> size{1, 3, 2};
  const std::vector<std::vector<double>> chi{{1, 1, 1}, {1, -1, 1}, {2, 0, -1}};
  auto weight_trace = [&](int cls, int deg, int M) -> cd {
    if (deg < 0) return 0.0;
    const int off = deg;
    // dp[d][M + off]
    std::vector<std::vector<cd>> dp(deg + 1, std::vector<cd>(2 * deg + 1, 0.0));
    dp[0][off] = 1.0;
    for (int m = -1; m <= 1; ++m)
      for (cd e : eig[cls])
        for (int d = 1; d <= deg; ++d)  // unbounded knapsack over one variable
          for (int k = 0; k <= 2 * deg; ++k) {
            const int kp = k - m;
            if (kp < 0 || kp > 2 * deg) continue;
            dp[d][k] += e * dp[d - 1][kp];
          }
    if (std::abs(M) > deg) return 0.0;
    return dp[deg][M + off];
  };
  cd s = 0.0;
  for (int cls = 0; cls < 3; ++cls) {
    auto W = [&](int M) { return weight_trace(cls, lam, M) - weight_trace(cls, lam - 2, M); };
    s += size[cls] * chi[irrep][cls] * (W(N) - W(N + 1));
  }
  return static_cast<int>(std::lround(s.real() / 6.0));
}

}  // namespace oracle
