#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "trimqdt/angular.hpp"

using namespace trimqdt::angular;
using cd = std::complex<double>;

namespace {
EulerAngles random_euler(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return {2 * oracle::kPi * u(rng), oracle::kPi * u(rng), 2 * oracle::kPi * u(rng)};
}
}  // namespace

TEST_CASE("clebsch-gordan basic values") {
  for (int j = 0; j <= 4; ++j)
    for (int m = -j; m <= j; ++m) CHECK(clebsch_gordan(j, m, 0, 0, j, m) == doctest::Approx(1.0));
  CHECK(clebsch_gordan(1, 0, 1, 0, 2, 0) == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-15));
  CHECK(clebsch_gordan(1, 0, 1, 0, 1, 0) == 0.0);
  CHECK(clebsch_gordan(1, 1, 1, 0, 2, 0) == 0.0);   // M mismatch
  CHECK(clebsch_gordan(1, 0, 1, 0, 3, 0) == 0.0);   // triangle
  CHECK(clebsch_gordan_x2(1, 1, 1, -1, 0, 0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
}

TEST_CASE("clebsch-gordan against lowering-operator construction") {
  double worst = 0.0;
  for (int j1 = 0; j1 <= 4; ++j1)
    for (int j2 = 0; j2 <= 3; ++j2) {
      oracle::CGTable tab(j1, j2);
      for (int J = std::abs(j1 - j2); J <= j1 + j2; ++J)
        for (int m1 = -j1; m1 <= j1; ++m1)
          for (int m2 = -j2; m2 <= j2; ++m2) {
            const double a = clebsch_gordan(j1, m1, j2, m2, J, m1 + m2);
            const double b = std::abs(m1 + m2) <= J ? tab(m1, m2, J) : 0.0;
            worst = std::max(worst, std::abs(a - b));
          }
    }
  CHECK(worst < 1e-13);
}

TEST_CASE("clebsch-gordan orthogonality and exchange symmetry") {
  const int j1 = 2, j2 = 2;
  for (int J = 0; J <= 4; ++J)
    for (int Jp = 0; Jp <= 4; ++Jp)
      for (int M = -std::min(J, Jp); M <= std::min(J, Jp); ++M) {
        double s = 0.0;
        for (int m1 = -j1; m1 <= j1; ++m1) {
          const int m2 = M - m1;
          if (std::abs(m2) > j2) continue;
          s += clebsch_gordan(j1, m1, j2, m2, J, M) * clebsch_gordan(j1, m1, j2, m2, Jp, M);
        }
        CHECK(s == doctest::Approx(J == Jp ? 1.0 : 0.0).epsilon(1e-14));
      }
  for (int a = 0; a <= 3; ++a)
    for (int b = 0; b <= 3; ++b)
      for (int J = std::abs(a - b); J <= a + b; ++J)
        for (int ma = -a; ma <= a; ++ma)
          for (int mb = -b; mb <= b; ++mb) {
            const double sgn = ((a + b - J) % 2) ? -1.0 : 1.0;
            CHECK(clebsch_gordan(a, ma, b, mb, J, ma + mb) ==
                  doctest::Approx(sgn * clebsch_gordan(b, mb, a, ma, J, ma + mb)).epsilon(1e-14));
          }
}

TEST_CASE("half-integer coupling") {
  // 1/2 x 1/2 triplet and singlet
  CHECK(clebsch_gordan(0.5, 0.5, 0.5, -0.5, 1, 0) == doctest::Approx(std::sqrt(0.5)));
  CHECK(clebsch_gordan(0.5, -0.5, 0.5, 0.5, 0, 0) == doctest::Approx(-std::sqrt(0.5)));
  CHECK(wigner_d_x2(1, 1, 1, 0.7) == doctest::Approx(std::cos(0.35)).epsilon(1e-15));
  CHECK(wigner_d_x2(1, 1, -1, 0.7) == doctest::Approx(-std::sin(0.35)).epsilon(1e-15));
}

TEST_CASE("wigner d against exponentiated J_y") {
  double worst = 0.0;
  for (int j = 0; j <= 10; ++j)
    for (double beta : {0.0, 0.3, 1.2, 2.9}) {
      auto ref = oracle::small_d(j, beta);
      for (int mp = -j; mp <= j; ++mp)
        for (int m = -j; m <= j; ++m)
          worst = std::max(worst, std::abs(wigner_d(j, mp, m, beta) - ref(mp + j, m + j)));
    }
  CHECK(worst < 1e-11);
}

TEST_CASE("rotational harmonics normalisation") {
  const EulerAngles e{0.4, 1.1, 2.5};
  CHECK(std::abs(rot_harmonic(0, 0, 0, e) - cd(1.0 / std::sqrt(8 * oracle::kPi * oracle::kPi))) < 1e-15);

  // alpha, gamma: trapezoid exact for trig polynomials; beta: Gauss-Legendre in cos(beta)
  const int na = 12;
  auto gl = oracle::gauss_legendre(12, -1.0, 1.0);
  struct Q { int N, K, m; };
  const std::vector<Q> set{{2, 1, -1}, {1, 0, 1}, {3, -2, 2}};
  for (auto a : set)
    for (auto b : set) {
      cd s = 0.0;
      for (int i = 0; i < na; ++i)
        for (int k = 0; k < na; ++k)
          for (size_t q = 0; q < gl.x.size(); ++q) {
            EulerAngles x{2 * oracle::kPi * i / na, std::acos(gl.x[q]), 2 * oracle::kPi * k / na};
            s += std::conj(rot_harmonic(a.N, a.K, a.m, x)) * rot_harmonic(b.N, b.K, b.m, x) *
                 gl.w[q] * std::pow(2 * oracle::kPi / na, 2);
          }
      const bool same = a.N == b.N && a.K == b.K && a.m == b.m;
      CHECK(std::abs(s - cd(same ? 1.0 : 0.0)) < 1e-10);
    }
}

TEST_CASE("product expansion") {
  auto t0 = product_expand(3, 1, -2, 0, 0, 0);
  REQUIRE(t0.size() == 1);
  CHECK(t0[0].N == 3);
  CHECK(t0[0].c_body * t0[0].c_lab == doctest::Approx(1.0));

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    auto e = random_euler(rng);
    const int Np = 1, l = 1;
    for (int mp = -Np; mp <= Np; ++mp)
      for (int Kp = -Np; Kp <= Np; ++Kp)
        for (int lam = -l; lam <= l; ++lam)
          for (int Lam = -l; Lam <= l; ++Lam) {
            const cd lhs = wigner_D(Np, mp, Kp, e) * wigner_D(l, lam, Lam, e);
            cd rhs = 0.0;
            for (auto& t : product_expand(Np, mp, Kp, l, lam, Lam))
              rhs += t.c_body * t.c_lab * wigner_D(t.N, t.m, t.K, e);
            CHECK(std::abs(lhs - rhs) < 1e-12);
          }
  }
}

// Lab-coupled ion rotor times electron partial wave, re-expanded on body-frame
// partial waves: the coefficient of Y_{l Lambda}(body) must equal
// tilde_coefficient * R^N_{K+ + Lambda, m}.
TEST_CASE("tilde coupling against brute-force recoupling") {
  std::mt19937_64 rng(9);
  double worst = 0.0;
  for (int trial = 0; trial < 4; ++trial) {
    auto e = random_euler(rng);
    for (int l = 0; l <= 2; ++l)
      for (int Np = 0; Np <= 4; ++Np)
        for (int N = std::abs(Np - l); N <= Np + l; ++N)
          for (int Kp = -Np; Kp <= Np; ++Kp)
            for (int m = -N; m <= N; ++m)
              for (int Lam = -l; Lam <= l; ++Lam) {
                cd a = 0.0;
                for (int lam = -l; lam <= l; ++lam) {
                  const int mp = m - lam;
                  if (std::abs(mp) > Np) continue;
                  a += clebsch_gordan(Np, mp, l, lam, N, m) * rot_harmonic(Np, Kp, mp, e) *
                       std::conj(wigner_D(l, lam, Lam, e));
                }
                const int K = Kp + Lam;
                const cd b = std::abs(K) <= N
                                 ? tilde_coefficient(Np, Kp, l, Lam, N) * rot_harmonic(N, K, m, e)
                                 : cd(0.0);
                worst = std::max(worst, std::abs(a - b));
              }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("Jx^2 + Jy^2 + Jz^2 = N(N+1)") {
  for (int N = 0; N <= 5; ++N) {
    Eigen::MatrixXd J2 = jx2_matrix(N) + jy2_matrix(N);
    for (int K = -N; K <= N; ++K) J2(K + N, K + N) += K * K;
    CHECK((J2 - N * (N + 1) * Eigen::MatrixXd::Identity(2 * N + 1, 2 * N + 1)).cwiseAbs().maxCoeff() < 1e-13);
    if (N >= 1) CHECK(jx2_matrix(N)(0, 2) > 0.0);
  }
}
