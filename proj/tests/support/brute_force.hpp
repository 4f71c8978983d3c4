#pragma once
// Direct numerical evaluation of lab-frame matrix elements between ion
// channels coupled to a p electron: theta, phi and the three Euler angles are
// integrated on their own grids, the hyperradius through the DVR coefficients.

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "trimqdt/angular.hpp"
#include "trimqdt/bspline.hpp"
#include "trimqdt/frametrans.hpp"
#include "trimqdt/ionbasis.hpp"

namespace oracle {

struct BruteGrid {
  int theta_per_interval = 7;
  int n_phi = 24;
  int n_euler = 8;  // alpha and gamma trapezoid points
  int n_beta = 8;   // Gauss-Legendre points in cos(beta)
};

inline Eigen::MatrixXcd brute_force_lab(const trimqdt::ft::MuFunction& mu,
                                        const std::vector<trimqdt::ft::IonChannelState>& states, int l,
                                        int N, int m, const BruteGrid& bg = {}) {
  using cd = std::complex<double>;
  namespace ang = trimqdt::angular;
  const int ns = static_cast<int>(states.size());
  const auto& ref = *states.front().sol;
  const auto& opt = ref.angular;
  trimqdt::SplineBasis spl(opt.n_spline, opt.order, 0.0, 0.5 * kPi);

  // theta nodes on every knot interval
  std::vector<double> th, thw;
  const auto& kn = spl.knots();
  for (size_t k = 0; k + 1 < kn.size(); ++k) {
    if (kn[k + 1] <= kn[k]) continue;
    auto r = gauss_legendre(bg.theta_per_interval, kn[k], kn[k + 1]);
    for (size_t i = 0; i < r.x.size(); ++i) {
      th.push_back(r.x[i]);
      thw.push_back(r.w[i] * std::sin(2 * r.x[i]));
    }
  }
  auto beta = gauss_legendre(bg.n_beta, -1.0, 1.0);
  std::vector<ang::EulerAngles> eul;
  std::vector<double> ew;
  const double dA = 2 * kPi / bg.n_euler;
  for (int a = 0; a < bg.n_euler; ++a)
    for (size_t b = 0; b < beta.x.size(); ++b)
      for (int c = 0; c < bg.n_euler; ++c) {
        eul.push_back({a * dA, std::acos(beta.x[b]), c * dA});
        ew.push_back(dA * dA * beta.w[b]);
      }
  const int nR = static_cast<int>(ref.grid.R.size());
  const int nE = static_cast<int>(eul.size());

  // radial-angular amplitudes x_s(R_n, theta) per state
  std::vector<std::vector<Eigen::MatrixXd>> y(ns);  // [state][n] (theta x label)
  for (int i = 0; i < ns; ++i) {
    const auto& sol = *states[i].sol;
    const auto& st = sol.states[states[i].index];
    const int nl = static_cast<int>(sol.labels.size()), nc = sol.svd.n_chan;
    for (int n = 0; n < nR; ++n) {
      const Eigen::VectorXd x = sol.embedding * (sol.channels[n].a * st.c.segment(n * nc, nc));
      Eigen::MatrixXd yy = Eigen::MatrixXd::Zero(th.size(), nl);
      for (size_t q = 0; q < th.size(); ++q)
        for (int j = 0; j < spl.count(); ++j) {
          const double u = spl.value(j, th[q]);
          if (u != 0.0) yy.row(q) += u * x.segment(j * nl, nl).transpose();
        }
      y[i].push_back(yy);
    }
  }

  // rotational factor of each state, per label and spin label g:
  // W[i][s][g+1][e][Lambda+l] = sum C(N+ m+ l lambda|N m) sum_terms phase e^{i m2 phi}... (phi kept apart)
  struct Piece {
    int s, g, twice_m2;
    std::vector<std::vector<cd>> w;  // [euler][Lambda + l]
  };
  std::vector<std::vector<Piece>> pieces(ns);
  for (int i = 0; i < ns; ++i) {
    const auto& sol = *states[i].sol;
    const int Np = sol.block.N;
    for (size_t s = 0; s < sol.labels.size(); ++s) {
      auto lab = sol.labels[s];
      lab.N = Np;
      for (const auto& t : trimqdt::ionbasis::expand(lab).terms) {
        Piece p{static_cast<int>(s), t.p.g, t.p.twice_m2, std::vector<std::vector<cd>>(nE, std::vector<cd>(2 * l + 1))};
        for (int e = 0; e < nE; ++e)
          for (int Lam = -l; Lam <= l; ++Lam) {
            cd v = 0.0;
            for (int lam = -l; lam <= l; ++lam) {
              const int mp = m - lam;
              if (std::abs(mp) > Np) continue;
              const double cg = ang::clebsch_gordan(Np, mp, l, lam, N, m);
              if (cg == 0.0) continue;
              v += cg * ang::rot_harmonic(Np, t.p.K, mp, eul[e]) * std::conj(ang::wigner_D(l, lam, Lam, eul[e]));
            }
            p.w[e][Lam + l] = t.phase * v;
          }
        pieces[i].push_back(std::move(p));
      }
    }
  }

  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(ns, ns);
  const int L = 2 * l + 1;
  for (int n = 0; n < nR; ++n)
    for (size_t q = 0; q < th.size(); ++q)
      for (int k = 0; k < bg.n_phi; ++k) {
        const double phi = 2 * kPi * k / bg.n_phi;
        const Eigen::MatrixXcd mu_l = trimqdt::ft::to_lambda_order(mu({ref.grid.R[n], th[q], phi}));
        const double wv = thw[q] / bg.n_phi;
        // amplitudes A[i][g][e][Lambda]
        std::vector<std::vector<Eigen::MatrixXcd>> A(ns, std::vector<Eigen::MatrixXcd>(3, Eigen::MatrixXcd::Zero(nE, L)));
        for (int i = 0; i < ns; ++i)
          for (const auto& p : pieces[i]) {
            const double amp = y[i][n](q, p.s);
            if (amp == 0.0) continue;
            const cd f = amp * std::polar(1.0, 0.5 * p.twice_m2 * phi);
            for (int e = 0; e < nE; ++e)
              for (int a = 0; a < L; ++a) A[i][p.g + 1](e, a) += f * p.w[e][a];
          }
        for (int g = 0; g < 3; ++g)
          for (int i = 0; i < ns; ++i)
            for (int j = 0; j < ns; ++j) {
              cd s = 0.0;
              for (int e = 0; e < nE; ++e) s += ew[e] * (A[i][g].row(e).conjugate() * mu_l * A[j][g].row(e).transpose())(0, 0);
              M(i, j) += wv * s;
            }
      }
  return M;
}

}  // namespace oracle
