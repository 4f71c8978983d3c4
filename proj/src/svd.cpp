#include "trimqdt/svd.hpp"

#include <cmath>
#include <stdexcept>

#include "trimqdt/quadrature.hpp"

namespace trimqdt::ion {

DvrGrid make_dvr(int n_points, double R_min, double R_max, double mass) {
  if (n_points < 1) throw std::invalid_argument("make_dvr: need at least one point");
  if (!(R_max > R_min) || !(R_min >= 0.0)) throw std::invalid_argument("make_dvr: bad interval");
  if (!(mass > 0.0)) throw std::invalid_argument("make_dvr: mass must be positive");
  const int M = n_points + 1;  // Lobatto order
  const auto rule = gauss_lobatto(M);
  const double half = 0.5 * (R_max - R_min);
  // derivative of Lagrange polynomial i at node k (reference interval)
  std::vector<double> P(M + 1);
  for (int i = 0; i <= M; ++i) {
    double dp = 0.0;
    legendre(M, rule.x[i], P[i], dp);
  }
  Eigen::MatrixXd D(M + 1, M + 1);
  for (int k = 0; k <= M; ++k)
    for (int i = 0; i <= M; ++i) {
      if (k != i) {
        D(k, i) = P[k] / (P[i] * (rule.x[k] - rule.x[i]));
      } else if (k == 0) {
        D(k, i) = -0.25 * M * (M + 1.0);
      } else if (k == M) {
        D(k, i) = 0.25 * M * (M + 1.0);
      } else {
        D(k, i) = 0.0;
      }
    }
  DvrGrid g;
  g.mass = mass;
  g.R.resize(n_points);
  g.w.resize(n_points);
  for (int i = 1; i < M; ++i) {
    g.R[i - 1] = R_min + half * (rule.x[i] + 1.0);
    g.w[i - 1] = half * rule.w[i];
  }
  g.T.resize(n_points, n_points);
  for (int i = 1; i < M; ++i)
    for (int j = 1; j < M; ++j) {
      double s = 0.0;
      for (int k = 0; k <= M; ++k) s += rule.w[k] * D(k, i) * D(k, j);
      // d/dR = d/dx / half, dR = half dx, basis normalized by sqrt(w_i half)
      g.T(i - 1, j - 1) = s / (2.0 * mass * half * half * std::sqrt(rule.w[i] * rule.w[j]));
    }
  return g;
}

SvdResult svd_solve(const DvrGrid& grid, const std::vector<ChannelSet>& channels,
                    const Eigen::MatrixXd& S, int n_states) {
  const int nR = static_cast<int>(grid.R.size());
  if (static_cast<int>(channels.size()) != nR)
    throw std::invalid_argument("svd_solve: one channel set per abscissa required");
  const int nc = static_cast<int>(channels.front().a.cols());
  for (const auto& c : channels)
    if (c.a.cols() != nc || c.U.size() != nc) throw std::invalid_argument("svd_solve: ragged channel sets");
  const int dim = nR * nc;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
  SvdResult r;
  r.n_chan = nc;
  std::vector<Eigen::MatrixXd> Sa(nR);
  for (int n = 0; n < nR; ++n) Sa[n] = S * channels[n].a;
  for (int n = 0; n < nR; ++n) {
    for (int np = n; np < nR; ++np) {
      const Eigen::MatrixXd O = (n == np) ? Eigen::MatrixXd::Identity(nc, nc)
                                          : Eigen::MatrixXd(channels[n].a.transpose() * Sa[np]);
      if (np == n + 1) {
        Eigen::JacobiSVD<Eigen::MatrixXd> sv(O);
        r.min_neighbour_sv = std::min(r.min_neighbour_sv, sv.singularValues().minCoeff());
      }
      H.block(n * nc, np * nc, nc, nc) = grid.T(n, np) * O;
      if (np != n) H.block(np * nc, n * nc, nc, nc) = grid.T(np, n) * O.transpose();
    }
    for (int k = 0; k < nc; ++k) H(n * nc + k, n * nc + k) += channels[n].U(k);
  }
  r.singular_overlap = r.min_neighbour_sv < 1e-3;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  if (es.info() != Eigen::Success) throw std::runtime_error("svd_solve: eigensolver failed");
  const int ns = (n_states < 0) ? dim : std::min(n_states, dim);
  r.energies = es.eigenvalues().head(ns);
  r.c = es.eigenvectors().leftCols(ns);
  return r;
}

Eigen::VectorXd brute_force_product_grid(const DvrGrid& grid, const std::vector<Eigen::MatrixXd>& H,
                                         const Eigen::MatrixXd& S, int n_states) {
  const int nR = static_cast<int>(grid.R.size());
  const int nb = static_cast<int>(S.rows());
  const int dim = nR * nb;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dim, dim), B = Eigen::MatrixXd::Zero(dim, dim);
  for (int n = 0; n < nR; ++n) {
    for (int np = 0; np < nR; ++np) A.block(n * nb, np * nb, nb, nb) = grid.T(n, np) * S;
    A.block(n * nb, n * nb, nb, nb) += H[n];
    B.block(n * nb, n * nb, nb, nb) = S;
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, B);
  if (es.info() != Eigen::Success) throw std::runtime_error("brute force: eigensolver failed");
  return es.eigenvalues().head(std::min(n_states, dim));
}

}  // namespace trimqdt::ion
