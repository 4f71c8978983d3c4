#pragma once

#include <vector>

#include <Eigen/Dense>

#include "trimqdt/hyperangular.hpp"

namespace trimqdt::ion {

/// Gauss-Lobatto-Legendre DVR on [R_min, R_max] with the end points removed
/// (the radial function vanishes there).
struct DvrGrid {
  std::vector<double> R;  ///< interior abscissas
  std::vector<double> w;  ///< matching quadrature weights
  Eigen::MatrixXd T;      ///< -1/(2 mu) d^2/dR^2
  double mass = 0.0;
};

/// n_points interior abscissas (n_points + 2 Lobatto nodes in total).
DvrGrid make_dvr(int n_points, double R_min, double R_max, double mass);

struct SvdResult {
  Eigen::VectorXd energies;  ///< ascending, hartree
  Eigen::MatrixXd c;         ///< column i: c^i_{n nu}, index n * n_chan + nu
  int n_chan = 0;
  bool singular_overlap = false;
  double min_neighbour_sv = 1.0;  ///< smallest singular value of adjacent-point overlaps
};

/// Slow-variable-discretization eigenproblem
/// sum T_nn' O_{n nu, n' mu} c + U_nu(R_n) c = E c, O = a_n^T S a_n'.
SvdResult svd_solve(const DvrGrid& grid, const std::vector<ChannelSet>& channels,
                    const Eigen::MatrixXd& S, int n_states = -1);

/// Reference: full product-grid problem sum T_nn' S + delta_nn' H(R_n) = E (I x S)
/// in the untransformed basis. Returns the lowest n_states energies.
Eigen::VectorXd brute_force_product_grid(const DvrGrid& grid, const std::vector<Eigen::MatrixXd>& H,
                                         const Eigen::MatrixXd& S, int n_states);

}  // namespace trimqdt::ion
