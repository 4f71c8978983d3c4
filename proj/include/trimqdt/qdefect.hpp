#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "trimqdt/geom.hpp"

namespace trimqdt::qd {

/// Taylor parameters of the p-wave body-frame quantum-defect surface.
struct MuSurfaceParams {
  double mu00_eq = 0.0683;
  double mu11_eq = 0.4069;
  double shift00 = 0.0043;
  double shift11 = 0.0021;
  double a1 = 0.0, a2 = 0.0, a3 = 0.0, a4 = 0.0;
  double b1 = 0.0, b2 = 0.0, b3 = 0.0;
  double delta = 0.0;
  double lambda_jt = 0.0;
};

/// Which body frame the off-diagonal element refers to. Body: the
/// hyperspherical body frame, mu_{1,-1} = lambda rho. Rotated: the frame turned
/// by phi/2, where the element reads lambda rho exp(+-i phi).
enum class PhaseConvention { Body, Rotated };

/// 3x3 matrix over Lambda in the order (0, +1, -1).
using MuMatrix = Eigen::Matrix3cd;

/// Row/column of Lambda in MuMatrix.
int lambda_index(int Lambda);
/// Lambda of a row/column.
int index_lambda(int i);

/// Body-frame defect matrix at symmetry coordinates q, in the requested frame.
MuMatrix mu_body(const geom::SymCoords& q, const MuSurfaceParams& p,
                 PhaseConvention conv = PhaseConvention::Body);

/// n - (mu11 + |mu1-1|), n - (mu11 - |mu1-1|), ascending.
std::pair<double, double> effective_nu(int n, const MuMatrix& mu);

/// Same pair from a direct diagonalization of the Lambda = +-1 block.
std::pair<double, double> effective_nu_eigen(int n, const MuMatrix& mu);

/// K~_{LL'} = K_{LL'} exp(i (L - L') phi / 2). `lambdas` gives Lambda of each row.
Eigen::MatrixXcd phase_rotate(const Eigen::MatrixXcd& K, double phi, const std::vector<int>& lambdas);
MuMatrix phase_rotate(const MuMatrix& K, double phi);

struct KFromMu {
  Eigen::MatrixXd K;
  Eigen::VectorXd defects;  ///< eigen-defects
  Eigen::MatrixXd U;        ///< eigenvectors (columns)
  bool pole = false;        ///< an eigen-defect sits on a half-integer
};

/// K = U tan(pi mu_e) U^T for a real symmetric defect matrix.
KFromMu k_from_mu(const Eigen::MatrixXd& mu, double pole_tol = 1e-9);

/// Hermitian variant: K = U tan(pi mu_e) U^dagger.
Eigen::MatrixXcd k_from_mu(const Eigen::MatrixXcd& mu, bool* pole = nullptr, double pole_tol = 1e-9);

/// Inverse map: mu = U arctan(k_e)/pi U^T with eigen-defects in [0, 1).
Eigen::MatrixXd mu_from_k(const Eigen::MatrixXd& K);

/// A quantum defect split into its fraction in [0,1) and the integer branch.
struct Defect {
  double frac = 0.0;
  int branch = 0;
  double value() const { return frac + branch; }
};
Defect split_defect(double mu);

/// "key = value" parameter file; every field must be present.
MuSurfaceParams load_params(const std::string& path);
std::string format_params(const MuSurfaceParams& p);

struct FitSample {
  double Q1 = 0.0, rho = 0.0, phi = 0.0;
  double nu1 = 0.0, nu2 = 0.0;
  bool has_nu0 = false;
  double nu0 = 0.0;
};

struct FitResult {
  MuSurfaceParams params;
  double rms = 0.0;  ///< over all fitted effective quantum numbers
  int n_values = 0;
  bool fitted_mu00 = false;
};

/// Rows "Q1 rho phi nu1 nu2 [nu0]".
std::vector<FitSample> load_samples(const std::string& path);

/// Least-squares fit of the Taylor coefficients. The equilibrium values come
/// from the fit intercepts; shifts are copied from `base`.
FitResult fit_defects(const std::vector<FitSample>& samples, int n, const MuSurfaceParams& base = {});

}  // namespace trimqdt::qd
