#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace trimqdt::angular {

/// Euler angles (alpha, beta, gamma), z-y-z convention.
struct EulerAngles {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};

/// Angular-momentum label stored as twice its value so half-integers are exact.
struct AngMomLabel {
  int twice_j = 0;
  int twice_m = 0;
  static AngMomLabel from(double j, double m);
  bool valid() const;
  double j() const { return 0.5 * twice_j; }
  double m() const { return 0.5 * twice_m; }
};

/// <j1 m1 j2 m2 | J M> with every argument given as twice its value.
/// Condon-Shortley phases. Invalid couplings give 0.
double clebsch_gordan_x2(int tj1, int tm1, int tj2, int tm2, int tJ, int tM);

/// Convenience overload taking (half-)integer values.
double clebsch_gordan(double j1, double m1, double j2, double m2, double J, double M);

/// Wigner small-d d^j_{m'm}(beta), integer or half-integer j (twice-valued).
double wigner_d_x2(int tj, int tmp, int tm, double beta);
double wigner_d(int j, int mp, int m, double beta);

/// D^j_{m'm}(alpha,beta,gamma) = exp(-i m' alpha) d^j_{m'm}(beta) exp(-i m gamma).
std::complex<double> wigner_D(int j, int mp, int m, const EulerAngles& e);

/// Normalized rotational harmonic sqrt((2N+1)/8pi^2) [D^N_{mK}]^*.
std::complex<double> rot_harmonic(int N, int K, int m, const EulerAngles& e);

struct ProductTerm {
  int N = 0;
  int K = 0;            ///< K+ + Lambda
  int m = 0;            ///< m+ + lambda
  double c_body = 0.0;  ///< C^{N,K}_{N+,K+; l,Lambda}
  double c_lab = 0.0;   ///< C^{N,m}_{N+,m+; l,lambda}
};

/// Clebsch-Gordan series of D^{N+}_{m+K+} D^l_{lambda Lambda}.
std::vector<ProductTerm> product_expand(int Nplus, int mplus, int Kplus, int l, int lambda,
                                        int Lambda);

/// Body-frame tilde-coupling coefficient (-1)^(l-Lambda) C^{N+ K+}_{l,-Lambda; N, K+ + Lambda}.
double tilde_coefficient(int Nplus, int Kplus, int l, int Lambda, int N);

/// Matrices of Jx^2, Jy^2 in the |N K> basis, K = -N..N (index K+N).
/// Off-diagonal (K, K+-2) elements of Jx^2 are positive.
Eigen::MatrixXd jx2_matrix(int N);
Eigen::MatrixXd jy2_matrix(int N);

}  // namespace trimqdt::angular
