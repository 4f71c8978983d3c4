#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trimqdt/geom.hpp"
#include "trimqdt/ionbasis.hpp"
#include "trimqdt/ionsolver.hpp"
#include "trimqdt/qdefect.hpp"

namespace trimqdt::ft {

/// One term of a lab-coupled function in the body frame:
/// coef * [vibrational primitive p] * R^N_{K m} * |l Lambda>, K = p.K + Lambda.
struct TildeTerm {
  ionbasis::Primitive p;
  int Lambda = 0;
  int K = 0;
  double coef = 0.0;
};

/// Couples the ion function b (N+ = b.N) with an l electron to total N.
/// Terms with a vanishing Clebsch-Gordan coefficient are dropped.
std::vector<TildeTerm> tilde_basis(const ionbasis::SymBasisFunction& b, int l, int N);

/// Rotational frame transformation at fixed K+: rows N+, columns Lambda.
struct RotFrame {
  std::vector<int> Nplus;
  std::vector<int> Lambda;
  Eigen::MatrixXd U;
};
/// Nplus_max < 0 keeps every N+ allowed by the triangle rule.
RotFrame rotational_frame(int N, int l, int Kplus, int Nplus_max = -1);

/// max |U^T U - 1|.
double unitarity_check(const Eigen::MatrixXd& U);

struct LabChannel {
  int Nplus = 0;
  int G = -1;          ///< K+ for ground-band channels
  std::string vib;     ///< ion label
  int l = 0;
  int N = 0;
  int m = 0;
  int spin = 0;        ///< 0 ortho, 1 para
  int parity = 1;      ///< K+ parity of the ion state
  double threshold = 0.0;  ///< hartree
  std::string label() const;
};

/// One lab-frame block; matrix is real symmetric over `channels`.
struct LabK {
  int N = 0;
  int spin = 0;
  int parity = 1;
  std::vector<LabChannel> channels;
  Eigen::MatrixXd K;
};

/// Groups channels by (N, spin, parity) and splits each group into connected
/// components of the coupling graph.
std::vector<LabK> split_blocks(const std::vector<LabChannel>& channels, const Eigen::MatrixXd& M,
                               double tol = 1e-14);

// ----- rotational-only route (vibrational ground state) -----

/// Ground-band ion function (N+, K+) with m2 = -K+/2; nullopt when Pauli-forbidden.
std::optional<ionbasis::SymBasisFunction> ground_band_function(int Nplus, int Kplus);

struct Threshold {
  int Nplus = 0;
  int G = 0;
  double energy = 0.0;  ///< hartree
};

/// Ground-band channels for total N and electron l. Missing thresholds throw.
std::vector<LabChannel> ground_band_channels(int N, int l, const std::vector<Threshold>& thr, int Nplus_max);

/// Body matrix indexed Lambda + l. Returns the full lab matrix over channels.
Eigen::MatrixXd lab_matrix_rotational(const Eigen::MatrixXcd& body, const std::vector<LabChannel>& channels,
                                      double* max_imag = nullptr);

/// Convenience: channels, transformation and block split in one call.
std::vector<LabK> transform_rotational_only(const Eigen::MatrixXcd& body, int l, int N,
                                            const std::vector<Threshold>& thr, int Nplus_max);

/// MuMatrix (order 0,+1,-1) to Lambda + 1 order.
Eigen::MatrixXcd to_lambda_order(const qd::MuMatrix& mu);

// ----- rovibrational route -----

/// An ion eigenstate used as a channel.
struct IonChannelState {
  const ion::BlockSolution* sol = nullptr;
  int index = 0;
  double threshold = 0.0;  ///< hartree
  std::string label;
  int G = -1;
};

using MuFunction = std::function<qd::MuMatrix(const geom::HyperPoint&)>;

/// mu at a hyperspherical point through the symmetry-coordinate map, returned
/// in the hyperspherical body frame whatever convention the parameters use.
MuFunction mu_surface_function(const qd::MuSurfaceParams& p,
                               qd::PhaseConvention conv = qd::PhaseConvention::Body,
                               const geom::GeomConstants& c = {});

struct RovibTransformOptions {
  int l = 1;
  int N = 0;
  int threads = 1;
};

struct RovibTransform {
  std::vector<LabChannel> channels;
  Eigen::MatrixXd M;      ///< full lab matrix over channels
  double max_imag = 0.0;  ///< largest discarded imaginary part
};

/// Double integral over vibrational coordinates (DVR nodes in R, spline
/// quadrature in theta, trapezoid in phi) of the body matrix between tilde
/// functions. All states must share one DVR grid and hyperangular options.
RovibTransform transform_mu(const MuFunction& mu, const std::vector<IonChannelState>& states,
                            const RovibTransformOptions& opt);

}  // namespace trimqdt::ft
