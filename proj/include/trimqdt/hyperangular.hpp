#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "trimqdt/bspline.hpp"
#include "trimqdt/ionbasis.hpp"
#include "trimqdt/potential.hpp"

namespace trimqdt::ion {

/// Form of the phi-Coriolis operator. Standard: (i d/dphi - cos(theta) Jz/2)^2.
/// Literal: (i d/dphi - cos(Jz/2))^2, kept for comparison only.
enum class CoriolisForm { Standard, Literal };

/// Symmetry block: total ion angular momentum, spin class (0 ortho, 1 para), parity.
struct Block {
  int N = 0;
  int spin = 0;
  int parity = 1;
  bool operator==(const Block&) const = default;
};

struct HyperangularOptions {
  int n_spline = 60;
  int order = 5;
  int twice_m2_max = 24;  ///< |m2| <= 12
  int quad_points = 8;    ///< Gauss points per knot interval
  int n_phi = 96;         ///< trapezoid points for the phi Fourier components
  CoriolisForm coriolis = CoriolisForm::Standard;
  double mass = 0.0;      ///< three-body reduced mass; 0 selects m_H/sqrt(3)
  /// Also include the totally symmetric m2 = K = g = 0 function in even-N ortho
  /// blocks. Not an allowed fermion state; its lowest level serves as the
  /// energy zero (the hypothetical N = 0 ground level).
  bool include_reference = false;
};

/// Adiabatic channels at one hyperradius; columns of `a` are S-normalized.
struct ChannelSet {
  double R = 0.0;
  Eigen::VectorXd U;  ///< ascending, hartree
  Eigen::MatrixXd a;
};

class HyperangularProblem {
 public:
  HyperangularProblem(const Block& block, const HyperangularOptions& opt = {});

  const Block& block() const { return block_; }
  const HyperangularOptions& options() const { return opt_; }
  double mass() const { return mass_; }
  const SplineBasis& splines() const { return spl_; }
  const SplineQuadrature& quadrature() const { return quad_; }

  /// Angular labels (one per symmetry-adapted function, spline index 0).
  const std::vector<ionbasis::SymBasisFunction>& labels() const { return labels_; }
  int n_labels() const { return static_cast<int>(labels_.size()); }
  /// Dimension of the reduced (boundary-adapted) basis.
  int dim() const { return static_cast<int>(P_.cols()); }

  /// Map from the reduced basis to the full (spline, label) product basis,
  /// full index = j * n_labels() + s.
  const Eigen::SparseMatrix<double>& embedding() const { return P_; }

  const Eigen::MatrixXd& overlap() const { return S_; }
  /// 2 mu R^2 times the kinetic part including 15/(8 mu R^2); R-independent.
  const Eigen::MatrixXd& kinetic_reduced() const { return Kr_; }

  Eigen::MatrixXd potential_matrix(double R, const PotentialSurface& V) const;
  /// Full hyperangular matrix at R. V may be null (free case).
  Eigen::MatrixXd matrix(double R, const PotentialSurface* V) const;

  /// Lowest n_chan eigenpairs; eigenvector phase fixed by largest component positive.
  ChannelSet solve(double R, const PotentialSurface* V, int n_chan) const;

  /// Weight of each label in a state vector (sums to its S-norm).
  std::vector<double> label_weights(const Eigen::VectorXd& a) const;

 private:
  Block block_;
  HyperangularOptions opt_;
  double mass_;
  SplineBasis spl_;
  SplineQuadrature quad_;
  std::vector<ionbasis::SymBasisFunction> labels_;
  Eigen::SparseMatrix<double> P_;
  Eigen::MatrixXd S_, Kr_;
  Eigen::MatrixXd spline_overlap_;
  std::vector<Eigen::MatrixXd> vcoef_;  // label-space coefficients per |Delta m2|
  std::vector<int> deltas_;

  Eigen::MatrixXd spline_matrix(const std::function<double(double)>& weight, int skip_last = 0) const;
};

/// Solve at every hyperradius (in parallel when threads > 1) and align
/// eigenvector signs between neighbouring points by overlap.
std::vector<ChannelSet> solve_on_grid(const HyperangularProblem& prob, const std::vector<double>& R,
                                      const PotentialSurface* V, int n_chan, int threads = 1);

/// Symmetry blocks that contain at least one basis function.
std::vector<Block> nonempty_blocks(int N_max, int twice_m2_max);

}  // namespace trimqdt::ion
