#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "trimqdt/hyperangular.hpp"
#include "trimqdt/svd.hpp"

namespace trimqdt::ion {

/// Ion rovibrational eigenstate of one symmetry block.
struct RovibState {
  double energy = 0.0;  ///< hartree
  Block block;
  Eigen::VectorXd c;    ///< SVD coefficients, index n * n_chan + nu

  /// Weight of each (G, |l2|) pair in the state.
  std::map<std::pair<int, int>, double> gl_weights;

  // spectroscopic labels (heuristic)
  int G = -1;
  int l2 = -1;  ///< |l2|
  int v1 = -1;
  int v2 = -1;
  char ul = 0;  ///< 'u', 'l' or 0
  bool ambiguous = true;
  std::string note;

  double energy_cm() const;
  /// "(N,G){v1,v2^l2}" plus u/l, or "(N,G){?}" when unassigned.
  std::string label() const;
};

struct IonSolverOptions {
  HyperangularOptions angular;
  int dvr_points = 40;
  double R_min = 1.0;
  double R_max = 12.0;
  int n_chan = 10;
  int n_states = 10;  ///< states kept per block
  int threads = 1;
};

struct BlockSolution {
  Block block;
  std::vector<RovibState> states;
  DvrGrid grid;
  std::vector<ChannelSet> channels;
  SvdResult svd;
  // enough of the hyperangular problem to rebuild state amplitudes
  HyperangularOptions angular;
  std::vector<ionbasis::SymBasisFunction> labels;
  Eigen::SparseMatrix<double> embedding;
};

/// Channels on the DVR grid, SVD solve, and (G, |l2|) weights for one block.
BlockSolution solve_block(const Block& block, const PotentialSurface* V, const IonSolverOptions& opt);

/// Assigns (N,G){v1,v2^l2}(u|l) labels. Dominant (G,|l2|) weight below
/// `purity` leaves the state flagged ambiguous; only the lowest members of each
/// (N, G, |l2|) group receive band labels, higher ones are flagged.
void assign_labels(std::vector<RovibState>& states, double purity = 0.5);

}  // namespace trimqdt::ion
