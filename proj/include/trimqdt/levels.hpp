#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace trimqdt::mqdt {

/// nu_i = 1 / sqrt(2 (E_i - E)); throws when E is not below every threshold.
Eigen::VectorXd effective_nu(double E, const Eigen::VectorXd& thresholds);

/// det[sin(pi nu) + cos(pi nu) K], the pole-free form of det[tan(pi nu) + K].
double det_function(double E, const Eigen::MatrixXd& K, const Eigen::VectorXd& thresholds);

struct LevelRecord {
  double E = 0.0;                ///< hartree
  int dominant = -1;             ///< channel index
  std::vector<double> nu;        ///< effective quantum number per channel
  std::vector<double> weights;   ///< channel fractions, sum 1
  int multiplicity = 1;
  double E_cm() const;
};

struct FindOptions {
  double nu_step = 0.005;     ///< scan step in nu of the lowest threshold
  double tol = 1e-12;         ///< hartree
  double degenerate_tol = 1e-7;  ///< smallest singular value accepted at a touching root
  int threads = 1;
};

struct FindResult {
  std::vector<LevelRecord> levels;  ///< ascending energy
  int count_fine = 0;               ///< roots found at half the scan step
  bool stable = true;               ///< both scans agree
};

/// All roots with E in [E_lo, E_hi]; the window must lie below the lowest threshold.
FindResult find_levels(const Eigen::MatrixXd& K, const Eigen::VectorXd& thresholds, double E_lo, double E_hi,
                       const FindOptions& opt = {});

/// Energy window for nu of the lowest threshold in [nu_lo, nu_hi].
std::pair<double, double> nu_window(const Eigen::VectorXd& thresholds, double nu_lo, double nu_hi);

}  // namespace trimqdt::mqdt
