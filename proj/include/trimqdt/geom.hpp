#pragma once

#include <array>

namespace trimqdt::geom {

/// Hyperspherical coordinates of three identical particles.
/// R in bohr, theta in [0, pi/2], phi in [0, 2pi).
struct HyperPoint {
  double R = 1.0;
  double theta = 0.0;
  double phi = 0.0;
};

struct InterparticleDistances {
  double r12 = 0.0;
  double r23 = 0.0;
  double r31 = 0.0;
};

/// Jahn-Teller symmetry coordinates (dimensionless) and their polar form.
struct SymCoords {
  double Q1 = 0.0;
  double Qx = 0.0;
  double Qy = 0.0;
  double rho = 0.0;
  double phi_p = 0.0;  ///< pseudorotation angle
};

struct GeomConstants {
  double f = 2.639255;       ///< bohr^-1
  double r_equi = 1.6504;    ///< bohr
  double m = 0.0;            ///< particle mass [m_e]
  GeomConstants();
  double R0() const;         ///< equilibrium hyperradius, 3^(1/4) r_equi
  double mu3b() const;       ///< three-body reduced mass m/sqrt(3)
};

/// Normalization of the body-frame cartesian map. Determined by requiring that
/// the pairwise distances of nuclear_positions() reproduce to_interparticle().
extern const double kBodyFrameD;

using Cartesian = std::array<double, 3>;
using NuclearPositions = std::array<Cartesian, 3>;

bool is_valid(const HyperPoint& p);

InterparticleDistances to_interparticle(const HyperPoint& p);

/// Inverse of to_interparticle. Returns the representative with phi in [0, 2pi).
/// Throws std::invalid_argument if the distances violate the triangle inequality.
HyperPoint to_hyperspherical(const InterparticleDistances& d);

/// Index convention: dr1 = r23 - r_equi, dr2 = r31 - r_equi, dr3 = r12 - r_equi.
SymCoords to_sym_coords(const InterparticleDistances& d, const GeomConstants& c = {});

NuclearPositions nuclear_positions(const HyperPoint& p);

struct SmallThetaResult {
  SymCoords q;
  bool warning = false;  ///< theta above the validity threshold
};

/// Linearized (small-theta) map from hyperspherical to symmetry coordinates.
/// Only Q1, rho and phi_p are meaningful; Qx/Qy are filled from the polar form.
SmallThetaResult small_theta_map(const HyperPoint& p, const GeomConstants& c = {},
                                 double theta_warn = 0.3);

}  // namespace trimqdt::geom
