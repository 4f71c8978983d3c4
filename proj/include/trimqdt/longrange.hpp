#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace trimqdt::lr {

struct MultipoleParams {
  double Q2 = 0.0;
  double alpha_iso = 0.0;
  double gamma_aniso = 0.0;
};

/// Reads "Q2 = ...", "alpha = ...", "gamma = ..." (atomic units).
MultipoleParams load_multipoles(const std::string& path);
void validate(const MultipoleParams& p);

struct RadialGrid {
  int points = 4000;
  double r_min = 1e-4;
  double r_max = 400.0;
};

/// Bound hydrogenic radial function P_nl = r R_nl on a log grid, square-normalized.
struct CoulombRadial {
  int n = 0;
  int l = 0;
  std::vector<double> r;
  std::vector<double> P;
  double norm = 0.0;  ///< quadrature of P^2 before renormalisation
};
CoulombRadial coulomb_radial(int n, int l, const RadialGrid& g = {});

/// <r^power> by quadrature; power is -3 or -4. Results are memoised per (n,l,power).
double hydrogenic_moment(int n, int l, int power, const RadialGrid& g = {});
double hydrogenic_moment_exact(int n, int l, int power);

/// <Y_{l Lambda}| P2(cos theta) |Y_{l Lambda'}>
double p2_angular(int l, int Lambda, int Lambdap);

enum class Normalization { Energy, Bound };

struct LongRangeOptions {
  Normalization norm = Normalization::Energy;
  bool allow_p_wave = false;
  RadialGrid grid{};
};

struct LongRangeK {
  Eigen::MatrixXd K;  ///< index Lambda + l
  bool large = false; ///< some |K| > 0.3
};

LongRangeK k_body_longrange(int n, int l, const MultipoleParams& p, const LongRangeOptions& opt = {});

}  // namespace trimqdt::lr
