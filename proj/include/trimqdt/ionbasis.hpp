#pragma once

#include <complex>
#include <string>
#include <vector>

namespace trimqdt::ionbasis {

/// Nonspline labels of a primitive product e^{i m2 phi} R^N_{K m}(Euler) Phi^I_g.
/// m2 is stored as twice its value.
struct Primitive {
  int twice_m2 = 0;
  int K = 0;
  int g = 0;
  bool operator==(const Primitive&) const = default;
  Primitive partner() const { return {-twice_m2, -K, -g}; }
  double m2() const { return 0.5 * twice_m2; }
};

/// Symmetry-adapted basis function. The spline index is carried separately by
/// the hyperangular problem; here j is kept for completeness of the label set.
struct SymBasisFunction {
  int j = 0;
  int twice_m2 = 0;
  int K = 0;  ///< K+ >= 0 (canonical representative)
  int N = 0;
  int m = 0;
  int g = 0;
  int parity = 1;
  bool one_term = false;  ///< the single-product form (m2 = K+ = g = 0, N+ odd)

  Primitive primitive() const { return {twice_m2, K, g}; }
  /// Sign s in (1/sqrt2)[p - s p~]; s = (-1)^(N+K).
  int partner_sign() const { return ((N + K) % 2 == 0) ? 1 : -1; }
  /// Vibrational angular momentum label l2 = -(m2 + K/2) and G = |m2 + 3K/2|.
  int l2() const { return -(twice_m2 + K) / 2; }
  int G() const { return std::abs(twice_m2 + 3 * K) / 2; }
};

/// K+/2 + m2 integral (continuity of the trial function).
bool continuity_ok(int twice_m2, int K);

/// m2 + g = 3n (K even) or 3n + 3/2 (K odd).
bool selection_ok(int twice_m2, int K, int g);

/// Spin class of g: 0 ortho, 1 para.
inline int spin_class(int g) { return g == 0 ? 0 : 1; }

/// All symmetry-adapted functions of one (N+, m+, spin class, parity) block,
/// repeated for spline indices 0..n_spline-1. g selects the spin class (0 ortho,
/// +-1 para; para blocks carry both signs of g). An empty list is valid.
std::vector<SymBasisFunction> enumerate_basis(int N, int m, int g, int parity, int twice_m2_max,
                                              int n_spline = 1);

enum class Permutation { P12, P23, P31, P12P31, P12P23 };
const char* to_string(Permutation p);

/// Table rows used for the permutation phases. Adopted: the P31 rotational
/// factor (-1)^N and P12P23 keeping g; Literal: the rows as printed.
enum class PermutationTable { Adopted, Literal };

struct PhasedPrimitive {
  Primitive p;
  std::complex<double> phase;
};

/// Action of a permutation on one primitive product at fixed N.
PhasedPrimitive apply_permutation(Permutation op, const Primitive& p, int N,
                                  PermutationTable table = PermutationTable::Adopted);

/// Linear combination of primitives at fixed N.
struct Combination {
  int N = 0;
  std::vector<PhasedPrimitive> terms;
};

Combination expand(const SymBasisFunction& b);
Combination apply_permutation(Permutation op, const Combination& c,
                              PermutationTable table = PermutationTable::Adopted);

/// If c2 = lambda c1 returns lambda; otherwise NaN. Coefficients below tol are ignored.
std::complex<double> proportionality(const Combination& c1, const Combination& c2,
                                     double tol = 1e-12);

/// Antisymmetrizer 1 - P12 - P23 - P31 + P12P31 + P12P23 applied to a combination.
Combination apply_antisymmetrizer(const Combination& c,
                                  PermutationTable table = PermutationTable::Adopted);

struct AntisymResult {
  bool zero = false;
  SymBasisFunction function;
};

/// Symmetry-adapted function generated from a trial primitive. Throws
/// std::invalid_argument when K/2 + m2 is not integral.
AntisymResult antisymmetrize(int N, int m, const Primitive& trial, int spline_index = 0);

struct ClosureIssue {
  std::string relation;
  Primitive p;
  int N = 0;
  std::complex<double> expected;
  std::complex<double> obtained;
};

/// Checks P12^2 = P23^2 = P31^2 = 1, P12 P31 and P12 P23 against their rows and
/// (P12 P31)^2 = P12 P23 for all continuity-respecting labels up to the limits.
std::vector<ClosureIssue> check_group_closure(PermutationTable table, int N_max, int twice_m2_max);

}  // namespace trimqdt::ionbasis
