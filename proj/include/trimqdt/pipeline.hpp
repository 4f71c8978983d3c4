#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trimqdt/frametrans.hpp"
#include "trimqdt/ionsolver.hpp"
#include "trimqdt/levels.hpp"
#include "trimqdt/longrange.hpp"
#include "trimqdt/qdefect.hpp"
#include "trimqdt/textio.hpp"

namespace trimqdt::pipe {

const char* version();

/// Effective run configuration: "key = value" file plus defaults. Relative
/// paths are resolved against the directory of the config file.
struct RunConfig {
  std::string task;
  std::map<std::string, std::string> values;  ///< every known key, defaults filled in
  std::string base_dir;

  std::string str(const std::string& key) const;
  std::string path(const std::string& key) const;  ///< resolved; empty when unset
  double num(const std::string& key) const;
  int integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  /// Canonical "key = value" text used for the config hash.
  std::string canonical() const;
};

/// Known keys with their defaults ("" for unset paths).
const std::map<std::string, std::string>& default_values();
const std::vector<std::string>& tasks();

RunConfig make_config(const std::string& task, const std::map<std::string, std::string>& values,
                      const std::string& base_dir = ".");
RunConfig load_config(const std::string& path, const std::string& task_override = "");

ion::IonSolverOptions ion_options(const RunConfig& c, int threads);

/// Ground-band thresholds (hartree) for N+ <= Nplus_max from an ion-level
/// table. Levels missing from the table are extrapolated with a ground-band
/// effective-Hamiltonian fit; `notes` records which.
struct GroundBandFit {
  double B = 0, CmB = 0, DN = 0, DNK = 0, DK = 0;
  double rms = 0;  ///< cm^-1
  double energy(int N, int K) const;  ///< cm^-1
};
GroundBandFit fit_ground_band(const std::vector<textio::IonLevelRow>& rows, const std::string& source);
std::vector<ft::Threshold> ground_band_thresholds(const std::vector<textio::IonLevelRow>& rows,
                                                  const std::string& source, int Nplus_max,
                                                  std::vector<std::string>* notes = nullptr);

struct RydbergLevel {
  int N = 0;
  int spin = 0;
  int parity = 1;
  double E = 0.0;  ///< hartree, same zero as the thresholds
  int G = -1;      ///< K+ carrying the largest channel weight
  int dominant = -1;
  std::string channel;  ///< dominant channel label
  int Nplus = 0;
  int Kplus = 0;
  double weight = 0.0;  ///< dominant channel weight
  int multiplicity = 1;
};

struct LevelSearch {
  double nu_min = 2.45, nu_max = 2.80;  ///< window in nu relative to the energy zero
  double E0 = 0.0;                      ///< hartree
  mqdt::FindOptions find;
};

struct LevelsResult {
  std::vector<RydbergLevel> levels;
  std::vector<std::string> log;
  bool stable = true;
};

/// Levels of every lab block; lab matrices are defect matrices (`is_mu`) or K matrices.
LevelsResult levels_from_blocks(const std::vector<ft::LabK>& blocks, bool is_mu, const LevelSearch& s);

/// p-wave levels with ground-band table thresholds and the equilibrium defect matrix.
LevelsResult p_levels_table(const qd::MuSurfaceParams& p, const std::vector<ft::Threshold>& thr, int N_max,
                            int Nplus_max, const LevelSearch& s);

/// d-wave (or higher l) levels from the long-range model.
LevelsResult d_levels_table(const lr::MultipoleParams& m, int n, int l, const std::vector<ft::Threshold>& thr,
                            int N_max, int Nplus_max, const LevelSearch& s, const lr::LongRangeOptions& o = {});

/// Table-style labels: "N,g,U" after a reference table (by (N, G) rank) or "N+,K+,N".
std::vector<textio::ReferenceRow> label_levels_ngu(const std::vector<RydbergLevel>& levels,
                                                   const std::vector<textio::ReferenceRow>& ref);
std::vector<textio::ReferenceRow> label_levels_nkn(const std::vector<RydbergLevel>& levels);

/// Runs one task and writes <out>/<task>.levels|.report|.log. Returns the exit
/// status (0 ok, 1 comparison over tolerance); throws on errors.
int run(const RunConfig& c, const std::string& out_dir, int threads, std::optional<double> tolerance);

}  // namespace trimqdt::pipe
