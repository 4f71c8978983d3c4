#include "trimqdt/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "trimqdt/compare.hpp"
#include "trimqdt/units.hpp"

#ifndef TRIMQDT_VERSION
#define TRIMQDT_VERSION "0.0.0"
#endif

namespace trimqdt::pipe {

const char* version() { return TRIMQDT_VERSION; }

const std::vector<std::string>& tasks() {
  static const std::vector<std::string> t = {"ion-levels", "p-levels", "d-levels", "channels", "compare",
                                             "fit-defects"};
  return t;
}

const std::map<std::string, std::string>& default_values() {
  static const std::map<std::string, std::string> d = {
      {"pes", ""},
      {"defects", ""},
      {"multipoles", ""},
      {"ion_levels", ""},
      {"reference", ""},
      {"levels", ""},
      {"samples", ""},
      {"threshold_source", "table"},
      {"threshold_column", "exp"},
      {"reference_column", ""},
      {"calc_column", "calc"},
      {"N_max", "3"},
      {"Nplus_max", "4"},
      {"l", "2"},
      {"n", "3"},
      {"nu_min", ""},
      {"nu_max", ""},
      {"nu_step", "0.005"},
      {"root_tol", "1e-12"},
      {"compare_mode", ""},
      {"tolerance", ""},
      {"phase_convention", "body"},
      {"coriolis", "standard"},
      {"allow_p_wave", "false"},
      {"fit_n", "3"},
      {"ion.n_spline", "40"},
      {"ion.order", "5"},
      {"ion.twice_m2_max", "16"},
      {"ion.quad_points", "8"},
      {"ion.n_phi", "96"},
      {"ion.dvr_points", "40"},
      {"ion.R_min", "1.2"},
      {"ion.R_max", "6.0"},
      {"ion.n_chan", "10"},
      {"ion.n_states", "8"},
      {"ion.include_reference", "true"},
      {"ion.oracle_check", "false"},
      {"ion.purity", "0.5"},
  };
  return d;
}

std::string RunConfig::str(const std::string& key) const {
  auto it = values.find(key);
  if (it == values.end()) throw std::invalid_argument("config: unknown key '" + key + "'");
  return it->second;
}

std::string RunConfig::path(const std::string& key) const {
  const std::string v = str(key);
  if (v.empty()) return v;
  std::filesystem::path p(v);
  if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
  return p.lexically_normal().string();
}

double RunConfig::num(const std::string& key) const { return textio::to_double(str(key), "config " + key); }
int RunConfig::integer(const std::string& key) const { return textio::to_int(str(key), "config " + key); }

bool RunConfig::flag(const std::string& key) const {
  const std::string v = str(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config " + key + ": expected true or false");
}

std::string RunConfig::canonical() const {
  std::ostringstream os;
  os << "task = " << task << "\n";
  for (const auto& [k, v] : values) os << k << " = " << v << "\n";
  return os.str();
}

RunConfig make_config(const std::string& task, const std::map<std::string, std::string>& values,
                      const std::string& base_dir) {
  if (std::find(tasks().begin(), tasks().end(), task) == tasks().end())
    throw std::invalid_argument("unknown task '" + task + "'");
  RunConfig c;
  c.task = task;
  c.base_dir = base_dir;
  c.values = default_values();
  for (const auto& [k, v] : values) {
    if (k == "task") continue;
    if (!c.values.count(k)) throw std::invalid_argument("config: unknown key '" + k + "'");
    c.values[k] = v;
  }
  const bool d = task == "d-levels";
  if (c.values["nu_min"].empty()) c.values["nu_min"] = d ? "2.8" : "2.45";
  if (c.values["nu_max"].empty()) c.values["nu_max"] = d ? "3.25" : "2.80";
  if (c.values["reference_column"].empty()) c.values["reference_column"] = task == "ion-levels" ? "exp" : "cal";
  if (c.values["compare_mode"].empty()) c.values["compare_mode"] = task == "ion-levels" ? "absolute" : "offset-fit";
  cmp::parse_mode(c.values["compare_mode"]);
  if (!c.values["tolerance"].empty() && !(c.num("tolerance") > 0.0))
    throw std::invalid_argument("config tolerance: must be positive");
  if (!(c.num("nu_step") > 0.0)) throw std::invalid_argument("config nu_step: must be positive");
  if (!(c.num("root_tol") > 0.0)) throw std::invalid_argument("config root_tol: must be positive");
  if (c.str("threshold_source") != "table" && c.str("threshold_source") != "computed")
    throw std::invalid_argument("config threshold_source: table or computed");
  if (c.str("phase_convention") != "body" && c.str("phase_convention") != "rotated")
    throw std::invalid_argument("config phase_convention: body or rotated");
  if (c.str("coriolis") != "standard" && c.str("coriolis") != "literal")
    throw std::invalid_argument("config coriolis: standard or literal");
  c.flag("allow_p_wave");
  c.flag("ion.include_reference");
  c.flag("ion.oracle_check");
  for (const char* k : {"pes", "defects", "multipoles", "ion_levels", "reference", "levels", "samples"}) {
    const std::string p = c.path(k);
    if (!p.empty() && !std::filesystem::exists(p)) throw std::runtime_error("config " + std::string(k) + ": no such file " + p);
  }
  return c;
}

RunConfig load_config(const std::string& path, const std::string& task_override) {
  const auto kv = textio::read_key_values(path);
  std::string task = task_override;
  auto it = kv.values.find("task");
  if (task.empty()) {
    if (it == kv.values.end()) throw std::invalid_argument(path + ": no task given");
    task = it->second;
  }
  const std::string base = std::filesystem::path(path).parent_path().string();
  return make_config(task, kv.values, base.empty() ? "." : base);
}

ion::IonSolverOptions ion_options(const RunConfig& c, int threads) {
  ion::IonSolverOptions o;
  o.angular.n_spline = c.integer("ion.n_spline");
  o.angular.order = c.integer("ion.order");
  o.angular.twice_m2_max = c.integer("ion.twice_m2_max");
  o.angular.quad_points = c.integer("ion.quad_points");
  o.angular.n_phi = c.integer("ion.n_phi");
  o.angular.coriolis = c.str("coriolis") == "literal" ? ion::CoriolisForm::Literal : ion::CoriolisForm::Standard;
  o.angular.include_reference = c.flag("ion.include_reference");
  o.dvr_points = c.integer("ion.dvr_points");
  o.R_min = c.num("ion.R_min");
  o.R_max = c.num("ion.R_max");
  o.n_chan = c.integer("ion.n_chan");
  o.n_states = c.integer("ion.n_states");
  o.threads = threads;
  return o;
}

// ---------------------------------------------------------------------------

double GroundBandFit::energy(int N, int K) const {
  const double x = N * (N + 1.0), k2 = double(K) * K;
  return B * x + CmB * k2 - DN * x * x - DNK * x * k2 - DK * k2 * k2;
}

GroundBandFit fit_ground_band(const std::vector<textio::IonLevelRow>& rows, const std::string& source) {
  std::vector<const textio::IonLevelRow*> g;
  for (const auto& r : rows)
    if (r.source == source && r.band == "0,0^0") g.push_back(&r);
  if (g.size() < 5) throw std::runtime_error("ground-band fit needs at least 5 levels of source '" + source + "'");
  Eigen::MatrixXd A(g.size(), 5);
  Eigen::VectorXd b(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g[i]->N * (g[i]->N + 1.0), k2 = double(g[i]->G) * g[i]->G;
    A.row(i) << x, k2, -x * x, -x * k2, -k2 * k2;
    b(i) = g[i]->energy;
  }
  const Eigen::VectorXd p = A.colPivHouseholderQr().solve(b);
  GroundBandFit f{p(0), p(1), p(2), p(3), p(4), 0.0};
  f.rms = std::sqrt((A * p - b).squaredNorm() / g.size());
  return f;
}

std::vector<ft::Threshold> ground_band_thresholds(const std::vector<textio::IonLevelRow>& rows,
                                                  const std::string& source, int Nplus_max,
                                                  std::vector<std::string>* notes) {
  std::vector<ft::Threshold> out;
  std::optional<GroundBandFit> fit;
  for (int N = 0; N <= Nplus_max; ++N)
    for (int K = 0; K <= N; ++K) {
      if (!ft::ground_band_function(N, K)) continue;
      auto it = std::find_if(rows.begin(), rows.end(), [&](const textio::IonLevelRow& r) {
        return r.source == source && r.band == "0,0^0" && r.N == N && r.G == K;
      });
      if (it != rows.end()) {
        out.push_back({N, K, to_hartree(it->energy)});
        continue;
      }
      if (!fit) {
        fit = fit_ground_band(rows, source);
        if (notes)
          notes->push_back("ground-band fit: B=" + textio::fixed(fit->B, 4) + " C-B=" + textio::fixed(fit->CmB, 4) +
                           " rms=" + textio::fixed(fit->rms, 4) + " cm-1");
      }
      const double e = fit->energy(N, K);
      if (notes)
        notes->push_back("threshold (" + std::to_string(N) + "," + std::to_string(K) + ") extrapolated: " +
                         textio::fixed(e, 3) + " cm-1");
      out.push_back({N, K, to_hartree(e)});
    }
  return out;
}

// ---------------------------------------------------------------------------

LevelsResult levels_from_blocks(const std::vector<ft::LabK>& blocks, bool is_mu, const LevelSearch& s) {
  LevelsResult res;
  const double E_lo = s.E0 - 0.5 / (s.nu_min * s.nu_min);
  const double E_hi = s.E0 - 0.5 / (s.nu_max * s.nu_max);
  for (const auto& b : blocks) {
    const int n = static_cast<int>(b.channels.size());
    Eigen::VectorXd thr(n);
    for (int i = 0; i < n; ++i) thr(i) = b.channels[i].threshold;
    Eigen::MatrixXd K = b.K;
    std::string what = "block N=" + std::to_string(b.N) + " spin=" + std::to_string(b.spin) +
                       " parity=" + (b.parity > 0 ? "+" : "-") + " channels=" + std::to_string(n);
    if (is_mu) {
      const auto k = qd::k_from_mu(b.K);
      if (k.pole) {
        res.log.push_back(what + ": eigen-defect on a pole of tan, block skipped");
        continue;
      }
      K = k.K;
    }
    const double hi = std::min(E_hi, thr.minCoeff() - 1e-9);
    if (!(hi > E_lo)) {
      res.log.push_back(what + ": window above the lowest threshold, skipped");
      continue;
    }
    const auto f = mqdt::find_levels(K, thr, E_lo, hi, s.find);
    res.log.push_back(what + ": roots=" + std::to_string(f.count_fine) + (f.stable ? "" : " (root count unstable)"));
    res.stable = res.stable && f.stable;
    for (const auto& L : f.levels) {
      RydbergLevel r;
      r.N = b.N;
      r.spin = b.spin;
      r.parity = b.parity;
      r.E = L.E;
      r.dominant = L.dominant;
      r.multiplicity = L.multiplicity;
      const auto& ch = b.channels[L.dominant];
      r.channel = ch.label();
      r.Nplus = ch.Nplus;
      r.Kplus = ch.G;
      r.weight = L.weights[L.dominant];
      std::map<int, double> byG;
      for (int i = 0; i < n; ++i) byG[b.channels[i].G] += L.weights[i];
      double best = -1.0;
      for (const auto& [G, w] : byG)
        if (w > best) {
          best = w;
          r.G = G;
        }
      res.levels.push_back(r);
    }
  }
  std::stable_sort(res.levels.begin(), res.levels.end(),
                   [](const RydbergLevel& a, const RydbergLevel& b) { return a.E < b.E; });
  return res;
}

LevelsResult p_levels_table(const qd::MuSurfaceParams& p, const std::vector<ft::Threshold>& thr, int N_max,
                            int Nplus_max, const LevelSearch& s) {
  const Eigen::MatrixXcd body = ft::to_lambda_order(qd::mu_body(geom::SymCoords{}, p));
  std::vector<ft::LabK> blocks;
  for (int N = 0; N <= N_max; ++N) {
    const auto b = ft::transform_rotational_only(body, 1, N, thr, Nplus_max);
    blocks.insert(blocks.end(), b.begin(), b.end());
  }
  return levels_from_blocks(blocks, true, s);
}

LevelsResult d_levels_table(const lr::MultipoleParams& m, int n, int l, const std::vector<ft::Threshold>& thr,
                            int N_max, int Nplus_max, const LevelSearch& s, const lr::LongRangeOptions& o) {
  const auto k = lr::k_body_longrange(n, l, m, o);
  LevelsResult res;
  if (k.large) res.log.push_back("warning: |K| > 0.3, first-order long-range model outside its regime");
  std::vector<ft::LabK> blocks;
  for (int N = 0; N <= N_max; ++N) {
    const auto b = ft::transform_rotational_only(k.K.cast<std::complex<double>>(), l, N, thr, Nplus_max);
    blocks.insert(blocks.end(), b.begin(), b.end());
  }
  auto r = levels_from_blocks(blocks, false, s);
  r.log.insert(r.log.begin(), res.log.begin(), res.log.end());
  return r;
}

std::vector<textio::ReferenceRow> label_levels_ngu(const std::vector<RydbergLevel>& levels,
                                                   const std::vector<textio::ReferenceRow>& ref) {
  std::vector<cmp::GroupedLevel> g;
  for (const auto& l : levels)
    for (int k = 0; k < l.multiplicity; ++k) g.push_back({l.N, l.G, to_cm(l.E)});
  return cmp::label_by_group(g, ref);
}

std::vector<textio::ReferenceRow> label_levels_nkn(const std::vector<RydbergLevel>& levels) {
  std::vector<textio::ReferenceRow> out;
  std::map<std::string, int> seen;
  for (const auto& l : levels) {
    std::string lab = std::to_string(l.Nplus) + "," + std::to_string(l.Kplus) + "," + std::to_string(l.N);
    const int k = ++seen[lab];
    if (k > 1) lab += ",#" + std::to_string(k);
    out.push_back({lab, to_cm(l.E), "calc", ""});
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct Output {
  std::string header;
  std::ostringstream log;
  int status = 0;
};

std::string header_block(const RunConfig& c, const std::string& format) {
  std::ostringstream os;
  os << "# trimqdt " << version() << "\n";
  os << "# task = " << c.task << "\n";
  os << "# format = " << format << "\n";
  os << "# config_hash = " << textio::fnv1a_hex(c.canonical()) << "\n";
  for (const char* k : {"pes", "defects", "multipoles", "ion_levels", "reference", "levels", "samples"}) {
    const std::string p = c.path(k);
    if (!p.empty()) os << "# input " << k << " " << textio::fnv1a_hex(textio::read_file(p)) << "\n";
  }
  return os.str();
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
  if (!f) throw std::runtime_error("write failed: " + p.string());
}

std::string require(const RunConfig& c, const std::string& key) {
  const std::string p = c.path(key);
  if (p.empty()) throw std::invalid_argument("task " + c.task + " needs '" + key + "' in the config");
  return p;
}

qd::PhaseConvention convention(const RunConfig& c) {
  return c.str("phase_convention") == "rotated" ? qd::PhaseConvention::Rotated : qd::PhaseConvention::Body;
}

LevelSearch search(const RunConfig& c, int threads) {
  LevelSearch s;
  s.nu_min = c.num("nu_min");
  s.nu_max = c.num("nu_max");
  if (!(s.nu_min > 0.0) || !(s.nu_max > s.nu_min)) throw std::invalid_argument("config: need 0 < nu_min < nu_max");
  s.find.nu_step = c.num("nu_step");
  s.find.tol = c.num("root_tol");
  s.find.threads = threads;
  return s;
}

// all ion blocks up to Nplus_max plus the energy zero from the reference function
struct IonRun {
  std::vector<ion::BlockSolution> blocks;
  double zero = 0.0;  // hartree
  bool has_zero = false;
};

IonRun solve_ions(const RunConfig& c, int threads, std::ostream& log) {
  IonRun r;
  const auto V = load_surface(require(c, "pes"));
  auto opt = ion_options(c, threads);
  const bool want_zero = opt.angular.include_reference;
  opt.angular.include_reference = false;
  const int Nmax = c.integer("Nplus_max");
  for (const auto& b : ion::nonempty_blocks(Nmax, opt.angular.twice_m2_max)) {
    r.blocks.push_back(ion::solve_block(b, V.get(), opt));
    const auto& s = r.blocks.back();
    log << "ion block N=" << b.N << " spin=" << b.spin << " parity=" << (b.parity > 0 ? "+" : "-")
        << " states=" << s.states.size() << " min_neighbour_sv=" << textio::fixed(s.svd.min_neighbour_sv, 6)
        << (s.svd.singular_overlap ? " (singular overlap)" : "") << "\n";
  }
  if (want_zero) {
    auto o = opt;
    o.angular.include_reference = true;
    o.n_states = 1;
    const auto s = ion::solve_block({0, 0, 1}, V.get(), o);
    if (s.states.empty()) throw std::runtime_error("reference level could not be computed");
    r.zero = s.states.front().energy;
    r.has_zero = true;
    log << "energy zero (reference N+=0 level) " << textio::fixed(to_cm(r.zero), 4) << " cm-1 absolute\n";
  }
  if (c.flag("ion.oracle_check") && !r.blocks.empty()) {
    const auto& s = r.blocks.front();
    ion::HyperangularProblem prob(s.block, opt.angular);
    const long dim = static_cast<long>(prob.dim()) * static_cast<long>(s.grid.R.size());
    if (dim > 4000) {
      log << "oracle check skipped: product grid dimension " << dim << " too large\n";
    } else {
      const int n = std::min<int>(5, s.svd.energies.size());
      std::vector<Eigen::MatrixXd> H;
      for (double R : s.grid.R) H.push_back(prob.matrix(R, V.get()));
      const Eigen::VectorXd e = ion::brute_force_product_grid(s.grid, H, prob.overlap(), n);
      // with every channel kept the SVD problem is the product-grid problem
      const auto full = ion::svd_solve(s.grid, ion::solve_on_grid(prob, s.grid.R, V.get(), prob.dim(), threads),
                                       prob.overlap(), n);
      double dev = 0.0, trunc = 0.0;
      for (int i = 0; i < n; ++i) {
        dev = std::max(dev, std::abs(e(i) - full.energies(i)) / std::abs(e(i)));
        trunc = std::max(trunc, std::abs(e(i) - s.svd.energies(i)) / std::abs(e(i)));
      }
      log << "oracle check (product-grid brute force, first block, full channel set): max relative deviation "
          << dev << (dev <= 1e-8 ? " pass" : " FAIL") << "\n";
      log << "channel truncation (n_chan=" << s.svd.n_chan << "): max relative deviation " << trunc << "\n";
    }
  }
  return r;
}

std::vector<std::pair<const ion::BlockSolution*, int>> sorted_states(const IonRun& r) {
  std::vector<std::pair<const ion::BlockSolution*, int>> out;
  for (const auto& b : r.blocks)
    for (int i = 0; i < static_cast<int>(b.states.size()); ++i) out.push_back({&b, i});
  return out;
}

// labelled copies of every ion state, same order as sorted_states
std::vector<ion::RovibState> labelled(const IonRun& r, double purity) {
  std::vector<ion::RovibState> all;
  for (const auto& b : r.blocks)
    for (const auto& s : b.states) all.push_back(s);
  ion::assign_labels(all, purity);
  return all;
}

textio::IonLevelRow ion_row(const ion::RovibState& s, double zero) {
  textio::IonLevelRow r;
  r.N = s.block.N;
  r.G = std::max(0, s.G);
  if (s.ambiguous) {
    r.band = "?";
  } else {
    r.band = std::to_string(s.v1) + "," + std::to_string(s.v2) + "^" + std::to_string(s.l2);
  }
  r.tag = s.ul ? std::string(1, s.ul) : "-";
  r.energy = to_cm(s.energy - zero);
  r.source = "calc";
  return r;
}

std::string reference_differences(const std::vector<textio::ReferenceRow>& ref) {
  // cal - fit (or cal - exp) pairs present in a reference table
  std::map<std::string, std::map<std::string, double>> by;
  std::vector<std::string> order;
  for (const auto& r : ref) {
    if (!by.count(r.label)) order.push_back(r.label);
    by[r.label][r.source] = r.energy;
  }
  std::ostringstream os;
  for (const auto& l : order) {
    const auto& m = by[l];
    if (!m.count("cal")) continue;
    const char* other = m.count("fit") ? "fit" : (m.count("exp") ? "exp" : nullptr);
    if (!other) continue;
    os << "# reference_difference " << l << " cal-" << other << " " << textio::fixed(m.at("cal") - m.at(other), 4)
       << "\n";
  }
  return os.str();
}

int finish_compare(const RunConfig& c, const std::vector<textio::ReferenceRow>& calc,
                   const std::vector<textio::ReferenceRow>& ref_all, const std::string& ref_col,
                   const std::filesystem::path& out, std::optional<double> tolerance, std::ostream& log) {
  const auto ref = cmp::select_source(ref_all, ref_col);
  if (ref.empty()) throw std::runtime_error("reference has no rows of source '" + ref_col + "'");
  const auto rep = cmp::compare(calc, ref, cmp::parse_mode(c.str("compare_mode")));
  std::string text = header_block(c, "report") + cmp::format_report(rep) + reference_differences(ref_all);
  write_file(out / (c.task + ".report"), text);
  log << "comparison (" << cmp::to_string(rep.mode) << ", reference column " << ref_col << "): rows "
      << rep.rows.size() << " rms " << textio::fixed(rep.rms, 4) << " max " << textio::fixed(rep.max_abs, 4)
      << " cm-1, unmatched reference rows " << rep.unmatched_ref.size() << "\n";
  if (tolerance && rep.rms > *tolerance) {
    log << "rms above tolerance " << *tolerance << "\n";
    return 1;
  }
  return 0;
}

// every row of a levels file, reference table or ion-level table
std::vector<textio::ReferenceRow> read_all_rows(const std::string& path) {
  const std::string text = textio::read_file(path);
  auto from_ion = [&] {
    std::vector<textio::ReferenceRow> out;
    for (const auto& r : textio::parse_ion_levels(text, path)) out.push_back({r.label(), r.energy, r.source, ""});
    return out;
  };
  if (text.find("# format = ion-levels") != std::string::npos) return from_ion();
  // an ion-level table without a format line has six plain columns
  try {
    return textio::parse_reference(text, path);
  } catch (const std::runtime_error&) {
    return from_ion();
  }
}

std::string level_rows(const std::vector<RydbergLevel>& levels, const std::vector<textio::ReferenceRow>& labels) {
  // labels are energy-sorted like levels (multiplicity expanded)
  std::vector<const RydbergLevel*> flat;
  for (const auto& l : levels)
    for (int k = 0; k < l.multiplicity; ++k) flat.push_back(&l);
  std::ostringstream os;
  os << "# label energy_cm-1 source N G spin parity dominant_channel weight\n";
  for (std::size_t i = 0; i < flat.size() && i < labels.size(); ++i) {
    const auto& l = *flat[i];
    textio::ReferenceRow r = labels[i];
    r.extra = "N=" + std::to_string(l.N) + " G=" + std::to_string(l.G) + " spin=" + std::to_string(l.spin) +
              " parity=" + (l.parity > 0 ? "+" : "-") + " dom=" + std::to_string(l.Nplus) + "," +
              std::to_string(l.Kplus) + " w=" + textio::fixed(l.weight, 6);
    const std::string s = textio::format_reference({r});
    os << s.substr(s.find('\n') + 1);
  }
  return os.str();
}

std::vector<ft::Threshold> thresholds(const RunConfig& c, std::ostream& log, const IonRun* ions,
                                      const std::vector<ion::RovibState>* lab) {
  const int Nmax = c.integer("Nplus_max");
  if (c.str("threshold_source") == "table") {
    std::vector<std::string> notes;
    const auto t = ground_band_thresholds(textio::read_ion_levels(require(c, "ion_levels")),
                                          c.str("threshold_column"), Nmax, &notes);
    for (const auto& n : notes) log << n << "\n";
    return t;
  }
  std::vector<ft::Threshold> t;
  const auto st = sorted_states(*ions);
  for (std::size_t i = 0; i < st.size(); ++i) {
    const auto& s = (*lab)[i];
    if (s.ambiguous || s.v1 != 0 || s.v2 != 0) continue;
    t.push_back({s.block.N, s.G, s.energy - ions->zero});
  }
  return t;
}

}  // namespace

int run(const RunConfig& c, const std::string& out_dir, int threads, std::optional<double> tolerance) {
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  const std::filesystem::path out(out_dir);
  std::filesystem::create_directories(out);
  if (!tolerance && !c.str("tolerance").empty()) tolerance = c.num("tolerance");
  std::ostringstream log;
  log << "trimqdt " << version() << " task " << c.task << "\n";
  int status = 0;
  const std::string ref_path = c.path("reference");

  if (c.task == "ion-levels") {
    const auto ions = solve_ions(c, threads, log);
    const auto lab = labelled(ions, c.num("ion.purity"));
    std::vector<textio::IonLevelRow> rows;
    for (const auto& s : lab) rows.push_back(ion_row(s, ions.zero));
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.energy < b.energy; });
    write_file(out / "ion-levels.levels", header_block(c, "ion-levels") + textio::format_ion_levels(rows));
    if (!ref_path.empty()) {
      std::vector<textio::ReferenceRow> calc = cmp::select_source(rows, "calc");
      // duplicate labels (unassigned states) cannot be matched
      std::map<std::string, int> seen;
      std::vector<textio::ReferenceRow> uniq;
      for (auto& r : calc)
        if (seen[r.label]++ == 0 && r.label.find('?') == std::string::npos) uniq.push_back(r);
      status = finish_compare(c, uniq, read_all_rows(ref_path), c.str("reference_column"), out, tolerance, log);
    }
  } else if (c.task == "p-levels" || c.task == "d-levels" || c.task == "channels") {
    const bool computed = c.str("threshold_source") == "computed";
    IonRun ions;
    std::vector<ion::RovibState> lab;
    if (computed) {
      ions = solve_ions(c, threads, log);
      lab = labelled(ions, c.num("ion.purity"));
    }
    const auto thr = thresholds(c, log, computed ? &ions : nullptr, computed ? &lab : nullptr);
    const int Nmax = c.integer("N_max"), Npmax = c.integer("Nplus_max");
    auto s = search(c, threads);
    LevelsResult res;
    std::vector<ft::LabK> blocks;
    bool is_mu = true;
    if (c.task == "d-levels" || (c.task == "channels" && !c.path("multipoles").empty() && c.path("defects").empty())) {
      const auto m = lr::load_multipoles(require(c, "multipoles"));
      lr::LongRangeOptions o;
      o.allow_p_wave = c.flag("allow_p_wave");
      const int l = c.integer("l"), n = c.integer("n");
      const auto k = lr::k_body_longrange(n, l, m, o);
      if (k.large) log << "warning: |K| > 0.3, first-order long-range model outside its regime\n";
      for (int N = 0; N <= Nmax; ++N) {
        const auto b = ft::transform_rotational_only(k.K.cast<std::complex<double>>(), l, N, thr, Npmax);
        blocks.insert(blocks.end(), b.begin(), b.end());
      }
      is_mu = false;
    } else {
      const auto p = qd::load_params(require(c, "defects"));
      if (!computed) {
        const bool taylor = p.a1 || p.a2 || p.a3 || p.a4 || p.b1 || p.b2 || p.b3 || p.delta || p.lambda_jt;
        if (taylor) log << "note: table thresholds carry no vibrational wavefunctions; the equilibrium defect matrix is used\n";
        const Eigen::MatrixXcd body = ft::to_lambda_order(qd::mu_body(geom::SymCoords{}, p, convention(c)));
        for (int N = 0; N <= Nmax; ++N) {
          const auto b = ft::transform_rotational_only(body, 1, N, thr, Npmax);
          blocks.insert(blocks.end(), b.begin(), b.end());
        }
      } else {
        const auto mu = ft::mu_surface_function(p, convention(c));
        const auto st = sorted_states(ions);
        for (int N = 0; N <= Nmax; ++N) {
          std::vector<ft::IonChannelState> chans;
          for (std::size_t i = 0; i < st.size(); ++i) {
            const auto& L = lab[i];
            if (L.ambiguous || L.v1 != 0 || L.v2 != 0) continue;
            if (std::abs(L.block.N - N) > 1 || L.block.N > Npmax) continue;
            chans.push_back({st[i].first, st[i].second, L.energy - ions.zero, L.label(), L.G});
          }
          ft::RovibTransformOptions o;
          o.l = 1;
          o.N = N;
          o.threads = threads;
          const auto tr = ft::transform_mu(mu, chans, o);
          log << "rovibrational transform N=" << N << ": channels " << chans.size() << ", largest imaginary part "
              << tr.max_imag << "\n";
          const auto b = ft::split_blocks(tr.channels, tr.M);
          blocks.insert(blocks.end(), b.begin(), b.end());
        }
      }
    }
    if (c.task == "channels") {
      std::ostringstream os;
      os << "# block N spin parity; channel rows: index N+ G threshold_cm-1 label; then the lab matrix\n";
      for (const auto& b : blocks) {
        os << "block " << b.N << " " << b.spin << " " << (b.parity > 0 ? "+" : "-") << "\n";
        for (std::size_t i = 0; i < b.channels.size(); ++i)
          os << "channel " << i << " " << b.channels[i].Nplus << " " << b.channels[i].G << " "
             << textio::fixed(to_cm(b.channels[i].threshold), 4) << " " << b.channels[i].vib << "\n";
        for (int i = 0; i < b.K.rows(); ++i) {
          os << "row";
          for (int j = 0; j < b.K.cols(); ++j) os << " " << textio::fixed(b.K(i, j), 10);
          os << "\n";
        }
      }
      write_file(out / "channels.levels", header_block(c, "channels") + os.str());
    } else {
      res = levels_from_blocks(blocks, is_mu, s);
      for (const auto& l : res.log) log << l << "\n";
      if (!res.stable) log << "warning: root count differs between scan resolutions\n";
      std::vector<textio::ReferenceRow> all_ref;
      std::vector<textio::ReferenceRow> labels;
      if (!ref_path.empty()) all_ref = textio::read_reference(ref_path);
      if (c.task == "p-levels")
        labels = label_levels_ngu(res.levels, cmp::select_source(all_ref, c.str("reference_column")));
      else
        labels = label_levels_nkn(res.levels);
      // label_levels_* sort by energy; keep level order consistent
      write_file(out / (c.task + ".levels"), header_block(c, "levels") + level_rows(res.levels, labels));
      if (!ref_path.empty())
        status = finish_compare(c, labels, all_ref, c.str("reference_column"), out, tolerance, log);
    }
  } else if (c.task == "compare") {
    const auto calc = cmp::select_source(read_all_rows(require(c, "levels")), c.str("calc_column"));
    status = finish_compare(c, calc, read_all_rows(require(c, "reference")), c.str("reference_column"), out,
                            tolerance, log);
  } else if (c.task == "fit-defects") {
    const auto samples = qd::load_samples(require(c, "samples"));
    qd::MuSurfaceParams base;
    if (!c.path("defects").empty()) base = qd::load_params(c.path("defects"));
    const auto f = qd::fit_defects(samples, c.integer("fit_n"), base);
    log << "fit: samples " << samples.size() << " values " << f.n_values << " rms " << f.rms << "\n";
    write_file(out / "fit-defects.params", header_block(c, "defects") + qd::format_params(f.params));
  }
  write_file(out / (c.task + ".log"), log.str());
  return status;
}

}  // namespace trimqdt::pipe
