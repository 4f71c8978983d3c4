#include "trimqdt/potential.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include "trimqdt/units.hpp"

namespace trimqdt {

ExpansionSurface::ExpansionSurface(std::string name, double beta, double r_ref, double v0,
                                   std::vector<Term> terms)
    : name_(std::move(name)), beta_(beta), r_ref_(r_ref), v0_(v0), terms_(std::move(terms)) {
  if (!(beta_ > 0.0)) throw std::invalid_argument("expansion surface: beta must be positive");
  for (const auto& t : terms_)
    if (t.a < 0 || t.b < 0 || t.e < 0 || !std::isfinite(t.c))
      throw std::invalid_argument("expansion surface: bad term");
}

double ExpansionSurface::evaluate(const geom::InterparticleDistances& d) const {
  const double y1 = 1.0 - std::exp(-beta_ * (d.r23 - r_ref_));
  const double y2 = 1.0 - std::exp(-beta_ * (d.r31 - r_ref_));
  const double y3 = 1.0 - std::exp(-beta_ * (d.r12 - r_ref_));
  const double sa = (y1 + y2 + y3) / std::sqrt(3.0);
  const double sx = (2.0 * y3 - y1 - y2) / std::sqrt(6.0);
  const double sy = (y1 - y2) / std::sqrt(2.0);
  const double se2 = sx * sx + sy * sy;
  const double s3 = sx * sx * sx - 3.0 * sx * sy * sy;
  double v = v0_;
  for (const auto& t : terms_) v += t.c * std::pow(sa, t.a) * std::pow(se2, t.b) * std::pow(s3, t.e);
  return v;
}

namespace {

// Sorted cluster centers of values that agree within tol.
std::vector<double> cluster(std::vector<double> v, double tol) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v)
    if (out.empty() || x - out.back() > tol) out.push_back(x);
  return out;
}

int locate(const std::vector<double>& axis, double x, double tol) {
  auto it = std::lower_bound(axis.begin(), axis.end(), x - tol);
  if (it == axis.end() || std::abs(*it - x) > tol) return -1;
  return static_cast<int>(it - axis.begin());
}

std::array<geom::InterparticleDistances, 6> relabelings(const geom::InterparticleDistances& d) {
  return {{{d.r12, d.r23, d.r31},
           {d.r23, d.r31, d.r12},
           {d.r31, d.r12, d.r23},
           {d.r12, d.r31, d.r23},
           {d.r31, d.r23, d.r12},
           {d.r23, d.r12, d.r31}}};
}

}  // namespace

GridSurface::GridSurface(std::string name, const std::vector<Row>& rows) : name_(std::move(name)) {
  constexpr double tol = 1e-7;
  constexpr double theta_zero = 1e-9;
  struct Pt {
    geom::HyperPoint h;
    double e;
  };
  std::vector<Pt> pts;
  for (const auto& r : rows) {
    if (!std::isfinite(r.energy)) throw std::runtime_error("grid surface: non-finite energy");
    for (const auto& d : relabelings({r.r12, r.r23, r.r31})) pts.push_back({geom::to_hyperspherical(d), r.energy});
  }
  if (pts.empty()) throw std::runtime_error("grid surface: no rows");
  std::vector<double> rs, ts, ps;
  for (const auto& p : pts) {
    rs.push_back(p.h.R);
    ts.push_back(p.h.theta);
    if (p.h.theta > theta_zero) ps.push_back(p.h.phi);
  }
  R_ = cluster(rs, tol);
  th_ = cluster(ts, tol);
  ph_ = cluster(ps, tol);
  if (ph_.size() > 1 && ph_.back() - ph_.front() > 2.0 * kPi - tol) ph_.pop_back();
  if (R_.size() < 2 || th_.size() < 2 || ph_.size() < 3)
    throw std::runtime_error("grid surface: need at least 2 R, 2 theta and 3 phi values");
  const std::size_t nr = R_.size(), nt = th_.size(), np = ph_.size();
  v_.assign(nr * nt * np, std::numeric_limits<double>::quiet_NaN());
  auto set = [&](std::size_t idx, double e) {
    if (std::isnan(v_[idx])) {
      v_[idx] = e;
    } else if (std::abs(v_[idx] - e) > 1e-8 * std::max(1.0, std::abs(e))) {
      throw std::runtime_error("grid surface: permutation symmetry violated by duplicate points");
    }
  };
  for (const auto& p : pts) {
    const int ir = locate(R_, p.h.R, tol);
    const int it = locate(th_, p.h.theta, tol);
    if (p.h.theta <= theta_zero) {
      for (std::size_t ip = 0; ip < np; ++ip) set((ir * nt + it) * np + ip, p.e);
      continue;
    }
    double ph = p.h.phi;
    int ip = locate(ph_, ph, tol);
    if (ip < 0 && std::abs(ph - 2.0 * kPi) < tol) ip = 0;
    if (ip < 0) throw std::runtime_error("grid surface: point off the tensor grid");
    set((ir * nt + it) * np + ip, p.e);
  }
  for (double x : v_)
    if (std::isnan(x)) throw std::runtime_error("grid surface: incomplete tensor grid in (R, theta, phi)");
}

double GridSurface::evaluate(const geom::InterparticleDistances& d) const {
  const auto h = geom::to_hyperspherical(d);
  auto bracket = [](const std::vector<double>& ax, double x, const char* what) {
    if (x < ax.front() - 1e-12 || x > ax.back() + 1e-12)
      throw std::domain_error(std::string("grid surface: ") + what + " outside tabulated range");
    std::size_t i = std::upper_bound(ax.begin(), ax.end(), x) - ax.begin();
    i = std::clamp<std::size_t>(i, 1, ax.size() - 1);
    const double t = (x - ax[i - 1]) / (ax[i] - ax[i - 1]);
    return std::pair<std::size_t, double>{i - 1, std::clamp(t, 0.0, 1.0)};
  };
  const auto [ir, tr] = bracket(R_, h.R, "R");
  const auto [it, tt] = bracket(th_, h.theta, "theta");
  const std::size_t np = ph_.size(), nt = th_.size();
  // periodic bracket in phi
  std::size_t ip0, ip1;
  double tp;
  double ph = h.phi;
  if (ph < ph_.front()) ph += 2.0 * kPi;
  auto up = std::upper_bound(ph_.begin(), ph_.end(), ph);
  if (up == ph_.end()) {
    ip0 = np - 1;
    ip1 = 0;
    tp = (ph - ph_.back()) / (ph_.front() + 2.0 * kPi - ph_.back());
  } else {
    ip1 = up - ph_.begin();
    ip0 = ip1 - 1;
    tp = (ph - ph_[ip0]) / (ph_[ip1] - ph_[ip0]);
  }
  auto at = [&](std::size_t a, std::size_t b, std::size_t c) { return v_[(a * nt + b) * np + c]; };
  double v = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) {
        const double w = (a ? tr : 1 - tr) * (b ? tt : 1 - tt) * (c ? tp : 1 - tp);
        if (w == 0.0) continue;
        v += w * at(ir + a, it + b, c ? ip1 : ip0);
      }
  return v;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& tok, const std::string& where) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw std::runtime_error(where + ": not a number: '" + tok + "'");
  }
  if (used != tok.size()) throw std::runtime_error(where + ": trailing characters in '" + tok + "'");
  if (!std::isfinite(v)) throw std::runtime_error(where + ": non-finite value");
  return v;
}

}  // namespace

std::unique_ptr<PotentialSurface> load_surface(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open PES file: " + path);
  std::string name = path, format, line;
  std::vector<GridSurface::Row> rows;
  std::map<std::string, double> params;
  std::vector<ExpansionSurface::Term> terms;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = path + ":" + std::to_string(lineno);
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      t = trim(t.substr(1));
      const auto eq = t.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = trim(t.substr(0, eq)), val = trim(t.substr(eq + 1));
      if (key == "name") name = val;
      if (key == "format") format = val;
      continue;
    }
    if (format.empty()) throw std::runtime_error(where + ": data before '# format =' header");
    if (format == "grid") {
      std::istringstream ss(t);
      std::vector<double> v;
      std::string tok;
      while (ss >> tok) v.push_back(parse_number(tok, where));
      if (v.size() != 4) throw std::runtime_error(where + ": expected 'r12 r23 r31 energy'");
      if (v[0] <= 0 || v[1] <= 0 || v[2] <= 0) throw std::runtime_error(where + ": distances must be positive");
      rows.push_back({v[0], v[1], v[2], v[3]});
    } else if (format == "expansion") {
      std::istringstream ss(t);
      std::string head;
      ss >> head;
      if (head == "term") {
        std::string a, b, e, c, extra;
        if (!(ss >> a >> b >> e >> c) || (ss >> extra))
          throw std::runtime_error(where + ": expected 'term a b e coefficient'");
        ExpansionSurface::Term term;
        term.a = static_cast<int>(parse_number(a, where));
        term.b = static_cast<int>(parse_number(b, where));
        term.e = static_cast<int>(parse_number(e, where));
        term.c = parse_number(c, where);
        terms.push_back(term);
      } else {
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw std::runtime_error(where + ": expected 'key = value' or 'term ...'");
        const std::string key = trim(t.substr(0, eq));
        if (key != "beta" && key != "r_ref" && key != "v0")
          throw std::runtime_error(where + ": unknown key '" + key + "'");
        params[key] = parse_number(trim(t.substr(eq + 1)), where);
      }
    } else {
      throw std::runtime_error(where + ": unknown format '" + format + "'");
    }
  }
  std::unique_ptr<PotentialSurface> out;
  if (format == "grid") {
    auto g = std::make_unique<GridSurface>(name, rows);
    out = std::move(g);
  } else if (format == "expansion") {
    if (!params.count("beta") || !params.count("r_ref"))
      throw std::runtime_error(path + ": expansion needs beta and r_ref");
    if (terms.empty()) throw std::runtime_error(path + ": expansion has no terms");
    out = std::make_unique<ExpansionSurface>(name, params["beta"], params["r_ref"],
                                             params.count("v0") ? params["v0"] : 0.0, terms);
  } else {
    throw std::runtime_error(path + ": missing '# format = grid|expansion'");
  }
  const double viol = symmetry_violation(*out);
  if (viol > 1e-8)
    throw std::runtime_error(path + ": surface is not permutation symmetric (violation " +
                             std::to_string(viol) + ")");
  return out;
}

double symmetry_violation(const PotentialSurface& v, int samples, unsigned seed) {
  std::mt19937_64 rng(seed);
  const double rlo = v.R_min(), rhi = v.R_max();
  std::uniform_real_distribution<double> uR(rlo, rhi), uT(0.0, 0.5 * kPi), uP(0.0, 2.0 * kPi);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const geom::HyperPoint h{uR(rng), uT(rng), uP(rng)};
    const auto d = geom::to_interparticle(h);
    try {
      const double v0 = v.evaluate(d);
      for (const auto& p : relabelings(d)) {
        const double dv = std::abs(v.evaluate(p) - v0) / std::max(1.0, std::abs(v0));
        worst = std::max(worst, dv);
      }
    } catch (const std::domain_error&) {
      // outside the tabulated region; not a symmetry statement
    }
  }
  return worst;
}

std::unique_ptr<ExpansionSurface> toy_surface() {
  return std::make_unique<ExpansionSurface>(
      "toy Morse-type model", 1.1, 1.6504, 0.0,
      std::vector<ExpansionSurface::Term>{{2, 0, 0, 0.057}, {0, 1, 0, 0.071}, {0, 0, 1, 0.01}});
}

}  // namespace trimqdt
