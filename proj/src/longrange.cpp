#include "trimqdt/longrange.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include "trimqdt/angular.hpp"
#include "trimqdt/textio.hpp"
#include "trimqdt/units.hpp"

namespace trimqdt::lr {

void validate(const MultipoleParams& p) {
  if (!(p.alpha_iso > 0.0)) throw std::invalid_argument("multipoles: alpha must be positive");
}

MultipoleParams load_multipoles(const std::string& path) {
  const auto kv = textio::read_key_values(path);
  MultipoleParams p;
  bool seen[3] = {false, false, false};
  for (const auto& [k, v] : kv.values) {
    const std::string where = path + ":" + std::to_string(kv.lines.at(k));
    if (k == "Q2") {
      p.Q2 = textio::to_double(v, where);
      seen[0] = true;
    } else if (k == "alpha") {
      p.alpha_iso = textio::to_double(v, where);
      seen[1] = true;
    } else if (k == "gamma") {
      p.gamma_aniso = textio::to_double(v, where);
      seen[2] = true;
    } else {
      throw std::runtime_error(where + ": unknown key '" + k + "'");
    }
  }
  if (!seen[0] || !seen[1] || !seen[2]) throw std::runtime_error(path + ": need Q2, alpha and gamma");
  validate(p);
  return p;
}

namespace {

// generalized Laguerre L^a_k(x) by the three-term recurrence
double laguerre(int k, double a, double x) {
  if (k == 0) return 1.0;
  double l0 = 1.0, l1 = 1.0 + a - x;
  for (int i = 1; i < k; ++i) {
    const double l2 = ((2 * i + 1 + a - x) * l1 - (i + a) * l0) / (i + 1);
    l0 = l1;
    l1 = l2;
  }
  return l1;
}

std::vector<double> log_grid(const RadialGrid& g) {
  if (g.points < 10 || !(g.r_min > 0) || !(g.r_max > g.r_min))
    throw std::invalid_argument("radial grid: bad parameters");
  std::vector<double> r(g.points);
  const double a = std::log(g.r_min), b = std::log(g.r_max);
  for (int i = 0; i < g.points; ++i) r[i] = std::exp(a + (b - a) * i / (g.points - 1));
  return r;
}

// trapezoid in t = ln r
double integrate_log(const std::vector<double>& r, const std::vector<double>& f, int stride) {
  const double h = std::log(r.back() / r.front()) / (r.size() - 1) * stride;
  double s = 0.0;
  const std::size_t last = r.size() - 1;
  for (std::size_t i = 0; i <= last; i += stride) {
    const double w = (i == 0 || i == last) ? 0.5 : 1.0;
    s += w * f[i] * r[i];
  }
  return s * h;
}

}  // namespace

CoulombRadial coulomb_radial(int n, int l, const RadialGrid& g) {
  if (l < 0 || n <= l) throw std::invalid_argument("coulomb_radial: need n > l >= 0");
  CoulombRadial c;
  c.n = n;
  c.l = l;
  c.r = log_grid(g);
  c.P.resize(c.r.size());
  const double lognorm =
      0.5 * (3.0 * std::log(2.0 / n) + std::lgamma(n - l) - std::log(2.0 * n) - std::lgamma(n + l + 1));
  for (std::size_t i = 0; i < c.r.size(); ++i) {
    const double x = 2.0 * c.r[i] / n;
    const double L = laguerre(n - l - 1, 2 * l + 1, x);
    c.P[i] = c.r[i] * std::exp(lognorm + l * std::log(x) - 0.5 * x) * L;
  }
  std::vector<double> p2(c.P.size());
  for (std::size_t i = 0; i < p2.size(); ++i) p2[i] = c.P[i] * c.P[i];
  c.norm = integrate_log(c.r, p2, 1);
  const double s = 1.0 / std::sqrt(c.norm);
  for (auto& v : c.P) v *= s;
  return c;
}

double hydrogenic_moment_exact(int n, int l, int power) {
  const double nn = n, ll = l;
  if (power == -3) return 1.0 / (nn * nn * nn * ll * (ll + 0.5) * (ll + 1.0));
  if (power == -4)
    return (3.0 * nn * nn - ll * (ll + 1.0)) /
           (2.0 * std::pow(nn, 5) * (ll + 1.5) * (ll + 1.0) * (ll + 0.5) * ll * (ll - 0.5));
  throw std::invalid_argument("hydrogenic_moment_exact: power must be -3 or -4");
}

double hydrogenic_moment(int n, int l, int power, const RadialGrid& g) {
  if (power != -3 && power != -4) throw std::invalid_argument("hydrogenic_moment: power must be -3 or -4");
  if (l < 1) throw std::invalid_argument("hydrogenic_moment: l = 0 moment diverges");
  if (n <= l) throw std::invalid_argument("hydrogenic_moment: need n > l");

  using Key = std::tuple<int, int, int, int, double, double>;
  static std::mutex mtx;
  static std::map<Key, double> memo;
  const Key key{n, l, power, g.points, g.r_min, g.r_max};
  {
    std::lock_guard<std::mutex> lock(mtx);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
  }

  const auto c = coulomb_radial(n, l, g);
  // the analytic normalisation makes the raw norm 1 unless the grid cuts the function off
  if (std::abs(c.norm - 1.0) > 1e-9)
    throw std::runtime_error("hydrogenic_moment: radial grid not converged (r_max too small for n)");
  std::vector<double> f(c.r.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = c.P[i] * c.P[i] * std::pow(c.r[i], power);
  // P ~ r^{l+1} below the first grid point
  const double head = f[0] * c.r[0] / (2 * l + 3 + power);
  const double fine = integrate_log(c.r, f, 1) + head;
  if ((g.points - 1) % 2 == 0) {
    // normalisation on the coarse grid too so the check compares like with like
    std::vector<double> p2(c.r.size());
    for (std::size_t i = 0; i < p2.size(); ++i) p2[i] = c.P[i] * c.P[i];
    const double coarse = (integrate_log(c.r, f, 2) + head) / integrate_log(c.r, p2, 2);
    if (std::abs(coarse - fine) > 1e-6 * std::abs(fine))
      throw std::runtime_error("hydrogenic_moment: radial grid not converged");
  }
  std::lock_guard<std::mutex> lock(mtx);
  memo.emplace(key, fine);
  return fine;
}

double p2_angular(int l, int Lambda, int Lambdap) {
  if (l < 0 || std::abs(Lambda) > l || std::abs(Lambdap) > l)
    throw std::invalid_argument("p2_angular: |Lambda| <= l required");
  if (Lambda != Lambdap) return 0.0;
  if (l == 0) return 0.0;
  // <l L|P2|l L> = <l0 20|l0><lL 20|lL>
  return angular::clebsch_gordan_x2(2 * l, 0, 4, 0, 2 * l, 0) *
         angular::clebsch_gordan_x2(2 * l, 2 * Lambda, 4, 0, 2 * l, 2 * Lambda);
}

LongRangeK k_body_longrange(int n, int l, const MultipoleParams& p, const LongRangeOptions& opt) {
  if (l < 1 || (l < 2 && !opt.allow_p_wave))
    throw std::invalid_argument("k_body_longrange: l >= 2 required (core penetration)");
  if (n <= l) throw std::invalid_argument("k_body_longrange: need n > l");
  const double r3 = hydrogenic_moment(n, l, -3, opt.grid);
  const double r4 = hydrogenic_moment(n, l, -4, opt.grid);
  const double scale = opt.norm == Normalization::Energy ? double(n) * n * n : 1.0;
  LongRangeK out;
  out.K = Eigen::MatrixXd::Zero(2 * l + 1, 2 * l + 1);
  for (int L = -l; L <= l; ++L) {
    const double a = p2_angular(l, L, L);
    const double v = -p.Q2 * r3 * a - 0.5 * p.alpha_iso * r4 - p.gamma_aniso / 3.0 * r4 * a;
    out.K(L + l, L + l) = -kPi * scale * v;
  }
  out.large = out.K.cwiseAbs().maxCoeff() > 0.3;
  return out;
}

}  // namespace trimqdt::lr
