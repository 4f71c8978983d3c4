#include "trimqdt/qdefect.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "trimqdt/textio.hpp"
#include "trimqdt/units.hpp"

namespace trimqdt::qd {

int lambda_index(int Lambda) {
  switch (Lambda) {
    case 0: return 0;
    case 1: return 1;
    case -1: return 2;
  }
  throw std::invalid_argument("lambda_index: p-wave Lambda in {-1,0,1}");
}

int index_lambda(int i) {
  static const int l[3] = {0, 1, -1};
  if (i < 0 || i > 2) throw std::invalid_argument("index_lambda: index in 0..2");
  return l[i];
}

MuMatrix mu_body(const geom::SymCoords& q, const MuSurfaceParams& p, PhaseConvention conv) {
  const double Q = q.Q1, r2 = q.rho * q.rho;
  const double m00 = p.mu00_eq + p.shift00 + p.a1 * Q + p.a2 * Q * Q + p.a3 * Q * Q * Q + p.a4 * r2;
  const double m11 = p.mu11_eq + p.shift11 + p.b1 * Q + p.b2 * Q * Q + p.b3 * Q * Q * Q + p.delta * r2;
  const double off = p.lambda_jt * q.rho;
  MuMatrix m = MuMatrix::Zero();
  m(0, 0) = m00;
  m(1, 1) = m11;
  m(2, 2) = m11;
  m(1, 2) = off;
  m(2, 1) = off;
  if (conv == PhaseConvention::Rotated) m = phase_rotate(m, q.phi_p);
  return m;
}

std::pair<double, double> effective_nu(int n, const MuMatrix& mu) {
  if (n < 2) throw std::invalid_argument("effective_nu: n >= 2");
  const double m11 = mu(1, 1).real();
  const double a = std::abs(mu(1, 2));
  return {n - (m11 + a), n - (m11 - a)};
}

std::pair<double, double> effective_nu_eigen(int n, const MuMatrix& mu) {
  Eigen::Matrix2cd b = mu.block<2, 2>(1, 1);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(b);
  const auto e = es.eigenvalues();
  return {n - e(1), n - e(0)};
}

Eigen::MatrixXcd phase_rotate(const Eigen::MatrixXcd& K, double phi, const std::vector<int>& lambdas) {
  if (static_cast<Eigen::Index>(lambdas.size()) != K.rows() || K.rows() != K.cols())
    throw std::invalid_argument("phase_rotate: Lambda list does not match the matrix");
  Eigen::MatrixXcd out = K;
  for (int i = 0; i < K.rows(); ++i)
    for (int j = 0; j < K.cols(); ++j)
      out(i, j) *= std::polar(1.0, 0.5 * (lambdas[i] - lambdas[j]) * phi);
  return out;
}

MuMatrix phase_rotate(const MuMatrix& K, double phi) {
  Eigen::MatrixXcd k = K;
  return phase_rotate(k, phi, {0, 1, -1});
}

KFromMu k_from_mu(const Eigen::MatrixXd& mu, double pole_tol) {
  if (mu.rows() != mu.cols()) throw std::invalid_argument("k_from_mu: square matrix required");
  if ((mu - mu.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, mu.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("k_from_mu: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mu);
  KFromMu r;
  r.defects = es.eigenvalues();
  r.U = es.eigenvectors();
  Eigen::VectorXd t(r.defects.size());
  for (int i = 0; i < t.size(); ++i) {
    const double c = std::cos(kPi * r.defects(i));
    if (std::abs(c) < pole_tol) r.pole = true;
    t(i) = std::sin(kPi * r.defects(i)) / c;
  }
  r.K = r.U * t.asDiagonal() * r.U.transpose();
  return r;
}

Eigen::MatrixXcd k_from_mu(const Eigen::MatrixXcd& mu, bool* pole, double pole_tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(mu);
  const auto e = es.eigenvalues();
  Eigen::VectorXcd t(e.size());
  bool p = false;
  for (int i = 0; i < e.size(); ++i) {
    const double c = std::cos(kPi * e(i));
    if (std::abs(c) < pole_tol) p = true;
    t(i) = std::sin(kPi * e(i)) / c;
  }
  if (pole) *pole = p;
  return es.eigenvectors() * t.asDiagonal() * es.eigenvectors().adjoint();
}

Eigen::MatrixXd mu_from_k(const Eigen::MatrixXd& K) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
  Eigen::VectorXd d(K.rows());
  for (int i = 0; i < d.size(); ++i) d(i) = split_defect(std::atan(es.eigenvalues()(i)) / kPi).frac;
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

Defect split_defect(double mu) {
  Defect d;
  d.branch = static_cast<int>(std::floor(mu));
  d.frac = mu - d.branch;
  if (d.frac >= 1.0) {
    d.frac -= 1.0;
    d.branch += 1;
  }
  return d;
}

namespace {
const char* kKeys[] = {"mu00_eq", "mu11_eq", "shift00", "shift11", "a1", "a2", "a3",
                       "a4",      "b1",      "b2",      "b3",      "delta", "lambda_jt"};

double* field(MuSurfaceParams& p, const std::string& k) {
  if (k == "mu00_eq") return &p.mu00_eq;
  if (k == "mu11_eq") return &p.mu11_eq;
  if (k == "shift00") return &p.shift00;
  if (k == "shift11") return &p.shift11;
  if (k == "a1") return &p.a1;
  if (k == "a2") return &p.a2;
  if (k == "a3") return &p.a3;
  if (k == "a4") return &p.a4;
  if (k == "b1") return &p.b1;
  if (k == "b2") return &p.b2;
  if (k == "b3") return &p.b3;
  if (k == "delta") return &p.delta;
  if (k == "lambda_jt") return &p.lambda_jt;
  return nullptr;
}
}  // namespace

MuSurfaceParams load_params(const std::string& path) {
  const auto kv = textio::read_key_values(path);
  MuSurfaceParams p;
  for (const auto& [k, v] : kv.values) {
    double* f = field(p, k);
    if (!f) throw std::runtime_error(path + ": unknown defect parameter '" + k + "'");
    *f = textio::to_double(v, path + ": " + k);
  }
  for (const char* k : kKeys)
    if (!kv.values.count(k)) throw std::runtime_error(path + ": missing defect parameter '" + std::string(k) + "'");
  return p;
}

std::string format_params(const MuSurfaceParams& p) {
  std::ostringstream os;
  MuSurfaceParams q = p;
  for (const char* k : kKeys) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, *field(q, k));
    os << k << " = " << std::string(buf, res.ptr) << "\n";
  }
  return os.str();
}

std::vector<FitSample> load_samples(const std::string& path) {
  const auto rows = textio::read_numeric_rows(path);
  std::vector<FitSample> out;
  for (const auto& r : rows.rows) {
    if (r.values.size() != 5 && r.values.size() != 6)
      throw std::runtime_error(path + ":" + std::to_string(r.line) + ": expected 'Q1 rho phi nu1 nu2 [nu0]'");
    FitSample s;
    s.Q1 = r.values[0];
    s.rho = r.values[1];
    s.phi = r.values[2];
    s.nu1 = std::min(r.values[3], r.values[4]);
    s.nu2 = std::max(r.values[3], r.values[4]);
    if (s.rho < 0) throw std::runtime_error(path + ":" + std::to_string(r.line) + ": rho must be >= 0");
    if (r.values.size() == 6) {
      s.has_nu0 = true;
      s.nu0 = r.values[5];
    }
    out.push_back(s);
  }
  return out;
}

FitResult fit_defects(const std::vector<FitSample>& samples, int n, const MuSurfaceParams& base) {
  const int ns = static_cast<int>(samples.size());
  if (ns < 6) throw std::invalid_argument("fit_defects: at least 6 samples required");
  FitResult r;
  r.params = base;
  // mu11 = c0 + b1 Q + b2 Q^2 + b3 Q^3 + delta rho^2
  Eigen::MatrixXd A(ns, 5);
  Eigen::VectorXd y(ns), d(ns);
  for (int i = 0; i < ns; ++i) {
    const auto& s = samples[i];
    A.row(i) << 1.0, s.Q1, s.Q1 * s.Q1, s.Q1 * s.Q1 * s.Q1, s.rho * s.rho;
    y(i) = n - 0.5 * (s.nu1 + s.nu2);
    d(i) = 0.5 * (s.nu2 - s.nu1);
  }
  const Eigen::VectorXd c = A.colPivHouseholderQr().solve(y);
  r.params.mu11_eq = c(0);
  r.params.b1 = c(1);
  r.params.b2 = c(2);
  r.params.b3 = c(3);
  r.params.delta = c(4);
  // |mu1-1| = lambda rho
  double num = 0.0, den = 0.0;
  for (int i = 0; i < ns; ++i) {
    num += samples[i].rho * d(i);
    den += samples[i].rho * samples[i].rho;
  }
  r.params.lambda_jt = den > 0.0 ? num / den : 0.0;
  double ss = 0.0;
  int nv = 0;
  for (int i = 0; i < ns; ++i) {
    geom::SymCoords q;
    q.Q1 = samples[i].Q1;
    q.rho = samples[i].rho;
    q.phi_p = samples[i].phi;
    MuSurfaceParams noshift = r.params;
    noshift.shift00 = noshift.shift11 = 0.0;
    const auto nu = effective_nu(n, mu_body(q, noshift));
    ss += std::pow(nu.first - samples[i].nu1, 2) + std::pow(nu.second - samples[i].nu2, 2);
    nv += 2;
  }
  std::vector<int> with0;
  for (int i = 0; i < ns; ++i)
    if (samples[i].has_nu0) with0.push_back(i);
  if (with0.size() >= 5) {
    const int m = static_cast<int>(with0.size());
    Eigen::MatrixXd B(m, 5);
    Eigen::VectorXd z(m);
    for (int k = 0; k < m; ++k) {
      const auto& s = samples[with0[k]];
      B.row(k) << 1.0, s.Q1, s.Q1 * s.Q1, s.Q1 * s.Q1 * s.Q1, s.rho * s.rho;
      z(k) = n - s.nu0;
    }
    const Eigen::VectorXd a = B.colPivHouseholderQr().solve(z);
    r.params.mu00_eq = a(0);
    r.params.a1 = a(1);
    r.params.a2 = a(2);
    r.params.a3 = a(3);
    r.params.a4 = a(4);
    r.fitted_mu00 = true;
    const Eigen::VectorXd res = B * a - z;
    ss += res.squaredNorm();
    nv += m;
  }
  r.n_values = nv;
  r.rms = std::sqrt(ss / nv);
  return r;
}

}  // namespace trimqdt::qd
