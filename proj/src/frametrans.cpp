#include "trimqdt/frametrans.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "trimqdt/angular.hpp"
#include "trimqdt/bspline.hpp"
#include "trimqdt/units.hpp"

namespace trimqdt::ft {

std::vector<TildeTerm> tilde_basis(const ionbasis::SymBasisFunction& b, int l, int N) {
  if (l < 0 || N < 0) throw std::invalid_argument("tilde_basis: negative l or N");
  std::vector<TildeTerm> out;
  if (N < std::abs(b.N - l) || N > b.N + l) return out;
  for (const auto& t : ionbasis::expand(b).terms) {
    const double c = t.phase.real();
    for (int L = -l; L <= l; ++L) {
      const int K = t.p.K + L;
      if (std::abs(K) > N) continue;
      const double T = angular::tilde_coefficient(b.N, t.p.K, l, L, N);
      if (T == 0.0) continue;
      out.push_back({t.p, L, K, c * T});
    }
  }
  return out;
}

RotFrame rotational_frame(int N, int l, int Kplus, int Nplus_max) {
  RotFrame f;
  for (int Np = std::abs(N - l); Np <= N + l; ++Np)
    if (Np >= std::abs(Kplus) && (Nplus_max < 0 || Np <= Nplus_max)) f.Nplus.push_back(Np);
  for (int L = -l; L <= l; ++L)
    if (std::abs(Kplus + L) <= N) f.Lambda.push_back(L);
  f.U = Eigen::MatrixXd::Zero(f.Nplus.size(), f.Lambda.size());
  for (std::size_t i = 0; i < f.Nplus.size(); ++i)
    for (std::size_t j = 0; j < f.Lambda.size(); ++j)
      f.U(i, j) = angular::tilde_coefficient(f.Nplus[i], Kplus, l, f.Lambda[j], N);
  return f;
}

double unitarity_check(const Eigen::MatrixXd& U) {
  if (U.size() == 0) return 0.0;
  const Eigen::MatrixXd d = U.transpose() * U - Eigen::MatrixXd::Identity(U.cols(), U.cols());
  return d.cwiseAbs().maxCoeff();
}

std::string LabChannel::label() const {
  std::string s = "N+=" + std::to_string(Nplus);
  if (G >= 0) s += ",G=" + std::to_string(G);
  if (!vib.empty()) s += " " + vib;
  return s;
}

std::vector<LabK> split_blocks(const std::vector<LabChannel>& channels, const Eigen::MatrixXd& M, double tol) {
  const int n = static_cast<int>(channels.size());
  if (M.rows() != n || M.cols() != n) throw std::invalid_argument("split_blocks: size mismatch");
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  auto key = [&](int i) { return std::tuple(channels[i].N, channels[i].spin, channels[i].parity); };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (key(i) == key(j) && std::abs(M(i, j)) > tol) parent[find(i)] = find(j);
  std::map<std::tuple<int, int, int, int>, std::vector<int>> groups;
  for (int i = 0; i < n; ++i) {
    const auto [N, s, p] = key(i);
    groups[{N, s, p, find(i)}].push_back(i);
  }
  std::vector<LabK> out;
  for (const auto& [k, idx] : groups) {
    LabK b;
    b.N = std::get<0>(k);
    b.spin = std::get<1>(k);
    b.parity = std::get<2>(k);
    b.K.resize(idx.size(), idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a) {
      b.channels.push_back(channels[idx[a]]);
      for (std::size_t c = 0; c < idx.size(); ++c) b.K(a, c) = M(idx[a], idx[c]);
    }
    out.push_back(std::move(b));
  }
  // lowest threshold first
  std::stable_sort(out.begin(), out.end(), [](const LabK& a, const LabK& b) {
    if (a.spin != b.spin) return a.spin < b.spin;
    if (a.parity != b.parity) return a.parity > b.parity;
    return a.channels.front().threshold < b.channels.front().threshold;
  });
  return out;
}

std::optional<ionbasis::SymBasisFunction> ground_band_function(int Nplus, int Kplus) {
  if (Kplus < 0 || Kplus > Nplus) throw std::invalid_argument("ground_band_function: need 0 <= K+ <= N+");
  ionbasis::SymBasisFunction b;
  b.N = Nplus;
  b.K = Kplus;
  b.twice_m2 = -Kplus;
  b.parity = (Kplus % 2 == 0) ? 1 : -1;
  bool found = false;
  for (int g : {0, 1, -1})
    if (ionbasis::selection_ok(b.twice_m2, Kplus, g)) {
      b.g = g;
      found = true;
      break;
    }
  if (!found) return std::nullopt;
  if (Kplus == 0) {
    if (b.g != 0 || Nplus % 2 == 0) return std::nullopt;
    b.one_term = true;
  }
  return b;
}

std::vector<LabChannel> ground_band_channels(int N, int l, const std::vector<Threshold>& thr, int Nplus_max) {
  std::vector<LabChannel> out;
  for (int Np = std::abs(N - l); Np <= std::min(N + l, Nplus_max); ++Np)
    for (int Kp = 0; Kp <= Np; ++Kp) {
      const auto b = ground_band_function(Np, Kp);
      if (!b) continue;
      if (tilde_basis(*b, l, N).empty()) continue;
      auto it = std::find_if(thr.begin(), thr.end(), [&](const Threshold& t) { return t.Nplus == Np && t.G == Kp; });
      if (it == thr.end())
        throw std::runtime_error("no threshold for ground-band level (" + std::to_string(Np) + "," +
                                 std::to_string(Kp) + ")");
      LabChannel c;
      c.Nplus = Np;
      c.G = Kp;
      c.vib = "(" + std::to_string(Np) + "," + std::to_string(Kp) + "){0,0^0}";
      c.l = l;
      c.N = N;
      c.spin = ionbasis::spin_class(b->g);
      c.parity = b->parity;
      c.threshold = it->energy;
      out.push_back(c);
    }
  std::stable_sort(out.begin(), out.end(),
                   [](const LabChannel& a, const LabChannel& b) { return a.threshold < b.threshold; });
  return out;
}

Eigen::MatrixXd lab_matrix_rotational(const Eigen::MatrixXcd& body, const std::vector<LabChannel>& channels,
                                      double* max_imag) {
  const int n = static_cast<int>(channels.size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  if (n == 0) return M;
  const int l = channels.front().l;
  if (body.rows() != 2 * l + 1 || body.cols() != 2 * l + 1)
    throw std::invalid_argument("lab_matrix_rotational: body matrix must be (2l+1) square");
  std::vector<std::vector<TildeTerm>> terms(n);
  for (int i = 0; i < n; ++i) {
    if (channels[i].l != l) throw std::invalid_argument("lab_matrix_rotational: mixed l");
    const auto b = ground_band_function(channels[i].Nplus, channels[i].G);
    if (!b) throw std::invalid_argument("lab_matrix_rotational: forbidden channel");
    terms[i] = tilde_basis(*b, l, channels[i].N);
  }
  double imag = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (channels[i].N != channels[j].N) continue;
      std::complex<double> s = 0.0;
      for (const auto& a : terms[i])
        for (const auto& b : terms[j])
          if (a.p.twice_m2 == b.p.twice_m2 && a.p.g == b.p.g && a.K == b.K)
            s += a.coef * b.coef * body(a.Lambda + l, b.Lambda + l);
      M(i, j) = s.real();
      imag = std::max(imag, std::abs(s.imag()));
    }
  if (max_imag) *max_imag = imag;
  return 0.5 * (M + M.transpose());
}

std::vector<LabK> transform_rotational_only(const Eigen::MatrixXcd& body, int l, int N,
                                            const std::vector<Threshold>& thr, int Nplus_max) {
  const auto ch = ground_band_channels(N, l, thr, Nplus_max);
  return split_blocks(ch, lab_matrix_rotational(body, ch));
}

Eigen::MatrixXcd to_lambda_order(const qd::MuMatrix& mu) {
  Eigen::MatrixXcd out(3, 3);
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b) out(a + 1, b + 1) = mu(qd::lambda_index(a), qd::lambda_index(b));
  return out;
}

MuFunction mu_surface_function(const qd::MuSurfaceParams& p, qd::PhaseConvention conv,
                               const geom::GeomConstants& c) {
  return [p, conv, c](const geom::HyperPoint& h) {
    const auto q = geom::to_sym_coords(geom::to_interparticle(h), c);
    const qd::MuMatrix m = qd::mu_body(q, p, conv);
    // the transformation always works in the hyperspherical body frame
    return conv == qd::PhaseConvention::Rotated ? qd::phase_rotate(m, -q.phi_p) : m;
  };
}

namespace {

template <class F>
void parallel_for(int n, int threads, F f) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (int i = t; i < n; i += threads) f(i);
    });
  for (auto& th : pool) th.join();
}

// body-frame amplitude of one (primitive, K, Lambda) component on the (R, theta) nodes
struct Component {
  int twice_m2, g, K, Lambda;
  Eigen::VectorXd z;  // index n * nq + q
};

}  // namespace

RovibTransform transform_mu(const MuFunction& mu, const std::vector<IonChannelState>& states,
                            const RovibTransformOptions& opt) {
  RovibTransform out;
  const int ns_states = static_cast<int>(states.size());
  if (ns_states == 0) return out;
  if (opt.l != 1) throw std::invalid_argument("transform_mu: the defect matrix is a p-wave (l = 1) matrix");
  const int l = opt.l, N = opt.N;
  const auto* ref = states.front().sol;
  if (!ref) throw std::invalid_argument("transform_mu: null block solution");
  for (const auto& s : states) {
    if (!s.sol) throw std::invalid_argument("transform_mu: null block solution");
    const auto& a = s.sol->angular;
    const auto& b = ref->angular;
    if (s.sol->grid.R != ref->grid.R || a.n_spline != b.n_spline || a.order != b.order ||
        a.quad_points != b.quad_points)
      throw std::invalid_argument("transform_mu: channel-basis mismatch (grid or spline basis differs)");
    if (s.index < 0 || s.index >= static_cast<int>(s.sol->states.size()))
      throw std::invalid_argument("transform_mu: state index out of range");
  }
  const auto& ang = ref->angular;
  const SplineBasis spl(ang.n_spline, ang.order, 0.0, 0.5 * kPi);
  const SplineQuadrature quad = make_spline_quadrature(spl, ang.quad_points);
  const int nR = static_cast<int>(ref->grid.R.size());
  const int nq = static_cast<int>(quad.x.size());
  const int ord = spl.order();

  // channels and body-frame components
  std::vector<std::vector<Component>> comps(ns_states);
  for (int i = 0; i < ns_states; ++i) {
    const auto& sol = *states[i].sol;
    const auto& st = sol.states[states[i].index];
    LabChannel c;
    c.Nplus = sol.block.N;
    c.G = states[i].G;
    c.vib = states[i].label;
    c.l = l;
    c.N = N;
    c.spin = sol.block.spin;
    c.parity = sol.block.parity;
    c.threshold = states[i].threshold;
    out.channels.push_back(c);

    const int nl = static_cast<int>(sol.labels.size());
    const int nc = sol.svd.n_chan;
    // label amplitudes y(n, q, s)
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(nR * nq, nl);
    for (int n = 0; n < nR; ++n) {
      const Eigen::VectorXd x = sol.embedding * (sol.channels[n].a * st.c.segment(n * nc, nc));
      for (int q = 0; q < nq; ++q)
        for (int a = 0; a < ord; ++a) {
          const int j = quad.first[q] + a;
          y.row(n * nq + q) += quad.value[q][a] * x.segment(j * nl, nl).transpose();
        }
    }
    std::map<std::tuple<int, int, int, int>, Eigen::VectorXd> acc;
    for (int s = 0; s < nl; ++s) {
      auto lab = sol.labels[s];
      lab.N = sol.block.N;
      for (const auto& t : tilde_basis(lab, l, N)) {
        auto& z = acc[{t.p.twice_m2, t.p.g, t.K, t.Lambda}];
        if (z.size() == 0) z = Eigen::VectorXd::Zero(nR * nq);
        z += t.coef * y.col(s);
      }
    }
    for (auto& [k, z] : acc) comps[i].push_back({std::get<0>(k), std::get<1>(k), std::get<2>(k), std::get<3>(k), z});
  }

  // Fourier components of mu over phi for every needed m2 difference
  std::vector<int> deltas;
  for (int i = 0; i < ns_states; ++i)
    for (int j = 0; j < ns_states; ++j)
      for (const auto& a : comps[i])
        for (const auto& b : comps[j])
          if (a.g == b.g && a.K == b.K && (b.twice_m2 - a.twice_m2) % 2 == 0)
            deltas.push_back((b.twice_m2 - a.twice_m2) / 2);
  std::sort(deltas.begin(), deltas.end());
  deltas.erase(std::unique(deltas.begin(), deltas.end()), deltas.end());
  const int nd = static_cast<int>(deltas.size());
  const int nphi = ang.n_phi;
  // F[d][n*nq+q] in Lambda+1 order, times the (theta, R) weight
  std::vector<std::vector<Eigen::Matrix3cd>> F(nd, std::vector<Eigen::Matrix3cd>(nR * nq, Eigen::Matrix3cd::Zero()));
  parallel_for(nR, opt.threads, [&](int n) {
    const double R = ref->grid.R[n];
    for (int q = 0; q < nq; ++q) {
      const double w = quad.w[q] * std::sin(2.0 * quad.x[q]);
      for (int k = 0; k < nphi; ++k) {
        const double phi = 2.0 * kPi * k / nphi;
        const Eigen::MatrixXcd m = to_lambda_order(mu({R, quad.x[q], phi}));
        for (int d = 0; d < nd; ++d)
          F[d][n * nq + q] += (w / nphi) * std::polar(1.0, deltas[d] * phi) * m;
      }
    }
  });

  const int n = ns_states;
  out.M = Eigen::MatrixXd::Zero(n, n);
  std::vector<double> imag(n * n, 0.0);
  parallel_for(n * n, opt.threads, [&](int ij) {
    const int i = ij / n, j = ij % n;
    if (j < i) return;
    std::complex<double> s = 0.0;
    for (const auto& a : comps[i])
      for (const auto& b : comps[j]) {
        if (a.g != b.g || a.K != b.K || (b.twice_m2 - a.twice_m2) % 2 != 0) continue;
        const int d = static_cast<int>(std::lower_bound(deltas.begin(), deltas.end(), (b.twice_m2 - a.twice_m2) / 2) -
                                       deltas.begin());
        const auto& Fd = F[d];
        std::complex<double> t = 0.0;
        for (int p = 0; p < nR * nq; ++p) {
          const double zz = a.z[p] * b.z[p];
          if (zz != 0.0) t += zz * Fd[p](a.Lambda + 1, b.Lambda + 1);
        }
        s += t;
      }
    out.M(i, j) = out.M(j, i) = s.real();
    imag[ij] = std::abs(s.imag());
  });
  out.max_imag = *std::max_element(imag.begin(), imag.end());
  return out;
}

}  // namespace trimqdt::ft
