#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "brute_force.hpp"
#include "oracles.hpp"
#include "trimqdt/frametrans.hpp"
#include "trimqdt/ionsolver.hpp"
#include "trimqdt/potential.hpp"
#include "trimqdt/units.hpp"

using namespace trimqdt;
using namespace trimqdt::ft;

namespace {

std::vector<Threshold> toy_thresholds(int Nplus_max) {
  std::vector<Threshold> t;
  for (int Np = 0; Np <= Nplus_max; ++Np)
    for (int K = 0; K <= Np; ++K) t.push_back({Np, K, 1e-4 * (Np * (Np + 1) * 40.0 - 20.0 * K * K)});
  return t;
}

Eigen::MatrixXcd diag_body(int l, const std::vector<double>& d) {
  Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(2 * l + 1, 2 * l + 1);
  for (int i = 0; i < 2 * l + 1; ++i) b(i, i) = d[i];
  return b;
}

ion::IonSolverOptions tiny_ion() {
  ion::IonSolverOptions o;
  o.angular.n_spline = 9;
  o.angular.twice_m2_max = 6;
  o.angular.n_phi = 48;
  o.dvr_points = 5;
  o.R_min = 1.2;
  o.R_max = 3.6;
  o.n_chan = 3;
  o.n_states = 2;
  return o;
}

}  // namespace

TEST_CASE("tilde basis") {
  auto f = ground_band_function(3, 2);
  REQUIRE(f.has_value());
  auto t0 = tilde_basis(*f, 0, 3);
  double s = 0.0;
  for (auto& t : t0) {
    CHECK(t.Lambda == 0);
    CHECK(t.K == t.p.K);
    s += t.coef * t.coef;
  }
  CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(tilde_basis(*f, 0, 2).empty());

  // coefficient for (l, Lambda, N+, K+) = (1, 1, 1, 0) is (-1)^(l-Lambda) <l,-Lambda; N, K|N+ K+>
  auto g = ground_band_function(1, 0);
  REQUIRE(g.has_value());
  CHECK(g->one_term);
  for (int N = 0; N <= 2; ++N)
    for (auto& t : tilde_basis(*g, 1, N))
      if (t.Lambda == 1)
        CHECK(t.coef == doctest::Approx(angular::clebsch_gordan(1, -1, N, 1, 1, 0)).epsilon(1e-14));
  CHECK_FALSE(ground_band_function(2, 0).has_value());
  CHECK_FALSE(ground_band_function(0, 0).has_value());
}

TEST_CASE("rotational frame unitarity") {
  double worst = 0.0;
  for (int l = 0; l <= 3; ++l)
    for (int N = 0; N <= 5; ++N)
      for (int K = -6; K <= 6; ++K) {
        auto f = rotational_frame(N, l, K);
        if (f.U.size() == 0) continue;
        CHECK(f.U.rows() == f.U.cols());
        worst = std::max(worst, unitarity_check(f.U));
        if (l == 0) CHECK(unitarity_check(f.U) == 0.0);
      }
  CHECK(worst <= 1e-10);
  auto cut = rotational_frame(3, 2, 0, 2);
  CHECK(unitarity_check(cut.U) > 1e-3);
}

TEST_CASE("rotational-only transformation") {
  const auto thr = toy_thresholds(4);
  // isotropic body matrix
  auto iso = transform_rotational_only(diag_body(2, {0.3, 0.3, 0.3, 0.3, 0.3}), 2, 2, thr, 4);
  for (auto& b : iso) {
    CHECK((b.K - 0.3 * Eigen::MatrixXd::Identity(b.K.rows(), b.K.cols())).cwiseAbs().maxCoeff() < 1e-14);
  }
  // N = 0, l = 2 couples only to N+ = 2
  for (auto& c : ground_band_channels(0, 2, thr, 4)) CHECK(c.Nplus == 2);

  // identity stays identity; trace preserved over complete K+ sets
  const std::vector<double> d{0.05, -0.02, 0.01, -0.02, 0.05};
  for (int N = 0; N <= 3; ++N) {
    auto ch = ground_band_channels(N, 2, toy_thresholds(N + 2), N + 2);
    auto M = lab_matrix_rotational(diag_body(2, d), ch);
    CHECK((M - M.transpose()).cwiseAbs().maxCoeff() < 1e-15);
    auto I = lab_matrix_rotational(diag_body(2, {1, 1, 1, 1, 1}), ch);
    CHECK((I - Eigen::MatrixXd::Identity(I.rows(), I.cols())).cwiseAbs().maxCoeff() < 1e-13);
    // every lab channel is a Lambda-superposition, so the diagonal lies in the body range
    for (int i = 0; i < M.rows(); ++i) {
      CHECK(M(i, i) >= -0.02 - 1e-14);
      CHECK(M(i, i) <= 0.05 + 1e-14);
    }
  }

  // no couplings across blocks
  auto blocks = transform_rotational_only(diag_body(2, d), 2, 3, thr, 4);
  CHECK(blocks.size() > 1);
  for (auto& b : blocks)
    for (auto& c : b.channels) {
      CHECK(c.N == 3);
      CHECK(c.spin == b.spin);
      CHECK(c.parity == b.parity);
    }
  CHECK_THROWS(ground_band_channels(2, 2, toy_thresholds(2), 4));
}

TEST_CASE("trace equals degeneracy-weighted body eigenvalues") {
  // sum over K+ of the rotational frames covers every (N+, Lambda) pair once
  const int N = 2, l = 2;
  const std::vector<double> d{0.05, -0.02, 0.01, -0.02, 0.05};
  double lab = 0.0, body = 0.0;
  for (int K = -(N + l); K <= N + l; ++K) {
    auto f = rotational_frame(N, l, K);
    if (f.U.size() == 0) continue;
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(f.Lambda.size(), f.Lambda.size());
    for (size_t a = 0; a < f.Lambda.size(); ++a) B(a, a) = d[f.Lambda[a] + l];
    lab += (f.U * B * f.U.transpose()).trace();
    body += B.trace();
  }
  CHECK(lab == doctest::Approx(body).epsilon(1e-13));
}

TEST_CASE("block splitting") {
  std::vector<LabChannel> ch(4);
  for (int i = 0; i < 4; ++i) {
    ch[i].N = 1;
    ch[i].Nplus = i;
    ch[i].threshold = 0.01 * i;
  }
  ch[3].spin = 1;
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(4, 4);
  M(0, 2) = M(2, 0) = 0.1;
  auto b = split_blocks(ch, M);
  REQUIRE(b.size() == 3);
  CHECK(b[0].channels.size() == 2);
  CHECK(b[0].K(0, 1) == 0.1);
  CHECK(b[2].spin == 1);
}

TEST_CASE("rovibrational transformation against 5D quadrature") {
  auto V = toy_surface();
  const auto o = tiny_ion();
  std::vector<ion::BlockSolution> sols;
  for (ion::Block b : {ion::Block{0, 1, +1}, ion::Block{1, 1, -1}, ion::Block{1, 1, +1}, ion::Block{2, 1, +1}})
    sols.push_back(ion::solve_block(b, V.get(), o));
  std::vector<IonChannelState> st;
  for (auto& s : sols) {
    REQUIRE_FALSE(s.states.empty());
    st.push_back({&s, 0, s.states[0].energy, s.states[0].label(), s.states[0].G});
  }

  qd::MuSurfaceParams p;
  p.a1 = 0.3, p.a2 = -0.2, p.a4 = 0.1;
  p.b1 = 0.25, p.b3 = 0.05, p.delta = -0.15;
  p.lambda_jt = 0.2;
  auto mu = mu_surface_function(p);

  RovibTransformOptions to;
  to.l = 1;
  to.N = 1;
  auto ana = transform_mu(mu, st, to);
  auto bf = oracle::brute_force_lab(mu, st, 1, 1, 0);
  CHECK(bf.imag().cwiseAbs().maxCoeff() < 1e-10);
  CHECK((ana.M - bf.real()).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(ana.max_imag < 1e-12);
  CHECK((ana.M - ana.M.transpose()).cwiseAbs().maxCoeff() == 0.0);
  // lab projection m does not matter
  auto bf1 = oracle::brute_force_lab(mu, st, 1, 1, 1);
  CHECK((bf1 - bf).cwiseAbs().maxCoeff() < 1e-8);

  // the same rotated-frame surface gives the same matrix
  auto rot = transform_mu(mu_surface_function(p, qd::PhaseConvention::Rotated), st, to);
  CHECK((rot.M - ana.M).cwiseAbs().maxCoeff() < 1e-12);

  // unit defect matrix: lab matrix is the overlap of orthonormal ion states
  auto one = transform_mu([](const geom::HyperPoint&) { return qd::MuMatrix::Identity().eval(); }, st, to);
  CHECK((one.M - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-8);

  // constant defects: diagonal stays within the body eigenvalue range
  qd::MuSurfaceParams c;
  auto cm = transform_mu(mu_surface_function(c), st, to);
  for (int i = 0; i < 4; ++i) {
    CHECK(cm.M(i, i) >= c.mu00_eq + c.shift00 - 1e-10);
    CHECK(cm.M(i, i) <= c.mu11_eq + c.shift11 + 1e-10);
  }

  // thread count does not change the result
  to.threads = 4;
  auto par = transform_mu(mu, st, to);
  CHECK((par.M - ana.M).cwiseAbs().maxCoeff() < 1e-13);

  // mismatched grids are rejected
  auto o2 = tiny_ion();
  o2.dvr_points = 6;
  auto other = ion::solve_block({0, 1, +1}, V.get(), o2);
  std::vector<IonChannelState> bad{st[0], {&other, 0, 0.0, "x", 0}};
  CHECK_THROWS(transform_mu(mu, bad, to));
}
