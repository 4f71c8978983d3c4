#include "trimqdt/hyperangular.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "trimqdt/angular.hpp"
#include "trimqdt/units.hpp"

namespace trimqdt::ion {

namespace {

struct Term {
  ionbasis::Primitive p;
  double c;
};

std::vector<Term> primitive_terms(const ionbasis::SymBasisFunction& b) {
  std::vector<Term> out;
  for (const auto& t : ionbasis::expand(b).terms) out.push_back({t.p, t.phase.real()});
  return out;
}

// dst(j*n+s, j'*n+s') += A(j,j') * B(s,s') over the spline band
void add_kron(Eigen::MatrixXd& dst, const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, int order) {
  const int ns = static_cast<int>(A.rows());
  const int nl = static_cast<int>(B.rows());
  for (int j = 0; j < ns; ++j)
    for (int jp = std::max(0, j - order + 1); jp < std::min(ns, j + order); ++jp) {
      const double a = A(j, jp);
      if (a == 0.0) continue;
      dst.block(j * nl, jp * nl, nl, nl).noalias() += a * B;
    }
}

}  // namespace

HyperangularProblem::HyperangularProblem(const Block& block, const HyperangularOptions& opt)
    : block_(block),
      opt_(opt),
      mass_(opt.mass > 0.0 ? opt.mass : kHydrogenMass / std::sqrt(3.0)),
      spl_(opt.n_spline, opt.order, 0.0, 0.5 * kPi),
      quad_(make_spline_quadrature(spl_, opt.quad_points)) {
  if (opt.n_phi < 8) throw std::invalid_argument("hyperangular: n_phi too small");
  labels_ = ionbasis::enumerate_basis(block.N, 0, block.spin ? 1 : 0, block.parity, opt.twice_m2_max, 1);
  if (opt.include_reference && block.N % 2 == 0 && block.spin == 0 && block.parity == 1) {
    ionbasis::SymBasisFunction ref;
    ref.N = block.N;
    ref.one_term = true;
    labels_.insert(labels_.begin(), ref);
  }
  const int nl = n_labels();
  const int ns = spl_.count();
  const int N = block.N;
  spline_overlap_ = spline_matrix([](double t) { return std::sin(2 * t); });
  if (nl == 0) {
    P_.resize(0, 0);
    return;
  }

  // label-space angular matrices
  const Eigen::MatrixXd jx = angular::jx2_matrix(N), jy = angular::jy2_matrix(N);
  Eigen::MatrixXd JX = Eigen::MatrixXd::Zero(nl, nl), JY = JX, KK = JX;
  std::vector<std::vector<Term>> terms(nl);
  for (int s = 0; s < nl; ++s) terms[s] = primitive_terms(labels_[s]);
  std::vector<int> dlist;
  for (int s = 0; s < nl; ++s)
    for (int t = 0; t < nl; ++t)
      for (const auto& a : terms[s])
        for (const auto& b : terms[t]) {
          if (a.p.twice_m2 == b.p.twice_m2 && a.p.g == b.p.g) {
            JX(s, t) += a.c * b.c * jx(a.p.K + N, b.p.K + N);
            JY(s, t) += a.c * b.c * jy(a.p.K + N, b.p.K + N);
          }
          if (a.p.K == b.p.K && a.p.g == b.p.g) {
            const int d = std::abs(a.p.twice_m2 - b.p.twice_m2) / 2;
            auto it = std::find(dlist.begin(), dlist.end(), d);
            if (it == dlist.end()) {
              dlist.push_back(d);
              vcoef_.push_back(Eigen::MatrixXd::Zero(nl, nl));
              it = dlist.end() - 1;
            }
            vcoef_[it - dlist.begin()](s, t) += a.c * b.c;
          }
        }
  for (int s = 0; s < nl; ++s) KK(s, s) = labels_[s].K * labels_[s].K;
  deltas_ = dlist;

  // spline-space integrals, weight sin(2 theta)
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(ns, ns);
  for (std::size_t q = 0; q < quad_.x.size(); ++q) {
    const double w = quad_.w[q] * std::sin(2 * quad_.x[q]);
    const int f = quad_.first[q];
    for (int a = 0; a < spl_.order(); ++a)
      for (int b = 0; b < spl_.order(); ++b) D(f + a, f + b) += w * quad_.deriv[q][a] * quad_.deriv[q][b];
  }
  const Eigen::MatrixXd Ix = spline_matrix([](double t) { return std::sin(2 * t) / (1 - std::sin(t)); }, 1);
  const Eigen::MatrixXd Iy = spline_matrix([](double t) { return std::sin(2 * t) / (1 + std::sin(t)); });

  const int nf = ns * nl;
  Eigen::MatrixXd Sf = Eigen::MatrixXd::Zero(nf, nf), Kf = Eigen::MatrixXd::Zero(nf, nf);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(nl, nl);
  add_kron(Sf, spline_overlap_, I, spl_.order());
  add_kron(Kf, 4.0 * D, I, spl_.order());
  add_kron(Kf, 2.0 * Ix, JX, spl_.order());
  add_kron(Kf, 2.0 * Iy, JY, spl_.order());
  add_kron(Kf, spline_overlap_, KK + 3.75 * I, spl_.order());
  for (int s = 0; s < nl; ++s) {
    const double m2 = labels_[s].twice_m2 * 0.5;
    const double K = labels_[s].K;
    std::function<double(double)> cor;
    if (opt.coriolis == CoriolisForm::Standard) {
      cor = [m2, K](double t) {
        const double c = m2 + 0.5 * K * std::cos(t);
        return std::sin(2 * t) * c * c / (std::sin(t) * std::sin(t));
      };
    } else {
      cor = [m2, K](double t) {
        const double c = m2 + std::cos(0.5 * K);
        return std::sin(2 * t) * c * c / (std::sin(t) * std::sin(t));
      };
    }
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(nl, nl);
    B(s, s) = 1.0;
    add_kron(Kf, 4.0 * spline_matrix(cor), B, spl_.order());
  }

  // boundary-adapted reduced basis
  std::vector<Eigen::Triplet<double>> trip;
  int col = 0;
  for (int j = 0; j < ns; ++j) {
    if (j == ns - 1) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(JX);
      const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
      for (int k = 0; k < nl; ++k) {
        if (std::abs(es.eigenvalues()(k)) > 1e-10 * scale) continue;
        Eigen::VectorXd v = es.eigenvectors().col(k);
        int big = 0;
        v.cwiseAbs().maxCoeff(&big);
        if (v(big) < 0) v = -v;
        for (int s = 0; s < nl; ++s)
          if (std::abs(v(s)) > 1e-14) trip.emplace_back(j * nl + s, col, v(s));
        ++col;
      }
      continue;
    }
    for (int s = 0; s < nl; ++s) {
      if (j == 0) {
        const bool regular = opt.coriolis == CoriolisForm::Standard &&
                             labels_[s].twice_m2 + labels_[s].K == 0;
        if (!regular) continue;
      }
      trip.emplace_back(j * nl + s, col, 1.0);
      ++col;
    }
  }
  P_.resize(nf, col);
  P_.setFromTriplets(trip.begin(), trip.end());
  S_ = P_.transpose() * (Sf * P_);
  Kr_ = P_.transpose() * (Kf * P_);
  S_ = 0.5 * (S_ + S_.transpose()).eval();
  Kr_ = 0.5 * (Kr_ + Kr_.transpose()).eval();
}

Eigen::MatrixXd HyperangularProblem::spline_matrix(const std::function<double(double)>& weight,
                                                   int skip_last) const {
  const int ns = spl_.count();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(ns, ns);
  for (std::size_t q = 0; q < quad_.x.size(); ++q) {
    const double w = quad_.w[q] * weight(quad_.x[q]);
    const int f = quad_.first[q];
    for (int a = 0; a < spl_.order(); ++a)
      for (int b = 0; b < spl_.order(); ++b) M(f + a, f + b) += w * quad_.value[q][a] * quad_.value[q][b];
  }
  if (skip_last) {
    M.row(ns - 1).setZero();
    M.col(ns - 1).setZero();
  }
  return M;
}

Eigen::MatrixXd HyperangularProblem::potential_matrix(double R, const PotentialSurface& V) const {
  const int ns = spl_.count(), nl = n_labels();
  const int nphi = opt_.n_phi;
  const std::size_t nq = quad_.x.size();
  const std::size_t nd = deltas_.size();
  // Fourier components V_d(theta_q) = (1/2pi) int V cos(d phi) dphi
  Eigen::MatrixXd vd = Eigen::MatrixXd::Zero(nq, nd);
  for (std::size_t q = 0; q < nq; ++q) {
    for (int k = 0; k < nphi; ++k) {
      const double phi = 2.0 * kPi * k / nphi;
      const double v = V.at({R, quad_.x[q], phi});
      if (!std::isfinite(v))
        throw std::runtime_error("hyperangular: potential not finite at R=" + std::to_string(R));
      for (std::size_t d = 0; d < nd; ++d) vd(q, d) += v * std::cos(deltas_[d] * phi) / nphi;
    }
  }
  Eigen::MatrixXd Vf = Eigen::MatrixXd::Zero(ns * nl, ns * nl);
  for (std::size_t d = 0; d < nd; ++d) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(ns, ns);
    for (std::size_t q = 0; q < nq; ++q) {
      const double w = quad_.w[q] * std::sin(2 * quad_.x[q]) * vd(q, d);
      const int f = quad_.first[q];
      for (int a = 0; a < spl_.order(); ++a)
        for (int b = 0; b < spl_.order(); ++b) A(f + a, f + b) += w * quad_.value[q][a] * quad_.value[q][b];
    }
    add_kron(Vf, A, vcoef_[d], spl_.order());
  }
  Eigen::MatrixXd out = P_.transpose() * (Vf * P_);
  return 0.5 * (out + out.transpose());
}

Eigen::MatrixXd HyperangularProblem::matrix(double R, const PotentialSurface* V) const {
  if (!(R > 0.0)) throw std::invalid_argument("hyperangular: R must be positive");
  Eigen::MatrixXd H = Kr_ / (2.0 * mass_ * R * R);
  if (V) H += potential_matrix(R, *V);
  return H;
}

ChannelSet HyperangularProblem::solve(double R, const PotentialSurface* V, int n_chan) const {
  ChannelSet cs;
  cs.R = R;
  if (dim() == 0) return cs;
  const Eigen::MatrixXd H = matrix(R, V);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(H, S_);
  if (es.info() != Eigen::Success) throw std::runtime_error("hyperangular: eigensolver failed");
  const int n = std::min(n_chan, dim());
  cs.U = es.eigenvalues().head(n);
  cs.a = es.eigenvectors().leftCols(n);
  for (int k = 0; k < n; ++k) {
    int big = 0;
    cs.a.col(k).cwiseAbs().maxCoeff(&big);
    if (cs.a(big, k) < 0) cs.a.col(k) *= -1.0;
  }
  return cs;
}

std::vector<double> HyperangularProblem::label_weights(const Eigen::VectorXd& a) const {
  const int ns = spl_.count(), nl = n_labels();
  const Eigen::VectorXd full = P_ * a;
  std::vector<double> w(nl, 0.0);
  for (int s = 0; s < nl; ++s) {
    Eigen::VectorXd c(ns);
    for (int j = 0; j < ns; ++j) c(j) = full(j * nl + s);
    w[s] = c.dot(spline_overlap_ * c);
  }
  return w;
}

std::vector<ChannelSet> solve_on_grid(const HyperangularProblem& prob, const std::vector<double>& R,
                                      const PotentialSurface* V, int n_chan, int threads) {
  std::vector<ChannelSet> out(R.size());
  threads = std::max(1, threads);
  if (threads == 1 || R.size() < 2) {
    for (std::size_t i = 0; i < R.size(); ++i) out[i] = prob.solve(R[i], V, n_chan);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = t; i < R.size(); i += threads) out[i] = prob.solve(R[i], V, n_chan);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  for (std::size_t i = 1; i < out.size(); ++i) {
    const Eigen::MatrixXd ov = out[i].a.transpose() * prob.overlap() * out[i - 1].a;
    for (int k = 0; k < out[i].a.cols() && k < out[i - 1].a.cols(); ++k)
      if (ov(k, k) < 0) out[i].a.col(k) *= -1.0;
  }
  return out;
}

std::vector<Block> nonempty_blocks(int N_max, int twice_m2_max) {
  std::vector<Block> out;
  for (int N = 0; N <= N_max; ++N)
    for (int spin = 0; spin <= 1; ++spin)
      for (int parity : {1, -1}) {
        if (!ionbasis::enumerate_basis(N, 0, spin, parity, twice_m2_max, 1).empty())
          out.push_back({N, spin, parity});
      }
  return out;
}

}  // namespace trimqdt::ion
