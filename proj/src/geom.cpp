#include "trimqdt/geom.hpp"

#include <cmath>
#include <stdexcept>

#include "trimqdt/units.hpp"

namespace trimqdt::geom {

namespace {
const double kFourthRoot3 = std::pow(3.0, 0.25);

double wrap_two_pi(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  return a;
}
}  // namespace

const double kBodyFrameD = std::sqrt(2.0) / std::pow(3.0, 0.25);

GeomConstants::GeomConstants() : m(kHydrogenMass) {}

double GeomConstants::R0() const { return kFourthRoot3 * r_equi; }

double GeomConstants::mu3b() const { return m / std::sqrt(3.0); }

bool is_valid(const HyperPoint& p) {
  return p.R > 0.0 && p.theta >= 0.0 && p.theta <= 0.5 * kPi && p.phi >= 0.0 &&
         p.phi < 2.0 * kPi;
}

InterparticleDistances to_interparticle(const HyperPoint& p) {
  const double scale = p.R / kFourthRoot3;
  const double s = std::sin(p.theta);
  auto dist = [&](double offset) {
    // clamp guards the collinear limit where the bracket touches zero
    return scale * std::sqrt(std::max(0.0, 1.0 + s * std::sin(p.phi + offset)));
  };
  return {dist(-kPi / 6.0), dist(-5.0 * kPi / 6.0), dist(kPi / 2.0)};
}

HyperPoint to_hyperspherical(const InterparticleDistances& d) {
  if (!(d.r12 > 0.0 && d.r23 > 0.0 && d.r31 > 0.0))
    throw std::invalid_argument("to_hyperspherical: distances must be positive");
  const double sum2 = d.r12 * d.r12 + d.r23 * d.r23 + d.r31 * d.r31;
  const double R = std::sqrt(sum2 / std::sqrt(3.0));
  const double k = std::sqrt(3.0) / (R * R);
  const double s12 = k * d.r12 * d.r12 - 1.0;  // sin(theta) sin(phi - pi/6)
  const double s31 = k * d.r31 * d.r31 - 1.0;  // sin(theta) cos(phi)
  const double ssin = (2.0 * s12 + s31) / std::sqrt(3.0);
  const double st = std::hypot(ssin, s31);
  if (st > 1.0 + 1e-12)
    throw std::invalid_argument("to_hyperspherical: triangle inequality violated");
  HyperPoint p;
  p.R = R;
  p.theta = std::asin(std::min(1.0, st));
  p.phi = st > 0.0 ? wrap_two_pi(std::atan2(ssin, s31)) : 0.0;
  return p;
}

SymCoords to_sym_coords(const InterparticleDistances& d, const GeomConstants& c) {
  const double dr1 = d.r23 - c.r_equi;
  const double dr2 = d.r31 - c.r_equi;
  const double dr3 = d.r12 - c.r_equi;
  SymCoords q;
  q.Q1 = c.f / std::sqrt(3.0) * (dr1 + dr2 + dr3);
  q.Qx = c.f / std::sqrt(3.0) * (2.0 * dr3 - dr2 - dr1);
  q.Qy = c.f * (dr1 - dr2);
  q.rho = std::hypot(q.Qx, q.Qy);
  q.phi_p = q.rho > 0.0 ? wrap_two_pi(std::atan2(q.Qy, q.Qx)) : 0.0;
  return q;
}

NuclearPositions nuclear_positions(const HyperPoint& p) {
  static const std::array<double, 3> vartheta = {5.0 * kPi / 6.0, -kPi / 2.0, kPi / 6.0};
  const double a = 2.0 / (3.0 * kBodyFrameD) * p.R;
  const double cx = std::cos(0.5 * p.theta - 0.25 * kPi);
  const double cy = std::sin(0.5 * p.theta - 0.25 * kPi);
  NuclearPositions out{};
  for (int i = 0; i < 3; ++i) {
    const double t = 0.5 * p.phi + vartheta[i];
    out[i] = {a * cx * std::cos(t), -a * cy * std::sin(t), 0.0};
  }
  return out;
}

SmallThetaResult small_theta_map(const HyperPoint& p, const GeomConstants& c,
                                 double theta_warn) {
  SmallThetaResult r;
  r.warning = p.theta > theta_warn;
  r.q.Q1 = kFourthRoot3 * c.f * (p.R - c.R0());
  r.q.rho = kFourthRoot3 * c.f * p.R * p.theta / 2.0;
  r.q.phi_p = wrap_two_pi(p.phi - 2.0 * kPi / 3.0);
  r.q.Qx = r.q.rho * std::cos(r.q.phi_p);
  r.q.Qy = r.q.rho * std::sin(r.q.phi_p);
  return r;
}

}  // namespace trimqdt::geom
