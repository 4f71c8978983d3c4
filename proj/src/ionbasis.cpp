#include "trimqdt/ionbasis.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace trimqdt::ionbasis {

namespace {

int mod(int a, int n) { return ((a % n) + n) % n; }

// exp(2 pi i num / den), exact for the small denominators used here.
std::complex<double> unit_root(int num, int den) {
  const int r = mod(num, den);
  if (r == 0) return {1.0, 0.0};
  if (2 * r == den) return {-1.0, 0.0};
  if (4 * r == den) return {0.0, 1.0};
  if (4 * r == 3 * den) return {0.0, -1.0};
  const double a = 2.0 * 3.14159265358979323846 * r / den;
  return {std::cos(a), std::sin(a)};
}

double sign_pow(int n) { return mod(n, 2) == 0 ? 1.0 : -1.0; }

bool canonical(const Primitive& p, int N) {
  if (p.K > 0) return true;
  if (p.K < 0) return false;
  if (p.g != 0) return p.g > 0;
  if (p.twice_m2 != 0) return p.twice_m2 > 0;
  return N % 2 == 1;
}

}  // namespace

bool continuity_ok(int twice_m2, int K) { return mod(twice_m2 + K, 2) == 0; }

bool selection_ok(int twice_m2, int K, int g) {
  if (!continuity_ok(twice_m2, K)) return false;
  // twice (m2 + g) must be 6n (K even) or 6n + 3 (K odd)
  const int t = twice_m2 + 2 * g;
  return mod(K, 2) == 0 ? mod(t, 6) == 0 : mod(t, 6) == 3;
}

std::vector<SymBasisFunction> enumerate_basis(int N, int m, int g, int parity, int twice_m2_max,
                                              int n_spline) {
  if (N < 0 || std::abs(m) > N) throw std::invalid_argument("enumerate_basis: need |m+| <= N+");
  if (parity != 1 && parity != -1) throw std::invalid_argument("enumerate_basis: parity is +-1");
  if (g < -1 || g > 1) throw std::invalid_argument("enumerate_basis: g_I in {-1,0,1}");
  std::vector<int> gs = (g == 0) ? std::vector<int>{0} : std::vector<int>{1, -1};
  std::vector<SymBasisFunction> labels;
  for (int K = 0; K <= N; ++K) {
    if ((K % 2 == 0) != (parity == 1)) continue;
    for (int tm = -twice_m2_max; tm <= twice_m2_max; ++tm) {
      for (int gg : gs) {
        if (!selection_ok(tm, K, gg)) continue;
        const Primitive p{tm, K, gg};
        if (!canonical(p, N)) continue;
        SymBasisFunction b;
        b.twice_m2 = tm;
        b.K = K;
        b.N = N;
        b.m = m;
        b.g = gg;
        b.parity = parity;
        b.one_term = (tm == 0 && K == 0 && gg == 0);
        labels.push_back(b);
      }
    }
  }
  std::vector<SymBasisFunction> out;
  out.reserve(labels.size() * std::max(n_spline, 0));
  for (int j = 0; j < n_spline; ++j)
    for (auto b : labels) {
      b.j = j;
      out.push_back(b);
    }
  return out;
}

const char* to_string(Permutation p) {
  switch (p) {
    case Permutation::P12: return "P12";
    case Permutation::P23: return "P23";
    case Permutation::P31: return "P31";
    case Permutation::P12P31: return "P12P31";
    case Permutation::P12P23: return "P12P23";
  }
  return "?";
}

PhasedPrimitive apply_permutation(Permutation op, const Primitive& p, int N,
                                  PermutationTable table) {
  const int tm = p.twice_m2;
  PhasedPrimitive r;
  switch (op) {
    case Permutation::P12:
      // e^{i m2 (4pi/3 - phi)}, (-1)^{N+K} R_{-K}, e^{i 4pi g/3} Phi_{-g}
      r.p = {-tm, -p.K, -p.g};
      r.phase = unit_root(tm, 3) * sign_pow(N + p.K) * unit_root(2 * p.g, 3);
      break;
    case Permutation::P23:
      r.p = {-tm, -p.K, -p.g};
      r.phase = unit_root(tm, 6) * sign_pow(N) * unit_root(p.g, 3);
      break;
    case Permutation::P31: {
      r.p = {-tm, -p.K, -p.g};
      const double rot = table == PermutationTable::Adopted ? sign_pow(N) : sign_pow(N + p.K);
      r.phase = unit_root(tm, 2) * rot;
      break;
    }
    case Permutation::P12P31:
      r.p = p;
      r.phase = unit_root(tm, 6) * sign_pow(p.K) * unit_root(p.g, 3);
      break;
    case Permutation::P12P23:
      r.p = table == PermutationTable::Adopted ? p : Primitive{tm, p.K, -p.g};
      r.phase = unit_root(tm, 3) * unit_root(2 * p.g, 3);
      break;
  }
  return r;
}

Combination expand(const SymBasisFunction& b) {
  Combination c;
  c.N = b.N;
  const Primitive p = b.primitive();
  if (b.one_term) {
    c.terms.push_back({p, 1.0});
  } else {
    const double h = 1.0 / std::sqrt(2.0);
    c.terms.push_back({p, h});
    c.terms.push_back({p.partner(), -b.partner_sign() * h});
  }
  return c;
}

namespace {
void accumulate(Combination& c, const Primitive& p, std::complex<double> v) {
  for (auto& t : c.terms)
    if (t.p == p) {
      t.phase += v;
      return;
    }
  c.terms.push_back({p, v});
}
}  // namespace

Combination apply_permutation(Permutation op, const Combination& c, PermutationTable table) {
  Combination out;
  out.N = c.N;
  for (const auto& t : c.terms) {
    const auto r = apply_permutation(op, t.p, c.N, table);
    accumulate(out, r.p, t.phase * r.phase);
  }
  return out;
}

std::complex<double> proportionality(const Combination& c1, const Combination& c2, double tol) {
  const std::complex<double> nan(std::numeric_limits<double>::quiet_NaN(), 0.0);
  auto coef = [](const Combination& c, const Primitive& p) {
    std::complex<double> v = 0.0;
    for (const auto& t : c.terms)
      if (t.p == p) v += t.phase;
    return v;
  };
  std::complex<double> lambda = nan;
  bool have = false;
  for (const auto& t : c1.terms) {
    if (std::abs(t.phase) <= tol) continue;
    const auto ratio = coef(c2, t.p) / t.phase;
    if (!have) {
      lambda = ratio;
      have = true;
    } else if (std::abs(ratio - lambda) > tol) {
      return nan;
    }
  }
  if (!have) return nan;
  for (const auto& t : c2.terms)
    if (std::abs(t.phase) > tol && std::abs(coef(c1, t.p)) <= tol) return nan;
  return lambda;
}

Combination apply_antisymmetrizer(const Combination& c, PermutationTable table) {
  Combination out;
  out.N = c.N;
  for (const auto& t : c.terms) accumulate(out, t.p, t.phase);
  const std::pair<Permutation, double> ops[] = {{Permutation::P12, -1.0},
                                                {Permutation::P23, -1.0},
                                                {Permutation::P31, -1.0},
                                                {Permutation::P12P31, 1.0},
                                                {Permutation::P12P23, 1.0}};
  for (const auto& [op, sgn] : ops) {
    const auto pc = apply_permutation(op, c, table);
    for (const auto& t : pc.terms) accumulate(out, t.p, sgn * t.phase);
  }
  return out;
}

AntisymResult antisymmetrize(int N, int m, const Primitive& trial, int spline_index) {
  if (!continuity_ok(trial.twice_m2, trial.K))
    throw std::invalid_argument("antisymmetrize: K+/2 + m2 must be integral");
  AntisymResult r;
  Combination c;
  c.N = N;
  c.terms.push_back({trial, 1.0});
  const auto a = apply_antisymmetrizer(c);
  double norm2 = 0.0;
  for (const auto& t : a.terms) norm2 += std::norm(t.phase);
  if (norm2 < 1e-20) {
    r.zero = true;
    return r;
  }
  Primitive p = trial;
  if (!canonical(p, N)) p = p.partner();
  r.function.j = spline_index;
  r.function.twice_m2 = p.twice_m2;
  r.function.K = p.K;
  r.function.N = N;
  r.function.m = m;
  r.function.g = p.g;
  r.function.parity = (mod(p.K, 2) == 0) ? 1 : -1;
  r.function.one_term = (p.twice_m2 == 0 && p.K == 0 && p.g == 0);
  return r;
}

std::vector<ClosureIssue> check_group_closure(PermutationTable table, int N_max,
                                              int twice_m2_max) {
  std::vector<ClosureIssue> issues;
  auto compose = [&](Permutation a, Permutation b, const Primitive& p, int N) {
    const auto rb = apply_permutation(b, p, N, table);
    const auto ra = apply_permutation(a, rb.p, N, table);
    return PhasedPrimitive{ra.p, rb.phase * ra.phase};
  };
  auto check = [&](const std::string& rel, const PhasedPrimitive& lhs, const PhasedPrimitive& rhs,
                   const Primitive& p, int N) {
    if (!(lhs.p == rhs.p) || std::abs(lhs.phase - rhs.phase) > 1e-12)
      issues.push_back({rel, p, N, rhs.phase, lhs.phase});
  };
  for (int N = 0; N <= N_max; ++N)
    for (int K = -N; K <= N; ++K)
      for (int tm = -twice_m2_max; tm <= twice_m2_max; ++tm)
        for (int g = -1; g <= 1; ++g) {
          if (!continuity_ok(tm, K)) continue;
          const Primitive p{tm, K, g};
          const PhasedPrimitive id{p, 1.0};
          for (auto op : {Permutation::P12, Permutation::P23, Permutation::P31})
            check(std::string(to_string(op)) + "^2", compose(op, op, p, N), id, p, N);
          check("P12*P31", compose(Permutation::P12, Permutation::P31, p, N),
                apply_permutation(Permutation::P12P31, p, N, table), p, N);
          check("P12*P23", compose(Permutation::P12, Permutation::P23, p, N),
                apply_permutation(Permutation::P12P23, p, N, table), p, N);
          check("(P12P31)^2", compose(Permutation::P12P31, Permutation::P12P31, p, N),
                apply_permutation(Permutation::P12P23, p, N, table), p, N);
        }
  return issues;
}

}  // namespace trimqdt::ionbasis
