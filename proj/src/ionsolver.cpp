#include "trimqdt/ionsolver.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "trimqdt/units.hpp"

namespace trimqdt::ion {

double RovibState::energy_cm() const { return to_cm(energy); }

std::string RovibState::label() const {
  char buf[64];
  if (v1 < 0 || G < 0) {
    std::snprintf(buf, sizeof buf, "(%d,%d){?}", block.N, std::max(G, 0));
    return buf;
  }
  std::snprintf(buf, sizeof buf, "(%d,%d){%d,%d^%d}", block.N, G, v1, v2, l2);
  std::string s = buf;
  if (ul) s += ul;
  return s;
}

BlockSolution solve_block(const Block& block, const PotentialSurface* V, const IonSolverOptions& opt) {
  BlockSolution sol;
  sol.block = block;
  HyperangularProblem prob(block, opt.angular);
  sol.angular = opt.angular;
  sol.labels = prob.labels();
  sol.embedding = prob.embedding();
  if (prob.dim() == 0) return sol;
  sol.grid = make_dvr(opt.dvr_points, opt.R_min, opt.R_max, prob.mass());
  sol.channels = solve_on_grid(prob, sol.grid.R, V, opt.n_chan, opt.threads);
  sol.svd = svd_solve(sol.grid, sol.channels, prob.overlap(), opt.n_states);
  const int nc = sol.svd.n_chan;
  const int nR = static_cast<int>(sol.grid.R.size());
  const auto& labels = prob.labels();
  for (int i = 0; i < sol.svd.energies.size(); ++i) {
    RovibState st;
    st.energy = sol.svd.energies(i);
    st.block = block;
    st.c = sol.svd.c.col(i);
    std::vector<double> w(labels.size(), 0.0);
    for (int n = 0; n < nR; ++n) {
      const Eigen::VectorXd x = sol.channels[n].a * st.c.segment(n * nc, nc);
      const auto wn = prob.label_weights(x);
      for (std::size_t s = 0; s < w.size(); ++s) w[s] += wn[s];
    }
    for (std::size_t s = 0; s < w.size(); ++s)
      st.gl_weights[{labels[s].G(), std::abs(labels[s].l2())}] += w[s];
    sol.states.push_back(std::move(st));
  }
  return sol;
}

void assign_labels(std::vector<RovibState>& states, double purity) {
  std::map<std::tuple<int, int, int>, std::vector<RovibState*>> groups;
  for (auto& s : states) {
    s.G = s.l2 = s.v1 = s.v2 = -1;
    s.ul = 0;
    s.ambiguous = true;
    s.note.clear();
    double total = 0.0, best = -1.0;
    std::pair<int, int> key{0, 0};
    for (const auto& [k, w] : s.gl_weights) {
      total += w;
      if (w > best) {
        best = w;
        key = k;
      }
    }
    if (total <= 0.0) {
      s.note = "no weights";
      continue;
    }
    s.G = key.first;
    s.l2 = key.second;
    if (best / total < purity) {
      s.note = "mixed (G,l2) character";
      continue;
    }
    groups[{s.block.N, s.G, s.l2}].push_back(&s);
  }
  for (auto& [key, members] : groups) {
    const auto [N, G, l2] = key;
    std::sort(members.begin(), members.end(),
              [](const RovibState* a, const RovibState* b) { return a->energy < b->energy; });
    const bool split = l2 != 0 && (N - l2) >= G && G >= 1;
    const std::size_t band = split ? 2 : 1;
    for (std::size_t i = 0; i < members.size(); ++i) {
      RovibState& s = *members[i];
      if (i >= band) {
        s.note = "above the band members of its (N,G,l2) group";
        continue;
      }
      s.v1 = 0;
      s.v2 = l2;
      s.ambiguous = false;
      if (split) s.ul = (i == 0) ? 'l' : 'u';
    }
  }
}

}  // namespace trimqdt::ion
