#include "trimqdt/compare.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace trimqdt::cmp {

CompareMode parse_mode(const std::string& s) {
  if (s == "absolute") return CompareMode::Absolute;
  if (s == "offset-fit") return CompareMode::OffsetFit;
  if (s == "differences") return CompareMode::Differences;
  throw std::invalid_argument("unknown comparison mode '" + s + "'");
}

const char* to_string(CompareMode m) {
  switch (m) {
    case CompareMode::Absolute: return "absolute";
    case CompareMode::OffsetFit: return "offset-fit";
    case CompareMode::Differences: return "differences";
  }
  return "?";
}

ComparisonReport compare(const std::vector<textio::ReferenceRow>& calc, const std::vector<textio::ReferenceRow>& ref,
                         CompareMode mode) {
  ComparisonReport r;
  r.mode = mode;
  std::map<std::string, double> c;
  for (const auto& x : calc) {
    if (c.count(x.label)) throw std::invalid_argument("compare: duplicate computed label " + x.label);
    c[x.label] = x.energy;
  }
  std::map<std::string, bool> used;
  std::vector<CompareRow> rows;
  for (const auto& x : ref) {
    auto it = c.find(x.label);
    if (it == c.end()) {
      r.unmatched_ref.push_back(x.label);
      continue;
    }
    used[x.label] = true;
    rows.push_back({x.label, it->second, x.energy, it->second - x.energy});
  }
  for (const auto& x : calc)
    if (!used.count(x.label)) r.unmatched_calc.push_back(x.label);

  if (mode == CompareMode::OffsetFit && !rows.empty()) {
    double s = 0.0;
    for (const auto& x : rows) s += x.diff;
    r.offset = s / rows.size();
    for (auto& x : rows) x.diff -= r.offset;
  } else if (mode == CompareMode::Differences) {
    std::vector<CompareRow> d;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const double dc = rows[i].calc - rows[0].calc, dr = rows[i].ref - rows[0].ref;
      d.push_back({rows[i].label + "-" + rows[0].label, dc, dr, dc - dr});
    }
    rows = d;
  }
  double ss = 0.0;
  for (const auto& x : rows) {
    ss += x.diff * x.diff;
    r.max_abs = std::max(r.max_abs, std::abs(x.diff));
  }
  r.rms = rows.empty() ? 0.0 : std::sqrt(ss / rows.size());
  r.rows = std::move(rows);
  return r;
}

std::string format_report(const ComparisonReport& r) {
  std::ostringstream os;
  os << "# mode " << to_string(r.mode) << "\n";
  os << "# offset_cm-1 " << textio::fixed(r.offset, 4) << "\n";
  os << "# label calc_cm-1 ref_cm-1 diff_cm-1\n";
  for (const auto& x : r.rows)
    os << x.label << " " << textio::fixed(x.calc, 4) << " " << textio::fixed(x.ref, 4) << " "
       << textio::fixed(x.diff, 4) << "\n";
  os << "# rows " << r.rows.size() << "\n";
  os << "# rms " << textio::fixed(r.rms, 4) << "\n";
  os << "# max_abs " << textio::fixed(r.max_abs, 4) << "\n";
  for (const auto& u : r.unmatched_ref) os << "# unmatched_ref " << u << "\n";
  for (const auto& u : r.unmatched_calc) os << "# unmatched_calc " << u << "\n";
  return os.str();
}

std::vector<textio::ReferenceRow> select_source(const std::vector<textio::ReferenceRow>& rows,
                                                const std::string& source) {
  std::vector<textio::ReferenceRow> out;
  for (const auto& r : rows)
    if (r.source == source) out.push_back(r);
  return out;
}

std::vector<textio::ReferenceRow> select_source(const std::vector<textio::IonLevelRow>& rows,
                                                const std::string& source) {
  std::vector<textio::ReferenceRow> out;
  for (const auto& r : rows)
    if (r.source == source) out.push_back({r.label(), r.energy, r.source, ""});
  return out;
}

std::pair<int, int> parse_ngu(const std::string& label) {
  std::istringstream in(label);
  int N = 0, g = 0;
  char c1 = 0;
  if (!(in >> N >> c1 >> g) || c1 != ',') throw std::invalid_argument("bad N,g,U label '" + label + "'");
  return {N, std::abs(g)};
}

std::vector<textio::ReferenceRow> label_by_group(const std::vector<GroupedLevel>& calc,
                                                 const std::vector<textio::ReferenceRow>& ref) {
  std::map<std::pair<int, int>, std::vector<const textio::ReferenceRow*>> rg;
  for (const auto& r : ref) rg[parse_ngu(r.label)].push_back(&r);
  for (auto& [k, v] : rg)
    std::stable_sort(v.begin(), v.end(), [](auto* a, auto* b) { return a->energy < b->energy; });
  std::map<std::pair<int, int>, std::vector<const GroupedLevel*>> cg;
  for (const auto& c : calc) cg[{c.N, c.G}].push_back(&c);
  std::vector<textio::ReferenceRow> out;
  for (auto& [k, v] : cg) {
    std::stable_sort(v.begin(), v.end(), [](auto* a, auto* b) { return a->energy < b->energy; });
    const auto it = rg.find(k);
    for (std::size_t i = 0; i < v.size(); ++i) {
      std::string label;
      if (it != rg.end() && i < it->second.size())
        label = it->second[i]->label;
      else
        label = std::to_string(k.first) + "," + std::to_string(k.second) + ",#" + std::to_string(i + 1);
      out.push_back({label, v[i]->energy, "calc", ""});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.energy < b.energy; });
  return out;
}

}  // namespace trimqdt::cmp
