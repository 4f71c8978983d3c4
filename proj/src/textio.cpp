#include "trimqdt/textio.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace trimqdt::textio {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream ss(s);
  std::vector<std::string> out;
  std::string t;
  while (ss >> t) out.push_back(t);
  return out;
}

double to_double(const std::string& s, const std::string& where) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::runtime_error(where + ": not a number: '" + s + "'");
  }
  if (used != s.size()) throw std::runtime_error(where + ": trailing characters in '" + s + "'");
  if (!std::isfinite(v)) throw std::runtime_error(where + ": non-finite value");
  return v;
}

int to_int(const std::string& s, const std::string& where) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(s, &used);
  } catch (const std::exception&) {
    throw std::runtime_error(where + ": not an integer: '" + s + "'");
  }
  if (used != s.size()) throw std::runtime_error(where + ": not an integer: '" + s + "'");
  return static_cast<int>(v);
}

namespace {
std::string strip_comment(const std::string& line) {
  const auto h = line.find('#');
  return trim(h == std::string::npos ? line : line.substr(0, h));
}

template <class F>
void for_each_line(const std::string& text, F f) {
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const std::string t = strip_comment(line);
    if (!t.empty()) f(t, n);
  }
}
}  // namespace

KeyValues parse_key_values(const std::string& text, const std::string& origin) {
  KeyValues kv;
  kv.origin = origin;
  for_each_line(text, [&](const std::string& t, int n) {
    const auto eq = t.find('=');
    const std::string where = origin + ":" + std::to_string(n);
    if (eq == std::string::npos) throw std::runtime_error(where + ": expected 'key = value'");
    const std::string k = trim(t.substr(0, eq)), v = trim(t.substr(eq + 1));
    if (k.empty()) throw std::runtime_error(where + ": empty key");
    if (kv.values.count(k)) throw std::runtime_error(where + ": duplicate key '" + k + "'");
    kv.values[k] = v;
    kv.lines[k] = n;
  });
  return kv;
}

KeyValues read_key_values(const std::string& path) { return parse_key_values(read_file(path), path); }

NumericRows read_numeric_rows(const std::string& path) {
  NumericRows out;
  for_each_line(read_file(path), [&](const std::string& t, int n) {
    NumericRow r;
    r.line = n;
    for (const auto& tok : split_ws(t)) r.values.push_back(to_double(tok, path + ":" + std::to_string(n)));
    out.rows.push_back(std::move(r));
  });
  return out;
}

std::string IonLevelRow::label() const {
  std::string s = "(" + std::to_string(N) + "," + std::to_string(G) + "){" + band + "}";
  if (tag != "-") s += tag;
  return s;
}

std::vector<IonLevelRow> parse_ion_levels(const std::string& text, const std::string& origin) {
  std::vector<IonLevelRow> out;
  for_each_line(text, [&](const std::string& t, int n) {
    const std::string where = origin + ":" + std::to_string(n);
    const auto tok = split_ws(t);
    if (tok.size() != 6) throw std::runtime_error(where + ": expected 'N+ G band tag energy source'");
    IonLevelRow r;
    r.N = to_int(tok[0], where);
    r.G = to_int(tok[1], where);
    r.band = tok[2];
    r.tag = tok[3];
    r.energy = to_double(tok[4], where);
    r.source = tok[5];
    if (r.N < 0 || r.G < 0) throw std::runtime_error(where + ": N+ and G must be non-negative");
    if (r.tag != "-" && r.tag != "l" && r.tag != "u") throw std::runtime_error(where + ": tag must be l, u or -");
    out.push_back(r);
  });
  return out;
}

std::vector<IonLevelRow> read_ion_levels(const std::string& path) {
  return parse_ion_levels(read_file(path), path);
}

std::string format_ion_levels(const std::vector<IonLevelRow>& rows) {
  std::ostringstream os;
  os << "# N+ G band tag energy_cm-1 source\n";
  for (const auto& r : rows) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", r.energy);
    os << r.N << " " << r.G << " " << r.band << " " << r.tag << " " << buf << " " << r.source << "\n";
  }
  return os.str();
}

std::vector<ReferenceRow> parse_reference(const std::string& text, const std::string& origin) {
  std::vector<ReferenceRow> out;
  for_each_line(text, [&](const std::string& t, int n) {
    const std::string where = origin + ":" + std::to_string(n);
    const auto tok = split_ws(t);
    if (tok.size() < 3) throw std::runtime_error(where + ": expected 'label energy source [key=value ...]'");
    ReferenceRow r{tok[0], to_double(tok[1], where), tok[2], ""};
    for (std::size_t i = 3; i < tok.size(); ++i) {
      if (tok[i].find('=') == std::string::npos || tok[i].front() == '=')
        throw std::runtime_error(where + ": trailing fields must be key=value");
      r.extra += (r.extra.empty() ? "" : " ") + tok[i];
    }
    out.push_back(r);
  });
  return out;
}

std::vector<ReferenceRow> read_reference(const std::string& path) {
  return parse_reference(read_file(path), path);
}

std::string format_reference(const std::vector<ReferenceRow>& rows) {
  std::ostringstream os;
  os << "# label energy_cm-1 source\n";
  for (const auto& r : rows) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", r.energy);
    os << r.label << " " << buf << " " << r.source;
    if (!r.extra.empty()) os << " " << r.extra;
    os << "\n";
  }
  return os.str();
}

std::string fnv1a_hex(const std::string& data) {
  unsigned long long h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", h);
  return buf;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string s = buf;
  // normalise negative zero
  bool allzero = true;
  for (char c : s)
    if (c != '-' && c != '0' && c != '.') allzero = false;
  if (allzero && !s.empty() && s[0] == '-') s = s.substr(1);
  return s;
}

}  // namespace trimqdt::textio
