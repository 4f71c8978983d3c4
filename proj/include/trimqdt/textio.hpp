#pragma once

#include <map>
#include <string>
#include <vector>

namespace trimqdt::textio {

std::string read_file(const std::string& path);
std::string trim(const std::string& s);
std::vector<std::string> split_ws(const std::string& s);

double to_double(const std::string& s, const std::string& where);
int to_int(const std::string& s, const std::string& where);

/// "key = value" lines; '#' starts a comment; duplicate keys are an error.
struct KeyValues {
  std::string origin;
  std::map<std::string, std::string> values;
  std::map<std::string, int> lines;
};
KeyValues parse_key_values(const std::string& text, const std::string& origin);
KeyValues read_key_values(const std::string& path);

struct NumericRow {
  int line = 0;
  std::vector<double> values;
};
struct NumericRows {
  std::vector<NumericRow> rows;
};
/// Whitespace-separated numbers, comments and blank lines skipped, NaN rejected.
NumericRows read_numeric_rows(const std::string& path);

/// Ion level table row: "N+ G band tag energy source".
struct IonLevelRow {
  int N = 0;
  int G = 0;
  std::string band;    ///< e.g. 0,0^0
  std::string tag;     ///< l, u or -
  double energy = 0.0; ///< cm^-1
  std::string source;  ///< cal, exp, ...
  bool operator==(const IonLevelRow&) const = default;
  std::string label() const;  ///< (N,G){band}tag
};
std::vector<IonLevelRow> parse_ion_levels(const std::string& text, const std::string& origin);
std::vector<IonLevelRow> read_ion_levels(const std::string& path);
std::string format_ion_levels(const std::vector<IonLevelRow>& rows);

/// Reference level row: "label energy source [key=value ...]".
struct ReferenceRow {
  std::string label;
  double energy = 0.0;  ///< cm^-1
  std::string source;
  std::string extra;    ///< trailing key=value tokens, space separated
  bool operator==(const ReferenceRow&) const = default;
};
std::vector<ReferenceRow> parse_reference(const std::string& text, const std::string& origin);
std::vector<ReferenceRow> read_reference(const std::string& path);
std::string format_reference(const std::vector<ReferenceRow>& rows);

/// 64-bit FNV-1a hash as 16 hex digits.
std::string fnv1a_hex(const std::string& data);

/// Fixed-point formatting independent of locale.
std::string fixed(double v, int digits);

}  // namespace trimqdt::textio
