#pragma once

#include <string>
#include <vector>

#include "trimqdt/textio.hpp"

namespace trimqdt::cmp {

enum class CompareMode { Absolute, OffsetFit, Differences };
CompareMode parse_mode(const std::string& s);
const char* to_string(CompareMode m);

struct CompareRow {
  std::string label;
  double calc = 0.0;
  double ref = 0.0;
  double diff = 0.0;  ///< after offset handling
};

struct ComparisonReport {
  CompareMode mode = CompareMode::Absolute;
  std::vector<CompareRow> rows;
  std::vector<std::string> unmatched_calc;
  std::vector<std::string> unmatched_ref;
  double offset = 0.0;  ///< mean calc - ref removed in offset-fit mode
  double rms = 0.0;
  double max_abs = 0.0;
};

/// Rows are matched by exact label. Differences mode compares every matched
/// row against the first matched row (level spacings).
ComparisonReport compare(const std::vector<textio::ReferenceRow>& calc, const std::vector<textio::ReferenceRow>& ref,
                         CompareMode mode);

std::string format_report(const ComparisonReport& r);

/// Rows of one source ("cal", "exp", ...) in a reference table.
std::vector<textio::ReferenceRow> select_source(const std::vector<textio::ReferenceRow>& rows,
                                                const std::string& source);
std::vector<textio::ReferenceRow> select_source(const std::vector<textio::IonLevelRow>& rows,
                                                const std::string& source);

/// A computed level with its (N, G) assignment.
struct GroupedLevel {
  int N = 0;
  int G = 0;
  double energy = 0.0;  ///< cm^-1
};

/// Labels computed levels after reference labels "N,g,U": within each (N, |g|)
/// group both sides are sorted by energy and matched by rank. Extra computed
/// levels are labelled "N,G,#k".
std::vector<textio::ReferenceRow> label_by_group(const std::vector<GroupedLevel>& calc,
                                                 const std::vector<textio::ReferenceRow>& ref);

/// (N, |g|) parsed from an "N,g,U" label.
std::pair<int, int> parse_ngu(const std::string& label);

}  // namespace trimqdt::cmp
