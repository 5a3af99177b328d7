#include "crdisc/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "crdisc/errors.hpp"

namespace crd {

VerdictRow pass_if(bool ok, std::string metric, double value, double threshold, std::string grid, std::uint64_t seed) {
  return {std::move(metric), value, threshold, ok ? "PASS" : "FAIL", std::move(grid), seed};
}

VerdictRow info_row(std::string metric, double value, std::string grid, std::uint64_t seed) {
  return {std::move(metric), value, std::nan(""), "INFO", std::move(grid), seed};
}

bool all_pass(const std::vector<VerdictRow>& rows) { return failures(rows) == 0; }

int failures(const std::vector<VerdictRow>& rows) {
  int n = 0;
  for (const auto& r : rows) n += r.verdict == "FAIL";
  return n;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvTable::add(std::vector<std::string> row) {
  require(row.size() == columns_.size(), "report", "row width differs from the header");
  for (const auto& c : row)
    require(c.find_first_of(",\n\"") == std::string::npos, "report", "cell '" + c + "' needs quoting");
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::ostringstream o;
  o << "# schema=" << kSchemaVersion << "\n";
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) o << (i ? "," : "") << cells[i];
    o << "\n";
  };
  line(columns_);
  for (const auto& r : rows_) line(r);
  return o.str();
}

CsvTable verdict_table(const std::vector<VerdictRow>& rows) {
  CsvTable t({"metric", "value", "threshold", "verdict", "grid", "seed"});
  for (const auto& r : rows)
    t.add({r.metric, format_number(r.value), format_number(r.threshold), r.verdict, r.grid, std::to_string(r.seed)});
  return t;
}

}  // namespace crd
