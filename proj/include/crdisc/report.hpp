#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace crd {

/// One verdict line: value compared against threshold at a given grid and seed.
struct VerdictRow {
  std::string metric;
  double value = 0.0;
  double threshold = 0.0;
  /// PASS, FAIL, or INFO for rows that do not enter the verdict
  std::string verdict;
  std::string grid;
  std::uint64_t seed = 0;
};

VerdictRow pass_if(bool ok, std::string metric, double value, double threshold, std::string grid, std::uint64_t seed);
VerdictRow info_row(std::string metric, double value, std::string grid, std::uint64_t seed);
bool all_pass(const std::vector<VerdictRow>& rows);
int failures(const std::vector<VerdictRow>& rows);

/// Fixed-precision number formatting shared by every CSV (nan and inf spelled out).
std::string format_number(double v);

/// CSV with the schema comment as its first line.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);
  void add(std::vector<std::string> row);
  std::string str() const;
  std::size_t size() const { return rows_.size(); }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

inline constexpr int kSchemaVersion = 1;

/// metric,value,threshold,verdict,grid,seed
CsvTable verdict_table(const std::vector<VerdictRow>& rows);

}  // namespace crd
