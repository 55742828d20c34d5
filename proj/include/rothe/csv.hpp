#pragma once

// Versioned CSV tables. Every file starts with a comment line
//   # schema_version=<v> schema=<name>
// followed by a header row; reals are written with 17 significant digits.

#include <string>
#include <vector>

namespace rothe::csv {

inline constexpr int kSchemaVersion = 1;

struct Table {
  std::string schema;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  /// index of a column, throws InvalidInput if absent
  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
};

std::string cell(double v);
std::string cell(int v);

std::string to_string(const Table& t);
/// Writes path via a sibling ".partial" file, renamed into place only when
/// finalize is true (failed commands keep the ".partial" file).
void write(const Table& t, const std::string& path, bool finalize = true);

/// Throws ParseError on a missing/foreign schema line or ragged rows.
Table parse(const std::string& text);
Table read(const std::string& path);

}  // namespace rothe::csv
