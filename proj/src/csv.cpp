#include "rothe/csv.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rothe/config.hpp"
#include "rothe/errors.hpp"

namespace rothe::csv {

void Table::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size())
    throw InvalidInput("csv row has " + std::to_string(row.size()) + " cells, expected " +
                       std::to_string(columns.size()));
  rows.push_back(std::move(row));
}

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw InvalidInput("csv has no column '" + name + "'");
}

double Table::number(std::size_t row, const std::string& name) const {
  return std::stod(rows.at(row).at(column(name)));
}

std::string cell(double v) { return format_double(v); }
std::string cell(int v) { return std::to_string(v); }

std::string to_string(const Table& t) {
  std::ostringstream os;
  os << "# schema_version=" << kSchemaVersion << " schema=" << t.schema << "\n";
  auto emit = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << "\n";
  };
  emit(t.columns);
  for (const auto& r : t.rows) emit(r);
  return os.str();
}

void write(const Table& t, const std::string& path, bool finalize) {
  const std::string tmp = path + ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp + "'");
    out << to_string(t);
    if (!out) throw Error("write to '" + tmp + "' failed");
  }
  if (finalize) std::filesystem::rename(tmp, path);
}

namespace {
std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}
}  // namespace

Table parse(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Table t;
  if (!std::getline(in, line)) throw ParseError("empty csv", 1, "schema_version");
  const std::string prefix = "# schema_version=";
  if (line.rfind(prefix, 0) != 0) throw ParseError("missing schema_version line", 1, "schema_version");
  std::istringstream head(line.substr(prefix.size()));
  int version = 0;
  std::string rest;
  head >> version >> rest;
  if (version != kSchemaVersion) throw ParseError("unsupported schema_version", 1, "schema_version");
  if (rest.rfind("schema=", 0) != 0) throw ParseError("missing schema name", 1, "schema");
  t.schema = rest.substr(7);
  if (!std::getline(in, line)) throw ParseError("missing header row", 2, "header");
  t.columns = split(line);
  int line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != t.columns.size()) throw ParseError("ragged csv row", line_no, "row");
    t.rows.push_back(std::move(cells));
  }
  return t;
}

Table read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

}  // namespace rothe::csv
