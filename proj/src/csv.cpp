#include "defm/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "defm/errors.hpp"

namespace defm {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r'))
    --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_line(const std::string& line,
                                    const std::string& origin,
                                    std::size_t lineno) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(trim(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  if (quoted)
    fail(errc::unparseable_value, origin + ":" + std::to_string(lineno) +
                                      ": unterminated quoted cell");
  cells.push_back(trim(cell));
  return cells;
}

}  // namespace

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

CsvTable read_csv_stream(std::istream& in, const std::string& origin) {
  CsvTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1) {
      table.header = split_line(line, origin, lineno);
      continue;
    }
    if (line.empty() || line == "\r") continue;
    auto cells = split_line(line, origin, lineno);
    if (cells.size() != table.header.size())
      fail(errc::unparseable_value,
           origin + ":" + std::to_string(lineno) + ": expected " +
               std::to_string(table.header.size()) + " cells, found " +
               std::to_string(cells.size()));
    table.rows.push_back(std::move(cells));
  }
  if (table.header.empty())
    fail(errc::io, origin + ": missing header row");
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io, "cannot open " + path);
  return read_csv_stream(in, path);
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace defm
