#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace defm {

/// A parsed CSV file: header row plus data rows, all cells as raw strings.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index for `name`, or -1 if absent.
  int column(const std::string& name) const;
};

/// Reads a comma-delimited UTF-8 file with a required header row. Handles
/// RFC-4180 quoting and CRLF endings; cells are trimmed of surrounding
/// whitespace. Ragged rows are an error.
CsvTable read_csv(const std::string& path);
CsvTable read_csv_stream(std::istream& in, const std::string& origin);

/// Shortest round-trip decimal rendering of a double (via std::to_chars),
/// so identical values always serialize to identical bytes.
std::string format_double(double v);

}  // namespace defm
