#pragma once

#include <optional>
#include <string>
#include <vector>

namespace coincast {

// Minimal CSV support: no quoting, '.' decimal separator, mandatory header.
// This matches the fixed file schemas; a general CSV parser is not needed.

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line per row
};

std::vector<std::string> split_csv_line(const std::string& line);

// Reads a CSV file and checks the header matches `expected` exactly.
// Throws DataError naming the file and line on any mismatch.
CsvTable read_csv(const std::string& path, const std::vector<std::string>& expected);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

// Shortest decimal text that round-trips the double exactly.
std::string format_double(double v);

// Strict full-token parse. Throws DataError with the offending text.
double parse_double(const std::string& text);
long long parse_int(const std::string& text);

}  // namespace coincast
