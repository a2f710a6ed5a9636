#pragma once

#include <string>
#include <vector>

namespace qkr::io {

// Fixed-format double, deterministic across runs ("%.12g").
std::string format_double(double v);

struct Table {
  std::vector<std::string> comments;  // '#' lines, markers stripped
  std::vector<std::string> columns;   // empty when the file has no header row
  std::vector<std::vector<double>> rows;
};

// CSV with '#'-prefixed metadata comments and an optional non-numeric header
// row. Values may be separated by commas or whitespace.
Table read_table(const std::string& path);

// Numeric matrix: same tolerance for comments and separators, no header.
std::vector<std::vector<double>> read_matrix(const std::string& path);

void write_table(const std::string& path,
                 const std::vector<std::string>& comments,
                 const std::vector<std::string>& columns,
                 const std::vector<std::vector<double>>& rows);

}  // namespace qkr::io
