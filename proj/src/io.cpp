#include "qkr/io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qkr::io {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char ch : line) {
    if (ch == ',' || std::isspace(static_cast<unsigned char>(ch))) {
      if (!current.empty()) {
        fields.push_back(current);
        current.clear();
      }
    } else {
      current.push_back(ch);
    }
  }
  if (!current.empty()) fields.push_back(current);
  return fields;
}

bool parse_row(const std::vector<std::string>& fields, std::vector<double>& out) {
  out.clear();
  out.reserve(fields.size());
  for (const auto& f : fields) {
    char* end = nullptr;
    const double v = std::strtod(f.c_str(), &end);
    if (end == f.c_str() || *end != '\0') return false;
    out.push_back(v);
  }
  return true;
}

}  // namespace

std::string format_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

Table read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("read_table: cannot open " + path);

  Table table;
  std::string line;
  bool saw_data = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::size_t start = 1;
      while (start < line.size() &&
             std::isspace(static_cast<unsigned char>(line[start])))
        ++start;
      table.comments.push_back(line.substr(start));
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.empty()) continue;
    std::vector<double> row;
    if (parse_row(fields, row)) {
      table.rows.push_back(std::move(row));
      saw_data = true;
    } else if (!saw_data && table.columns.empty()) {
      table.columns = fields;
    } else {
      throw std::invalid_argument("read_table: malformed line in " + path);
    }
  }
  return table;
}

std::vector<std::vector<double>> read_matrix(const std::string& path) {
  Table t = read_table(path);
  if (t.rows.empty())
    throw std::invalid_argument("read_matrix: no numeric rows in " + path);
  return std::move(t.rows);
}

void write_table(const std::string& path,
                 const std::vector<std::string>& comments,
                 const std::vector<std::string>& columns,
                 const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("write_table: cannot open " + path);
  for (const auto& c : comments) out << "# " << c << '\n';
  if (!columns.empty()) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) out << ',';
      out << columns[i];
    }
    out << '\n';
  }
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << format_double(row[i]);
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write_table: write failed for " + path);
}

}  // namespace qkr::io
