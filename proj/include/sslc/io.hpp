#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sslc/error.hpp"
#include "sslc/grid.hpp"

namespace sslc::io {

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open '" + p.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot open '" + p.string() + "' for writing");
  out << content;
  if (!out) throw IoError("write to '" + p.string() + "' failed");
}

inline std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  }
};

// Comma-separated, first line is the header, no quoting. Blank lines are
// skipped; rows with the wrong field count are rejected with their line
// number.
inline CsvTable parse_csv(const std::string& text, const std::string& source) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split(line);
    if (t.header.empty()) {
      t.header = std::move(fields);
      continue;
    }
    if (fields.size() != t.header.size())
      throw IoError(source + ":" + std::to_string(lineno) + ": expected " +
                    std::to_string(t.header.size()) + " fields, got " +
                    std::to_string(fields.size()));
    t.rows.push_back(std::move(fields));
    t.line_numbers.push_back(lineno);
  }
  if (t.header.empty()) throw IoError(source + ": missing header line");
  return t;
}

inline double parse_double(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IoError(where + ": '" + s + "' is not a number");
  }
}

// Points CSV: one coordinate column per dimension, header required.
inline std::vector<Point> read_points_csv(const std::string& text, int dim,
                                          const std::string& source) {
  const CsvTable t = parse_csv(text, source);
  if (static_cast<int>(t.header.size()) != dim)
    throw IoError(source + ": expected " + std::to_string(dim) + " coordinate columns, got " +
                  std::to_string(t.header.size()));
  std::vector<Point> pts;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    Point p{};
    for (int k = 0; k < dim; ++k)
      p[k] = parse_double(t.rows[r][k], source + ":" + std::to_string(t.line_numbers[r]));
    pts.push_back(p);
  }
  return pts;
}

}  // namespace sslc::io
