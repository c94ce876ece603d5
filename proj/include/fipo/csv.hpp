#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fipo::csv {

// Comma-separated table with optional '#' comment lines before/inside the
// body. Numeric cells are written with shortest round-trip formatting, so a
// write-read cycle reproduces doubles exactly.
struct Table {
  std::vector<std::string> comments;  // '#' lines, kept verbatim (without '#')
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& cell, const std::string& context = "") {
  const std::string s = trim(cell);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::invalid_argument("csv: bad numeric cell '" + cell + "'" +
                                (context.empty() ? "" : " in " + context));
  return v;
}

inline long parse_long(const std::string& cell, const std::string& context = "") {
  const std::string s = trim(cell);
  long v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::invalid_argument("csv: bad integer cell '" + cell + "'" +
                                (context.empty() ? "" : " in " + context));
  return v;
}

inline Table read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("csv: cannot open " + path);
  Table t;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    std::string s = trim(line);
    if (s.empty()) continue;
    if (s[0] == '#') {
      t.comments.push_back(s.substr(1));
      continue;
    }
    if (!have_header) {
      t.header = split_line(s);
      have_header = true;
    } else {
      t.rows.push_back(split_line(s));
    }
  }
  return t;
}

inline void write_file(const std::string& path, const Table& t) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("csv: cannot write " + path);
  for (const auto& c : t.comments) out << '#' << c << '\n';
  for (size_t i = 0; i < t.header.size(); ++i)
    out << (i ? "," : "") << t.header[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

// FNV-1a, used for the config-hash stamp in output preambles.
inline std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace fipo::csv
