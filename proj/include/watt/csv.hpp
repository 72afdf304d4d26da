#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "watt/error.hpp"
#include "watt/types.hpp"

// Strict CSV: header row required, comma separator, '.' decimal, UTF-8, no
// quoting. Numbers are parsed with from_chars (whole token or error) and
// written in shortest round-trip form, so read-write-read is lossless.

namespace watt::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

namespace detail {

inline std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace detail

inline Table read_table(std::istream& in) {
  Table t;
  std::string line;
  if (!std::getline(in, line))
    throw Error(errc::invalid_argument, "empty input: header row required");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  t.header = detail::split_line(line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = detail::split_line(line);
    if (cells.size() != t.header.size())
      throw Error(errc::length_mismatch,
                  "line " + std::to_string(lineno) + ": expected " +
                      std::to_string(t.header.size()) + " fields, got " +
                      std::to_string(cells.size()));
    t.rows.push_back(std::move(cells));
  }
  return t;
}

inline Table read_table_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(errc::invalid_argument, "cannot open " + path);
  return read_table(in);
}

inline std::size_t column_index(const Table& t, const std::string& name) {
  for (std::size_t j = 0; j < t.header.size(); ++j)
    if (t.header[j] == name) return j;
  throw Error(errc::invalid_argument, "no column named '" + name + "'");
}

inline double parse_double(const std::string& token, std::size_t row,
                           const std::string& col) {
  double v = 0.0;
  const char* b = token.data();
  const char* e = b + token.size();
  const auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc{} || ptr != e)
    throw Error(errc::invalid_argument, "row " + std::to_string(row + 1) + " column '" +
                                            col + "': cannot parse '" + token + "'");
  if (!std::isfinite(v))
    throw Error(errc::non_finite, "row " + std::to_string(row + 1) + " column '" + col +
                                      "': non-finite value");
  return v;
}

inline std::vector<double> numeric_column(const Table& t, const std::string& name) {
  const std::size_t j = column_index(t, name);
  std::vector<double> out;
  out.reserve(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    out.push_back(parse_double(t.rows[i][j], i, name));
  return out;
}

inline std::vector<int> treatment_column(const Table& t, const std::string& name) {
  const std::size_t j = column_index(t, name);
  std::vector<int> out;
  out.reserve(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const double v = parse_double(t.rows[i][j], i, name);
    if (v != 0.0 && v != 1.0)
      throw Error(errc::invalid_argument,
                  "row " + std::to_string(i + 1) + " column '" + name +
                      "': treatment must be 0 or 1");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

inline Dataset dataset_from_table(const Table& t, const std::string& outcome,
                                  const std::string& treatment,
                                  const std::vector<std::string>& covariates) {
  if (covariates.empty())
    throw Error(errc::invalid_argument, "at least one covariate column required");
  std::vector<int> z = treatment_column(t, treatment);
  std::vector<double> y = numeric_column(t, outcome);
  Matrix X(t.rows.size(), covariates.size());
  for (std::size_t j = 0; j < covariates.size(); ++j) {
    const std::vector<double> col = numeric_column(t, covariates[j]);
    for (std::size_t i = 0; i < col.size(); ++i) X(i, j) = col[i];
  }
  return validate(std::move(z), std::move(y), std::move(X), covariates);
}

// Shortest representation that round-trips through from_chars.
inline std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw Error(errc::invalid_argument, "to_chars failed");
  return std::string(buf, ptr);
}

namespace detail {

inline void check_label(const std::string& s) {
  for (char ch : s)
    if (ch == ',' || ch == '\n' || ch == '\r')
      throw Error(errc::invalid_argument, "label contains a CSV delimiter: " + s);
}

}  // namespace detail

inline void write_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t j = 0; j < cells.size(); ++j) {
    if (j) out << ',';
    out << cells[j];
  }
  out << '\n';
}

inline void write_dataset(std::ostream& out, const Dataset& d,
                          const std::string& treatment_name = "z",
                          const std::string& outcome_name = "y") {
  detail::check_label(treatment_name);
  detail::check_label(outcome_name);
  for (const auto& nm : d.names) detail::check_label(nm);
  std::vector<std::string> header = {treatment_name, outcome_name};
  header.insert(header.end(), d.names.begin(), d.names.end());
  write_row(out, header);
  for (std::size_t i = 0; i < d.n(); ++i) {
    std::vector<std::string> cells;
    cells.reserve(2 + d.p());
    cells.push_back(d.z[i] ? "1" : "0");
    cells.push_back(format_double(d.y[i]));
    for (std::size_t j = 0; j < d.p(); ++j) cells.push_back(format_double(d.X(i, j)));
    write_row(out, cells);
  }
}

// 64-bit FNV-1a content digest for run manifests.
inline std::uint64_t fnv1a64(std::istream& in) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x00000100000001B3ULL;
    }
    if (got < static_cast<std::streamsize>(sizeof(buf))) break;
  }
  return h;
}

inline std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(errc::invalid_argument, "cannot open " + path);
  return fnv1a64(in);
}

}  // namespace watt::csv
