#pragma once

// trajectory.csv: header "t,theta_1,...,theta_dim,risk,grad_norm,W_1,...,W_H,V",
// one row per kept sample, every value with 17 significant digits.

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "relugf/flow.hpp"

namespace relugf {

inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("csv: malformed number '" + s + "'");
  }
  return x;
}

inline std::vector<std::string> trajectory_header(const NetworkShape& shape) {
  std::vector<std::string> h{"t"};
  for (std::size_t k = 1; k <= shape.dim(); ++k) h.push_back("theta_" + std::to_string(k));
  h.push_back("risk");
  h.push_back("grad_norm");
  for (std::size_t i = 1; i <= shape.H; ++i) h.push_back("W_" + std::to_string(i));
  h.push_back("V");
  return h;
}

/// Rows 0, stride, 2 stride, ... plus the final row.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj, std::size_t stride) {
  if (stride == 0) stride = 1;
  const auto header = trajectory_header(traj.shape);
  for (std::size_t k = 0; k < header.size(); ++k) os << (k ? "," : "") << header[k];
  os << '\n';
  for (std::size_t r = 0; r < traj.size(); ++r) {
    if (r % stride != 0 && r + 1 != traj.size()) continue;
    os << format_double(traj.times[r]);
    for (double v : traj.params[r].values()) os << ',' << format_double(v);
    os << ',' << format_double(traj.risk[r]) << ',' << format_double(traj.grad_norm[r]);
    for (double w : traj.W[r]) os << ',' << format_double(w);
    os << ',' << format_double(traj.V[r]) << '\n';
  }
}

inline void write_trajectory_csv(const std::string& path, const Trajectory& traj, std::size_t stride) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_trajectory_csv(out, traj, stride);
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t k = 0; k < header.size(); ++k) {
      if (header[k] == name) return k;
    }
    throw std::out_of_range("csv: no column '" + name + "'");
  }

  std::vector<double> series(const std::string& name) const {
    const std::size_t c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
  }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  return out;
}

inline CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv: empty input");
  t.header = split_csv_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != t.header.size()) throw std::runtime_error("csv: ragged row");
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_double(c));
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  return read_csv(in);
}

}  // namespace relugf
