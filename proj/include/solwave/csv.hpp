#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "solwave/field.hpp"

namespace solwave {

// All numeric output goes through one shortest-round-trip formatter so that
// repeated runs produce byte-identical artifacts (17 significant digits).
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_field_csv(std::ostream& os, const RealField& f) {
  os << "index,x,value_re\n";
  for (int i = 0; i < f.grid.n; ++i)
    os << i << ',' << format_double(f.grid.x(i)) << ',' << format_double(f.samples[i]) << '\n';
}

inline void write_field_csv(std::ostream& os, const ComplexEnvelope& q) {
  os << "index,x,value_re,value_im\n";
  for (int i = 0; i < q.grid.n; ++i)
    os << i << ',' << format_double(q.grid.x(i)) << ',' << format_double(q.samples[i].real())
       << ',' << format_double(q.samples[i].imag()) << '\n';
}

template <class Field>
void write_field_csv(const std::string& path, const Field& f) {
  std::ofstream os(path);
  if (!os) throw config_error("cannot open output file: " + path);
  write_field_csv(os, f);
}

// Two-column `t,value` series, the CLI's input format for fit/wavelet signals.
// A non-numeric first row is treated as a header and skipped.
inline std::vector<std::pair<double, double>> read_series_csv(std::istream& is) {
  std::vector<std::pair<double, double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string a, b;
    if (!std::getline(ls, a, ',') || !std::getline(ls, b)) {
      if (first) { first = false; continue; }
      throw config_error("malformed series row: " + line);
    }
    try {
      rows.emplace_back(std::stod(a), std::stod(b));
    } catch (const std::exception&) {
      if (!first) throw config_error("non-numeric series row: " + line);
    }
    first = false;
  }
  return rows;
}

inline std::vector<std::pair<double, double>> read_series_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw config_error("cannot open series file: " + path);
  return read_series_csv(is);
}

} // namespace solwave
