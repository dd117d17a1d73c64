#include "bihartree/timeseries.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bihartree/error.hpp"

namespace bihartree {

std::string format_sample(const DiagnosticsSample& s) {
  const double v[] = {s.t,     s.mass,       s.energy,       s.ME,       s.MG,          s.M_R,
                      s.rhs_R, s.local_mass, s.lrstar_local, s.spacetime_acc, s.cauchy_h2};
  std::string row;
  char buf[40];
  for (std::size_t i = 0; i < std::size(v); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", v[i]);
    if (i) row += ',';
    row += buf;
  }
  return row;
}

void append_timeseries(const DiagnosticsSample& sample, const std::string& path) {
  std::error_code ec;
  const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw IoError("cannot append to time series '" + path + "'");
  if (fresh) out << kTimeseriesHeader << '\n';
  out << format_sample(sample) << '\n';
  if (!out) throw IoError("write failed for time series '" + path + "'");
}

std::vector<DiagnosticsSample> read_timeseries(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open time series '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != kTimeseriesHeader)
    throw IoError("time series '" + path + "' lacks the expected header");
  std::vector<DiagnosticsSample> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> v;
    while (std::getline(ss, cell, ',')) v.push_back(std::strtod(cell.c_str(), nullptr));
    if (v.size() != 11) throw IoError(path + ":" + std::to_string(lineno) + ": expected 11 columns");
    rows.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9], v[10]});
  }
  return rows;
}

}  // namespace bihartree
