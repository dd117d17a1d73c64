#pragma once

#include <string>
#include <vector>

#include "bihartree/diagnostics.hpp"

namespace bihartree {

inline constexpr const char* kTimeseriesHeader =
    "t,mass,energy,ME,MG,M_R,rhs_R,local_mass,lrstar_local,spacetime_acc,cauchy_h2";

/// One CSV row, every value at 17 significant digits.
std::string format_sample(const DiagnosticsSample& s);

/// Appends a row, writing the header first when the file is missing or empty.
void append_timeseries(const DiagnosticsSample& sample, const std::string& path);

/// Parses a file written by append_timeseries.
std::vector<DiagnosticsSample> read_timeseries(const std::string& path);

}  // namespace bihartree
