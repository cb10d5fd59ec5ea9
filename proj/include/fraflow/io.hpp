#pragma once

#include <string>
#include <vector>

#include "fraflow/flow.hpp"
#include "fraflow/grid.hpp"

namespace fraflow {

// Fixed column set of every time-series CSV.
inline constexpr const char* kTraceHeader =
    "t,mass,entropy,fisher,renyi,boundary_frac,min_u";

void ensure_dir(const std::string& path);

// One row per diagnostic record, 17 significant digits (bit-stable).
void write_trace_csv(const std::string& path, const FlowTrace& trace);

// Iteration history as "<label> per row" CSV with an index column.
void write_history_csv(const std::string& path, const std::string& label,
                       const std::vector<double>& values);

// Flat binary dump (little-endian float64, row-major) with a JSON sidecar
// <name>.meta.json describing grid, dtype, and layout.
void dump_field(const std::string& dir, const std::string& name, const Field& f);

void write_text(const std::string& path, const std::string& content);

// gnuplot script plotting the trace columns against time.
std::string plot_script(const std::string& csv_name);

}  // namespace fraflow
