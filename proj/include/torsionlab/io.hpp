#pragma once

// File emission: field dumps (CSV and raw binary), JSON reports, gnuplot
// .dat series.  Everything is written atomically (temp file + rename).

#include <filesystem>
#include <string>
#include <vector>

#include "torsionlab/solver.hpp"

namespace torsionlab {

// Writes content to path via a temporary file in the same directory.
void atomic_write(const std::filesystem::path& path, const std::string& content);

// CSV with header  x,y,value,is_interior  in row-major node order.
void write_field_csv(const std::filesystem::path& path, const ScalarField& field);

// Raw little-endian dump: two uint64 dims (nx, ny), then nx*ny row-major
// float64 node values.
void write_field_binary(const std::filesystem::path& path, const ScalarField& field);

// Two-column gnuplot series.
void write_dat(const std::filesystem::path& path, const std::vector<double>& x,
               const std::vector<double>& y, const std::string& header = "");

}  // namespace torsionlab
