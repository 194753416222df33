#pragma once

#include "rfsim/diagnostics.hpp"
#include "rfsim/grid.hpp"
#include "rfsim/hydro.hpp"

#include <array>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

namespace rfsim {

/// Contents of a legacy VTK structured-points file, one point per cell.
struct Snapshot {
  int nx = 0, nz = 0;
  std::array<double, 2> origin{0.0, 0.0};
  std::array<double, 2> spacing{1.0, 1.0};
  std::vector<std::pair<std::string, std::vector<double>>> scalars;
  std::vector<std::pair<std::string, std::vector<std::array<double, 3>>>> vectors;

  const std::vector<double>& scalar(const std::string& name) const;
  const std::vector<std::array<double, 3>>& vector(const std::string& name) const;
};

/// Writes theta, p, the cell-centred velocity and Y_1..Y_N at 17
/// significant digits. Throws IoError when the file cannot be written.
void write_snapshot(const std::string& path, const Grid& grid, const FlowState& state, const SpeciesField& Y);

Snapshot read_snapshot(const std::string& path);

/// CSV rows of InvariantReport, header equal to the field names.
std::string csv_header();
std::string csv_row(const InvariantReport& r);

class TimeSeriesWriter {
 public:
  explicit TimeSeriesWriter(const std::string& path);
  void append(const InvariantReport& r);

 private:
  std::ofstream out_;
  std::string path_;
};

}  // namespace rfsim
