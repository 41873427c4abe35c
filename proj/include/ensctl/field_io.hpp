#pragma once

#include <filesystem>
#include <string>

#include "ensctl/control.hpp"
#include "ensctl/grid.hpp"

namespace ensctl {

/// Shortest round-tripping decimal rendering used by every CSV writer.
std::string format_real(double v);

/// Snapshot CSV: header "x,value" or "x,y,value", one row per cell in
/// row-major order.
std::string field_to_csv(const ScalarField& field);
void write_field_csv(const std::filesystem::path& path, const ScalarField& field);

/// Reads values back onto a known grid; throws Io when the row count or the
/// coordinates disagree with the grid.
ScalarField read_field_csv(const std::filesystem::path& path, const GridSpec& grid);

/// Control CSV: header "t,u1_1..u1_d,u2_1..u2_d", one row per time node.
std::string control_to_csv(const ControlPath& u);
void write_control_csv(const std::filesystem::path& path, const ControlPath& u);
/// Throws Io when the rows or times disagree with the time grid.
ControlPath read_control_csv(const std::filesystem::path& path, const TimeGrid& timegrid, int dim);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace ensctl
