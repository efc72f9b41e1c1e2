#pragma once

#include <string>
#include <vector>

#include "homtom/tomography.hpp"

namespace homtom {

inline constexpr int kSchemaVersion = 1;

// CSV layout: comment header carrying schema version and convention, then
// a q,p,w row per grid node in row-major order.  All values at 17
// significant digits so a round trip is bit exact.
void write_grid_csv(const WignerGrid& g, const std::string& path);
WignerGrid read_grid_csv(const std::string& path);

void write_grid_json(const WignerGrid& g, const std::string& path);
WignerGrid read_grid_json(const std::string& path);

/// Column-oriented curve table, one header row then numeric rows.
void write_curve_csv(const std::string& path, const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows);

}  // namespace homtom
