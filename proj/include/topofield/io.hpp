#pragma once

#include <string>
#include <vector>

#include "topofield/optloop.hpp"

namespace topofield {

// Shortest round-trip decimal representation of a double; keeps repeated
// runs byte-identical in every CSV we emit.
std::string format_double(double v);

// Header "epoch,compliance,vol_frac,loss,alpha", one row per epoch.
std::string history_csv(const ConvergenceHistory& history);
void write_history_csv(const std::string& path, const ConvergenceHistory& history);

// Raster as CSV, one row per grid row, top row first, columns left to right.
std::string raster_csv(const Raster& raster);
void write_raster_csv(const std::string& path, const Raster& raster);

// Element field (element-index order) reshaped to a raster for export.
Raster field_to_raster(const GridDomain& grid, const std::vector<double>& element_values);

// Binary 8-bit PGM (P5). Density 1 maps to black ink, density 0 to white.
void write_density_pgm(const std::string& path, const Raster& raster);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace topofield
