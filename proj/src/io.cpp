#include "topofield/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "topofield/errors.hpp"

namespace topofield {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw NumericError("format_double failed");
  return std::string(buf, ptr);
}

std::string history_csv(const ConvergenceHistory& history) {
  std::ostringstream out;
  out << "epoch,compliance,vol_frac,loss,alpha\n";
  for (const auto& r : history.records) {
    out << r.epoch << ',' << format_double(r.compliance) << ',' << format_double(r.vol_frac) << ','
        << format_double(r.loss) << ',' << format_double(r.alpha) << '\n';
  }
  return out.str();
}

void write_history_csv(const std::string& path, const ConvergenceHistory& history) {
  write_text_file(path, history_csv(history));
}

std::string raster_csv(const Raster& raster) {
  std::ostringstream out;
  for (int row = 0; row < raster.height; ++row) {
    for (int col = 0; col < raster.width; ++col) {
      if (col) out << ',';
      out << format_double(raster.at(col, row));
    }
    out << '\n';
  }
  return out.str();
}

void write_raster_csv(const std::string& path, const Raster& raster) {
  write_text_file(path, raster_csv(raster));
}

Raster field_to_raster(const GridDomain& grid, const std::vector<double>& element_values) {
  if (static_cast<int>(element_values.size()) != grid.num_elements())
    throw ParameterError("field_to_raster: length does not match grid");
  Raster raster;
  raster.width = grid.nelx;
  raster.height = grid.nely;
  raster.values.resize(element_values.size());
  std::size_t i = 0;
  for (int ey = grid.nely - 1; ey >= 0; --ey)  // top row first
    for (int ex = 0; ex < grid.nelx; ++ex, ++i)
      raster.values[i] = element_values[static_cast<std::size_t>(grid.element_index(ex, ey))];
  return raster;
}

void write_density_pgm(const std::string& path, const Raster& raster) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParameterError("cannot open for writing: " + path);
  out << "P5\n" << raster.width << " " << raster.height << "\n255\n";
  for (double v : raster.values) {
    const double clamped = std::min(1.0, std::max(0.0, v));
    // density 1 -> ink (0), density 0 -> white (255)
    const auto pixel = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - clamped)));
    out.put(static_cast<char>(pixel));
  }
  if (!out) throw ParameterError("short write: " + path);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParameterError("cannot open for writing: " + path);
  out << content;
  if (!out) throw ParameterError("short write: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParameterError("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace topofield
