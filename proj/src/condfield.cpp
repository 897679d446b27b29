#include "topofield/condfield.hpp"

#include <algorithm>
#include <cmath>

#include "topofield/errors.hpp"

namespace {

constexpr double kFieldScale = 0.4;  // conditioning values live in [0, 0.4]
constexpr double kLogFloor = 1e-12;  // relative floor for zero entries under log

void check_raw(std::span<const double> raw) {
  if (raw.empty()) throw topofield::ParameterError("filter: empty strain-energy field");
  for (double v : raw) {
    if (!std::isfinite(v) || v < 0.0)
      throw topofield::ParameterError("filter: strain energies must be finite and >= 0");
  }
}

}  // namespace

namespace topofield {

FilterKind filter_from_string(const std::string& name) {
  if (name == "none") return FilterKind::none;
  if (name == "gamma") return FilterKind::gamma;
  if (name == "log") return FilterKind::log;
  throw ParameterError("unknown filter '" + name + "' (expected none, gamma or log)");
}

std::string to_string(FilterKind kind) {
  switch (kind) {
    case FilterKind::none: return "none";
    case FilterKind::gamma: return "gamma";
    case FilterKind::log: return "log";
  }
  return "none";
}

ConditioningField ConditioningField::zeros(const GridDomain& grid) {
  return ConditioningField{grid, FilterKind::none,
                           std::vector<double>(static_cast<std::size_t>(grid.num_elements()), 0.0)};
}

double percentile_99(std::span<const double> values) {
  if (values.empty()) throw ParameterError("percentile_99: empty input");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double pos = 0.99 * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= n) return sorted[n - 1];
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

ConditioningField gamma_filter(std::span<const double> raw_energy, double v_star,
                               const GridDomain& grid) {
  check_raw(raw_energy);
  if (!(v_star > 0.0 && v_star < 1.0)) throw ParameterError("gamma_filter: need 0 < v_star < 1");
  if (static_cast<int>(raw_energy.size()) != grid.num_elements())
    throw ParameterError("gamma_filter: field length does not match grid");

  const double p99 = percentile_99(raw_energy);
  std::vector<double> clipped(raw_energy.size());
  for (std::size_t i = 0; i < raw_energy.size(); ++i) clipped[i] = std::min(raw_energy[i], p99);

  const auto [lo_it, hi_it] = std::minmax_element(clipped.begin(), clipped.end());
  const double lo = *lo_it, hi = *hi_it;
  ConditioningField out{grid, FilterKind::gamma, std::vector<double>(clipped.size(), 0.0)};
  if (hi == lo) return out;  // constant field carries no information

  const double gamma = 1.0 - v_star;
  const double inv_range = 1.0 / (hi - lo);
  for (std::size_t i = 0; i < clipped.size(); ++i)
    out.values[i] = kFieldScale * std::pow((clipped[i] - lo) * inv_range, gamma);
  return out;
}

ConditioningField log_filter(std::span<const double> raw_energy, const GridDomain& grid) {
  check_raw(raw_energy);
  if (static_cast<int>(raw_energy.size()) != grid.num_elements())
    throw ParameterError("log_filter: field length does not match grid");

  ConditioningField out{grid, FilterKind::log, std::vector<double>(raw_energy.size(), 0.0)};
  const double max_raw = *std::max_element(raw_energy.begin(), raw_energy.end());
  if (max_raw == 0.0) return out;  // all-zero field

  // Work on E / max(E): scale-invariant by construction (a uniform input
  // scaling cancels in the ratio), with zero entries floored at 1e-12.
  // The max element maps to log(1) = 0, so max(logs) is exactly 0.
  std::vector<double> logs(raw_energy.size());
  for (std::size_t i = 0; i < raw_energy.size(); ++i)
    logs[i] = std::log(std::max(raw_energy[i] / max_raw, kLogFloor));

  const double lo = *std::min_element(logs.begin(), logs.end());
  if (lo == 0.0) return out;  // constant field

  for (std::size_t i = 0; i < logs.size(); ++i)
    out.values[i] = kFieldScale * ((logs[i] - lo) / (0.0 - lo));
  return out;
}

ConditioningField apply_filter(FilterKind kind, std::span<const double> raw_energy, double v_star,
                               const GridDomain& grid) {
  switch (kind) {
    case FilterKind::none: return ConditioningField::zeros(grid);
    case FilterKind::gamma: return gamma_filter(raw_energy, v_star, grid);
    case FilterKind::log: return log_filter(raw_energy, grid);
  }
  return ConditioningField::zeros(grid);
}

double sample_at_grid(const ConditioningField& field, double gx, double gy) {
  const int nx = field.grid.nelx, ny = field.grid.nely;
  // Clamp into the element-center lattice; boundary half-cells extend the
  // nearest center value.
  gx = std::clamp(gx, 0.0, static_cast<double>(nx - 1));
  gy = std::clamp(gy, 0.0, static_cast<double>(ny - 1));
  int ex = std::min(static_cast<int>(gx), nx - 2 >= 0 ? nx - 2 : 0);
  int ey = std::min(static_cast<int>(gy), ny - 2 >= 0 ? ny - 2 : 0);
  if (nx == 1) ex = 0;
  if (ny == 1) ey = 0;
  const double fx = nx == 1 ? 0.0 : gx - ex;
  const double fy = ny == 1 ? 0.0 : gy - ey;

  auto value = [&](int x, int y) {
    return field.values[static_cast<std::size_t>(field.grid.element_index(x, y))];
  };
  const double v00 = value(ex, ey);
  const double v10 = nx == 1 ? v00 : value(ex + 1, ey);
  const double v01 = ny == 1 ? v00 : value(ex, ey + 1);
  const double v11 = (nx == 1 || ny == 1) ? (nx == 1 ? v01 : v10) : value(ex + 1, ey + 1);
  return v00 * (1 - fx) * (1 - fy) + v10 * fx * (1 - fy) + v01 * (1 - fx) * fy + v11 * fx * fy;
}

double sample_bilinear(const ConditioningField& field, double x_norm, double y_norm) {
  const GridDomain& g = field.grid;
  const double half_x = 0.5 * g.nelx / g.longest_edge();
  const double half_y = 0.5 * g.nely / g.longest_edge();
  const double tol = 1e-12;
  if (x_norm < -half_x - tol || x_norm > half_x + tol || y_norm < -half_y - tol ||
      y_norm > half_y + tol)
    throw ParameterError("sample_bilinear: coordinates outside the domain");
  if (static_cast<int>(field.values.size()) != g.num_elements())
    throw ParameterError("sample_bilinear: field length does not match grid");
  return sample_at_grid(field, g.grid_x(x_norm) - 0.5, g.grid_y(y_norm) - 0.5);
}

}  // namespace topofield
