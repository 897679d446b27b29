#pragma once

#include <span>
#include <string>
#include <vector>

#include "topofield/grid.hpp"

namespace topofield {

enum class FilterKind { none, gamma, log };

FilterKind filter_from_string(const std::string& name);
std::string to_string(FilterKind kind);

// Filtered, normalized strain-energy field on element centers. Values live in
// [0, 0.4]; a non-constant field attains both endpoints. Computed once on the
// uniform initial domain and kept fixed for the whole optimization.
struct ConditioningField {
  GridDomain grid;
  FilterKind filter = FilterKind::none;
  std::vector<double> values;  // element-index order

  static ConditioningField zeros(const GridDomain& grid);
};

// Linear-interpolation percentile (index 0.99*(n-1) between order statistics).
double percentile_99(std::span<const double> values);

// Clip at the 99th percentile, min-max normalize, gamma-correct with
// gamma = 1 - v_star, scale to [0, 0.4]. Constant input maps to all zeros.
ConditioningField gamma_filter(std::span<const double> raw_energy, double v_star,
                               const GridDomain& grid);

// log of the field (zero entries floored at 1e-12 * max), min-max normalized
// to [0, 0.4]. Constant or all-zero input maps to all zeros.
ConditioningField log_filter(std::span<const double> raw_energy, const GridDomain& grid);

ConditioningField apply_filter(FilterKind kind, std::span<const double> raw_energy,
                               double v_star, const GridDomain& grid);

// Bilinear interpolation over element centers at a lattice coordinate
// (gx, gy) in [−0.5, nelx−0.5] x [−0.5, nely−0.5]; element (ex, ey)'s value
// sits at (ex, ey). Boundary half-cells clamp to the nearest center.
double sample_at_grid(const ConditioningField& field, double gx, double gy);

// Same interpolation addressed in normalized domain coordinates.
// Coordinates outside the domain bounding box are a parameter error.
double sample_bilinear(const ConditioningField& field, double x_norm, double y_norm);

}  // namespace topofield
