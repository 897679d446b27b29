#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "topofield/errors.hpp"

namespace topofield {

// Regular grid of unit-square Q4 elements.
//
// Conventions used throughout the project:
//   - x runs right (0..nelx), y runs up (0..nely).
//   - Nodes are numbered column-major, y fastest: node (x, y) -> x*(nely+1) + y.
//   - Each node carries two DOFs: 2*node (x-displacement), 2*node+1 (y-displacement).
//   - Elements are numbered column-major, y fastest: element (ex, ey) -> ex*nely + ey.
struct GridDomain {
  int nelx = 1;
  int nely = 1;

  int num_elements() const { return nelx * nely; }
  int num_nodes() const { return (nelx + 1) * (nely + 1); }
  int num_dofs() const { return 2 * num_nodes(); }

  int node_index(int x, int y) const { return x * (nely + 1) + y; }
  int element_index(int ex, int ey) const { return ex * nely + ey; }
  int element_x(int e) const { return e / nely; }
  int element_y(int e) const { return e % nely; }

  // Longest edge spans [-0.5, 0.5]; the shorter axis keeps the aspect ratio
  // (40x20 -> y in [-0.25, 0.25]). Input is in grid units (element size 1).
  double longest_edge() const { return static_cast<double>(std::max(nelx, nely)); }
  double normalized_x(double x_grid) const { return (x_grid - 0.5 * nelx) / longest_edge(); }
  double normalized_y(double y_grid) const { return (y_grid - 0.5 * nely) / longest_edge(); }
  double grid_x(double x_norm) const { return x_norm * longest_edge() + 0.5 * nelx; }
  double grid_y(double y_norm) const { return y_norm * longest_edge() + 0.5 * nely; }

  void validate() const {
    if (nelx < 1 || nely < 1) throw ParameterError("grid: nelx and nely must be >= 1");
  }
};

// Supports and loads, expressed on global DOF indices.
struct BoundarySpec {
  std::vector<int> fixed_dofs;    // constrained to zero displacement
  std::map<int, double> loads;    // DOF index -> force value

  // Checks index ranges, requires at least one support, and drops loads
  // applied to fixed DOFs (with a warning on stderr) so parametric sweeps
  // over load positions cannot crash at corner cases.
  BoundarySpec validated(const GridDomain& grid) const;
};

// Modified-SIMP material interpolation: E(rho) = Emin + rho^p (E0 - Emin).
struct MaterialModel {
  double E0 = 1.0;
  double Emin = 1e-9;
  double nu = 0.3;
  double p = 3.0;

  double stiffness(double rho) const { return Emin + std::pow(rho, p) * (E0 - Emin); }

  void validate() const {
    if (!(Emin > 0.0) || !(Emin < E0)) throw ParameterError("material: need 0 < Emin < E0");
    if (!(nu >= 0.0) || !(nu < 0.5)) throw ParameterError("material: need 0 <= nu < 0.5");
    if (!(p >= 1.0)) throw ParameterError("material: need p >= 1");
  }
};

// Per-element densities in [0, 1], element-index order.
struct DensityField {
  std::vector<double> values;

  int size() const { return static_cast<int>(values.size()); }
  double operator[](int e) const { return values[static_cast<std::size_t>(e)]; }
  double& operator[](int e) { return values[static_cast<std::size_t>(e)]; }

  static DensityField uniform(int n, double value) {
    return DensityField{std::vector<double>(static_cast<std::size_t>(n), value)};
  }
};

// Obstacle regions: passive elements are forced to the void floor and are
// excluded from the volume-fraction average.
struct PassiveMask {
  std::vector<std::uint8_t> passive;  // length n or empty (no mask)

  bool empty() const { return passive.empty(); }
  bool is_passive(int e) const {
    return !passive.empty() && passive[static_cast<std::size_t>(e)] != 0;
  }
  int active_count(int n) const {
    if (passive.empty()) return n;
    int active = 0;
    for (auto v : passive) active += (v == 0);
    return active;
  }

  void validate(const GridDomain& grid) const {
    if (passive.empty()) return;
    if (static_cast<int>(passive.size()) != grid.num_elements())
      throw ParameterError("passive mask length does not match element count");
    if (active_count(grid.num_elements()) == 0)
      throw ParameterError("passive mask leaves no active element");
  }
};

// Mean density over active elements.
double mean_density(const DensityField& rho, const PassiveMask& mask);

}  // namespace topofield
