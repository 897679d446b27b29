#include "topofield/grid.hpp"

#include <iostream>

namespace topofield {

BoundarySpec BoundarySpec::validated(const GridDomain& grid) const {
  grid.validate();
  const int ndof = grid.num_dofs();
  if (fixed_dofs.empty())
    throw ParameterError("boundary: no fixed DOFs, the system would be singular");
  BoundarySpec out;
  out.fixed_dofs = fixed_dofs;
  std::sort(out.fixed_dofs.begin(), out.fixed_dofs.end());
  out.fixed_dofs.erase(std::unique(out.fixed_dofs.begin(), out.fixed_dofs.end()),
                       out.fixed_dofs.end());
  for (int d : out.fixed_dofs)
    if (d < 0 || d >= ndof) throw ParameterError("boundary: fixed DOF index out of range");

  std::vector<std::uint8_t> is_fixed(static_cast<std::size_t>(ndof), 0);
  for (int d : out.fixed_dofs) is_fixed[static_cast<std::size_t>(d)] = 1;
  for (const auto& [dof, value] : loads) {
    if (dof < 0 || dof >= ndof) throw ParameterError("boundary: load DOF index out of range");
    if (is_fixed[static_cast<std::size_t>(dof)]) {
      std::cerr << "warning: load on fixed DOF " << dof << " ignored\n";
      continue;
    }
    out.loads[dof] += value;
  }
  return out;
}

double mean_density(const DensityField& rho, const PassiveMask& mask) {
  double sum = 0.0;
  int count = 0;
  for (int e = 0; e < rho.size(); ++e) {
    if (mask.is_passive(e)) continue;
    sum += rho[e];
    ++count;
  }
  if (count == 0) throw ParameterError("mean_density: no active elements");
  return sum / count;
}

}  // namespace topofield
