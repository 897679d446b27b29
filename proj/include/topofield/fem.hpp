#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <span>
#include <vector>

#include "topofield/grid.hpp"

namespace topofield {

// 8x8 stiffness of a unit-square plane-stress Q4 element with E = 1.
// Local node order is counter-clockwise: (0,0), (1,0), (1,1), (0,1),
// DOFs interleaved [u0x, u0y, ..., u3x, u3y].
struct ElementStiffness {
  Eigen::Matrix<double, 8, 8> k0;
};

ElementStiffness element_stiffness(double nu);

// Result of one linear-elasticity solve.
struct FieldSolution {
  Eigen::VectorXd u;                  // global displacements, fixed DOFs zero
  std::vector<double> strain_energy;  // per element, SIMP-scaled u_e^T k_e u_e
  std::vector<double> unit_energy;    // per element, u_e^T k0 u_e (density-free)
  double compliance = 0.0;            // f . u
};

// Assembles and solves K(rho) u = f on a fixed grid and boundary spec.
// Construction precomputes DOF maps and the symbolic factorization so that
// repeated solves (one per optimization epoch) only refactorize numerically.
class FemSolver {
 public:
  FemSolver(const GridDomain& grid, const BoundarySpec& bc, const MaterialModel& mat);

  FieldSolution solve(const DensityField& rho) const;

  const GridDomain& grid() const { return grid_; }
  const MaterialModel& material() const { return mat_; }
  const Eigen::Matrix<double, 8, 8>& k0() const { return k0_; }
  const std::array<int, 8>& element_dofs(int e) const {
    return edof_[static_cast<std::size_t>(e)];
  }

 private:
  GridDomain grid_;
  BoundarySpec bc_;
  MaterialModel mat_;
  Eigen::Matrix<double, 8, 8> k0_;
  std::vector<std::array<int, 8>> edof_;
  std::vector<int> full_to_free_;  // -1 where fixed
  std::vector<int> free_to_full_;
  Eigen::VectorXd f_free_;
  mutable Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
  mutable bool analyzed_ = false;
};

// One-shot convenience wrapper over FemSolver.
FieldSolution assemble_and_solve(const GridDomain& grid, const BoundarySpec& bc,
                                 const DensityField& rho, const MaterialModel& mat);

// Per-element strain energies of a solution; sums to the compliance.
const std::vector<double>& strain_energy_field(const FieldSolution& solution);

// dc/drho_e = -p rho^(p-1) (E0 - Emin) u_e^T k0 u_e; non-positive everywhere.
std::vector<double> compliance_sensitivity(const FieldSolution& solution, const DensityField& rho,
                                           const MaterialModel& mat);

}  // namespace topofield
