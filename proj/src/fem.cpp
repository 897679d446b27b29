#include "topofield/fem.hpp"

#include <cmath>
#include <limits>

#include "topofield/errors.hpp"

namespace topofield {

ElementStiffness element_stiffness(double nu) {
  if (!(nu >= 0.0) || !(nu < 0.5)) throw ParameterError("element_stiffness: need 0 <= nu < 0.5");
  // Closed form of the analytically integrated plane-stress Q4 stiffness for
  // a unit square with E = 1 (the familiar 8-entry generator pattern).
  const double k[8] = {0.5 - nu / 6.0,
                       0.125 + nu / 8.0,
                       -0.25 - nu / 12.0,
                       -0.125 + 3.0 * nu / 8.0,
                       -0.25 + nu / 12.0,
                       -0.125 - nu / 8.0,
                       nu / 6.0,
                       0.125 - 3.0 * nu / 8.0};
  static const int idx[8][8] = {{0, 1, 2, 3, 4, 5, 6, 7}, {1, 0, 7, 6, 5, 4, 3, 2},
                                {2, 7, 0, 5, 6, 3, 4, 1}, {3, 6, 5, 0, 7, 2, 1, 4},
                                {4, 5, 6, 7, 0, 1, 2, 3}, {5, 4, 3, 2, 1, 0, 7, 6},
                                {6, 3, 4, 1, 2, 7, 0, 5}, {7, 2, 1, 4, 3, 6, 5, 0}};
  ElementStiffness out;
  const double scale = 1.0 / (1.0 - nu * nu);
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) out.k0(r, c) = scale * k[idx[r][c]];
  return out;
}

FemSolver::FemSolver(const GridDomain& grid, const BoundarySpec& bc, const MaterialModel& mat)
    : grid_(grid), bc_(bc.validated(grid)), mat_(mat) {
  mat_.validate();
  k0_ = element_stiffness(mat_.nu).k0;

  const int n = grid_.num_elements();
  edof_.resize(static_cast<std::size_t>(n));
  for (int ex = 0; ex < grid_.nelx; ++ex) {
    for (int ey = 0; ey < grid_.nely; ++ey) {
      const int n0 = grid_.node_index(ex, ey);
      const int n1 = grid_.node_index(ex + 1, ey);
      const int n2 = grid_.node_index(ex + 1, ey + 1);
      const int n3 = grid_.node_index(ex, ey + 1);
      edof_[static_cast<std::size_t>(grid_.element_index(ex, ey))] = {
          2 * n0, 2 * n0 + 1, 2 * n1, 2 * n1 + 1, 2 * n2, 2 * n2 + 1, 2 * n3, 2 * n3 + 1};
    }
  }

  const int ndof = grid_.num_dofs();
  full_to_free_.assign(static_cast<std::size_t>(ndof), 0);
  for (int d : bc_.fixed_dofs) full_to_free_[static_cast<std::size_t>(d)] = -1;
  free_to_full_.clear();
  for (int d = 0; d < ndof; ++d) {
    if (full_to_free_[static_cast<std::size_t>(d)] == 0) {
      full_to_free_[static_cast<std::size_t>(d)] = static_cast<int>(free_to_full_.size());
      free_to_full_.push_back(d);
    }
  }

  f_free_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(free_to_full_.size()));
  for (const auto& [dof, value] : bc_.loads) {
    const int fi = full_to_free_[static_cast<std::size_t>(dof)];
    if (fi >= 0) f_free_[fi] += value;  // fixed-DOF loads were dropped in validation
  }
}

FieldSolution FemSolver::solve(const DensityField& rho) const {
  const int n = grid_.num_elements();
  if (rho.size() != n) throw ParameterError("solve: density length does not match element count");
  for (int e = 0; e < n; ++e) {
    const double r = rho[e];
    if (!(r >= 0.0 && r <= 1.0)) throw ParameterError("solve: density outside [0, 1]");
  }

  const int nfree = static_cast<int>(free_to_full_.size());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(n) * 64);
  for (int e = 0; e < n; ++e) {
    const double scale = mat_.stiffness(rho[e]);
    const auto& dofs = edof_[static_cast<std::size_t>(e)];
    for (int a = 0; a < 8; ++a) {
      const int ra = full_to_free_[static_cast<std::size_t>(dofs[a])];
      if (ra < 0) continue;
      for (int b = 0; b < 8; ++b) {
        const int cb = full_to_free_[static_cast<std::size_t>(dofs[b])];
        if (cb < 0) continue;
        triplets.emplace_back(ra, cb, scale * k0_(a, b));
      }
    }
  }
  Eigen::SparseMatrix<double> K(nfree, nfree);
  K.setFromTriplets(triplets.begin(), triplets.end());

  if (!analyzed_) {
    ldlt_.analyzePattern(K);
    analyzed_ = true;
  }
  ldlt_.factorize(K);
  if (ldlt_.info() != Eigen::Success)
    throw SolverError("FE factorization failed (insufficient supports?)");
  // Rank deficiency shows up as vanishing or negative pivots; the Emin floor
  // keeps pivots of healthy systems many orders of magnitude above this.
  const auto& pivots = ldlt_.vectorD();
  if (!(pivots.minCoeff() > 1e-14 * pivots.maxCoeff()))
    throw SolverError("FE system is singular (insufficient supports?)");
  Eigen::VectorXd u_free = ldlt_.solve(f_free_);
  if (ldlt_.info() != Eigen::Success) throw SolverError("FE back-substitution failed");
  if (!u_free.allFinite()) throw NumericError("FE solution contains non-finite values");

  FieldSolution sol;
  sol.u = Eigen::VectorXd::Zero(grid_.num_dofs());
  for (int i = 0; i < nfree; ++i) sol.u[free_to_full_[static_cast<std::size_t>(i)]] = u_free[i];
  sol.compliance = f_free_.dot(u_free);

  sol.strain_energy.resize(static_cast<std::size_t>(n));
  sol.unit_energy.resize(static_cast<std::size_t>(n));
  Eigen::Matrix<double, 8, 1> ue;
  for (int e = 0; e < n; ++e) {
    const auto& dofs = edof_[static_cast<std::size_t>(e)];
    for (int a = 0; a < 8; ++a) ue[a] = sol.u[dofs[a]];
    // quadratic form of a PSD matrix; clamp the round-off of near-rigid motion
    const double unit = std::max(0.0, ue.dot(k0_ * ue));
    sol.unit_energy[static_cast<std::size_t>(e)] = unit;
    sol.strain_energy[static_cast<std::size_t>(e)] = mat_.stiffness(rho[e]) * unit;
  }
  return sol;
}

FieldSolution assemble_and_solve(const GridDomain& grid, const BoundarySpec& bc,
                                 const DensityField& rho, const MaterialModel& mat) {
  return FemSolver(grid, bc, mat).solve(rho);
}

const std::vector<double>& strain_energy_field(const FieldSolution& solution) {
  return solution.strain_energy;
}

std::vector<double> compliance_sensitivity(const FieldSolution& solution, const DensityField& rho,
                                           const MaterialModel& mat) {
  const std::size_t n = solution.unit_energy.size();
  if (static_cast<std::size_t>(rho.size()) != n)
    throw ParameterError("compliance_sensitivity: density length mismatch");
  std::vector<double> dc(n);
  for (std::size_t e = 0; e < n; ++e) {
    dc[e] = -mat.p * std::pow(rho.values[e], mat.p - 1.0) * (mat.E0 - mat.Emin) *
            solution.unit_energy[e];
  }
  return dc;
}

}  // namespace topofield
